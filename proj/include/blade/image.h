// Copyright 2026 The BLADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLADE_IMAGE_H_
#define BLADE_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace blade {

// Planar single-channel raster, row-major, nominal intensity range [0, 255].
class ImageGray {
 public:
  ImageGray() = default;
  ImageGray(int width, int height, float fill = 0.0f);
  ImageGray(int width, int height, std::vector<float> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  float& at(int x, int y) { return samples_[Index(x, y)]; }
  float at(int x, int y) const { return samples_[Index(x, y)]; }

  // Read with symmetric (reflect-without-repeat) boundary handling.
  float reflected(int x, int y) const;

  float* row(int y) { return samples_.data() + static_cast<size_t>(y) * width_; }
  const float* row(int y) const {
    return samples_.data() + static_cast<size_t>(y) * width_;
  }

  std::span<float> samples() { return samples_; }
  std::span<const float> samples() const { return samples_; }

  bool operator==(const ImageGray& other) const = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> samples_;
};

// Three planes of equal dimensions; plane order R, G, B.
struct ImageRGB {
  ImageRGB() = default;
  ImageRGB(int width, int height, float fill = 0.0f);
  ImageRGB(ImageGray r, ImageGray g, ImageGray b);

  int width() const { return planes[0].width(); }
  int height() const { return planes[0].height(); }

  ImageGray& operator[](int c) { return planes[c]; }
  const ImageGray& operator[](int c) const { return planes[c]; }

  bool operator==(const ImageRGB& other) const = default;

  ImageGray planes[3];
};

// Centered odd n x n square of tap offsets, enumerated row-major.
class Footprint {
 public:
  explicit Footprint(int side);

  int side() const { return side_; }
  int radius() const { return side_ / 2; }
  int size() const { return side_ * side_; }
  int center_index() const { return size() / 2; }

 private:
  int side_;
};

struct Pixel {
  int x = 0;
  int y = 0;
};

// Maps an arbitrary index onto [0, n) by abcb-style reflection.
inline int ReflectIndex(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// (R_i z)_j = z_{i+j} for j in the footprint, row-major.
std::vector<float> ExtractPatch(const ImageGray& img, Pixel center,
                                const Footprint& fp);
void ExtractPatch(const ImageGray& img, Pixel center, const Footprint& fp,
                  std::span<float> out);

// Returns +infinity for identical images.
double Psnr(const ImageGray& a, const ImageGray& b);
// Mean squared error pooled over the three channels.
double Psnr(const ImageRGB& a, const ImageRGB& b);
double MeanSquaredError(const ImageGray& a, const ImageGray& b);

// Mean SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
// L = 255, averaged over all fully contained windows.
double Mssim(const ImageGray& a, const ImageGray& b);

// Adds unclipped i.i.d. N(0, sigma^2) noise. Deterministic in seed.
ImageGray AddAwgn(const ImageGray& img, double sigma, uint64_t seed);

// Antialiased Catmull-Rom (a = -0.5) downsampling to ceil(d/2).
ImageGray Downsample2x(const ImageGray& img);
// Catmull-Rom interpolation onto a grid of the given dimensions, with
// pixel centers aligned to a 2x coarser source.
ImageGray Upsample2x(const ImageGray& img, int width, int height);

// RGGB phase: R at (even x, even y), B at (odd x, odd y), G elsewhere.
enum class BayerChannel { kRed = 0, kGreen = 1, kBlue = 2 };
BayerChannel BayerChannelAt(int x, int y);
ImageGray BayerMosaic(const ImageRGB& img);
ImageRGB BilinearDemosaic(const ImageGray& mosaic);

// Rec.601 luma.
ImageGray Luma(const ImageRGB& img);

// Counterclockwise quarter turns and the horizontal mirror.
ImageGray Rotate90(const ImageGray& img);
ImageGray FlipHorizontal(const ImageGray& img);
// The eight elements of the dihedral group: rotation by 90*(k%4) degrees,
// preceded by a horizontal flip when k >= 4.
ImageGray D4Transform(const ImageGray& img, int k);

ImageGray Clamp(const ImageGray& img, float lo = 0.0f, float hi = 255.0f);

}  // namespace blade

#endif  // BLADE_IMAGE_H_
