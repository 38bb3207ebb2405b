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

#include "blade/image.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "blade/parallel.h"

namespace blade {

ImageGray::ImageGray(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
  samples_.assign(static_cast<size_t>(width) * height, fill);
}

ImageGray::ImageGray(int width, int height, std::vector<float> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (samples_.size() != static_cast<size_t>(width) * height) {
    throw std::invalid_argument("sample count does not match dimensions");
  }
}

float ImageGray::reflected(int x, int y) const {
  return at(ReflectIndex(x, width_), ReflectIndex(y, height_));
}

ImageRGB::ImageRGB(int width, int height, float fill)
    : planes{ImageGray(width, height, fill), ImageGray(width, height, fill),
             ImageGray(width, height, fill)} {}

ImageRGB::ImageRGB(ImageGray r, ImageGray g, ImageGray b)
    : planes{std::move(r), std::move(g), std::move(b)} {
  for (int c = 1; c < 3; ++c) {
    if (planes[c].width() != planes[0].width() ||
        planes[c].height() != planes[0].height()) {
      throw std::invalid_argument("RGB planes differ in dimensions");
    }
  }
}

Footprint::Footprint(int side) : side_(side) {
  if (side < 1 || side % 2 == 0) {
    throw std::invalid_argument("footprint side must be a positive odd "
                                "integer, got " + std::to_string(side));
  }
}

void ExtractPatch(const ImageGray& img, Pixel center, const Footprint& fp,
                  std::span<float> out) {
  if (center.x < 0 || center.y < 0 || center.x >= img.width() ||
      center.y >= img.height()) {
    throw std::out_of_range("patch center (" + std::to_string(center.x) +
                            ", " + std::to_string(center.y) +
                            ") outside image");
  }
  if (out.size() != static_cast<size_t>(fp.size())) {
    throw std::invalid_argument("patch buffer has wrong length");
  }
  const int r = fp.radius();
  size_t k = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      out[k++] = img.reflected(center.x + dx, center.y + dy);
    }
  }
}

std::vector<float> ExtractPatch(const ImageGray& img, Pixel center,
                                const Footprint& fp) {
  std::vector<float> patch(fp.size());
  ExtractPatch(img, center, fp, patch);
  return patch;
}

namespace {

void RequireSameDims(const ImageGray& a, const ImageGray& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(
        "image dimensions differ: " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
        "x" + std::to_string(b.height()));
  }
}

double PsnrFromMse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double SumSquaredError(const ImageGray& a, const ImageGray& b) {
  double sum = 0.0;
  auto sa = a.samples();
  auto sb = b.samples();
  for (size_t i = 0; i < sa.size(); ++i) {
    const double d = static_cast<double>(sa[i]) - sb[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

double MeanSquaredError(const ImageGray& a, const ImageGray& b) {
  RequireSameDims(a, b);
  return SumSquaredError(a, b) / static_cast<double>(a.size());
}

double Psnr(const ImageGray& a, const ImageGray& b) {
  return PsnrFromMse(MeanSquaredError(a, b));
}

double Psnr(const ImageRGB& a, const ImageRGB& b) {
  double mse = 0.0;
  for (int c = 0; c < 3; ++c) mse += MeanSquaredError(a[c], b[c]);
  return PsnrFromMse(mse / 3.0);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::array<double, kSsimWindow> SsimWeights() {
  std::array<double, kSsimWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    w[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable "valid" Gaussian filter of f(a, b) per pixel.
template <typename F>
std::vector<double> WindowMeans(const ImageGray& a, const ImageGray& b, F f) {
  const auto w = SsimWeights();
  const int width = a.width();
  const int out_w = width - kSsimWindow + 1;
  const int out_h = a.height() - kSsimWindow + 1;
  std::vector<double> horiz(static_cast<size_t>(out_w) * a.height());
  for (int y = 0; y < a.height(); ++y) {
    const float* ra = a.row(y);
    const float* rb = b.row(y);
    for (int x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += w[k] * f(static_cast<double>(ra[x + k]),
                      static_cast<double>(rb[x + k]));
      }
      horiz[static_cast<size_t>(y) * out_w + x] = s;
    }
  }
  std::vector<double> out(static_cast<size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += w[k] * horiz[static_cast<size_t>(y + k) * out_w + x];
      }
      out[static_cast<size_t>(y) * out_w + x] = s;
    }
  }
  return out;
}

}  // namespace

double Mssim(const ImageGray& a, const ImageGray& b) {
  RequireSameDims(a, b);
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw std::invalid_argument("MSSIM needs images of at least 11x11");
  }
  constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
  constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
  const auto mu_a = WindowMeans(a, b, [](double p, double) { return p; });
  const auto mu_b = WindowMeans(a, b, [](double, double q) { return q; });
  const auto aa = WindowMeans(a, b, [](double p, double) { return p * p; });
  const auto bb = WindowMeans(a, b, [](double, double q) { return q * q; });
  const auto ab = WindowMeans(a, b, [](double p, double q) { return p * q; });
  double sum = 0.0;
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = aa[i] - mu_a[i] * mu_a[i];
    const double var_b = bb[i] - mu_b[i] * mu_b[i];
    const double cov = ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) *
                       (var_a + var_b + kC2);
    sum += num / den;
  }
  return sum / static_cast<double>(mu_a.size());
}

ImageGray AddAwgn(const ImageGray& img, double sigma, uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("noise sigma must be nonnegative");
  }
  ImageGray out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (float& v : out.samples()) {
    v = static_cast<float>(v + noise(rng));
  }
  return out;
}

namespace {

double CatmullRom(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

// Sparse 1-D resampling operator: out[i] = sum_k weights[i][k] *
// in[first[i] + k] with reflected reads.
struct Resampler {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

Resampler DownsampleWeights(int out_n) {
  // Output i sits at input coordinate 2i + 0.5; kernel stretched by 2.
  Resampler r;
  for (int i = 0; i < out_n; ++i) {
    r.first.push_back(2 * i - 3);
    std::vector<double> w;
    double sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double d = (2 * i - 3 + k) - (2 * i + 0.5);
      w.push_back(CatmullRom(d / 2.0));
      sum += w.back();
    }
    for (double& v : w) v /= sum;
    r.weights.push_back(std::move(w));
  }
  return r;
}

Resampler UpsampleWeights(int out_n) {
  Resampler r;
  for (int i = 0; i < out_n; ++i) {
    const double s = (i + 0.5) / 2.0 - 0.5;
    const int base = static_cast<int>(std::floor(s));
    r.first.push_back(base - 1);
    std::vector<double> w;
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      w.push_back(CatmullRom(s - (base - 1 + k)));
      sum += w.back();
    }
    for (double& v : w) v /= sum;
    r.weights.push_back(std::move(w));
  }
  return r;
}

ImageGray Resample(const ImageGray& img, int out_w, int out_h,
                   const Resampler& rx, const Resampler& ry) {
  const int in_w = img.width();
  const int in_h = img.height();
  std::vector<double> horiz(static_cast<size_t>(out_w) * in_h);
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < in_h; ++y) {
    const float* row = img.row(y);
    for (int x = 0; x < out_w; ++x) {
      const auto& w = rx.weights[x];
      double s = 0.0;
      for (size_t k = 0; k < w.size(); ++k) {
        s += w[k] * row[ReflectIndex(rx.first[x] + static_cast<int>(k), in_w)];
      }
      horiz[static_cast<size_t>(y) * out_w + x] = s;
    }
  }
  ImageGray out(out_w, out_h);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < out_h; ++y) {
    const auto& w = ry.weights[y];
    float* dst = out.row(y);
    for (int x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (size_t k = 0; k < w.size(); ++k) {
        const int sy = ReflectIndex(ry.first[y] + static_cast<int>(k), in_h);
        s += w[k] * horiz[static_cast<size_t>(sy) * out_w + x];
      }
      dst[x] = static_cast<float>(s);
    }
  }
  return out;
}

}  // namespace

ImageGray Downsample2x(const ImageGray& img) {
  const int out_w = (img.width() + 1) / 2;
  const int out_h = (img.height() + 1) / 2;
  return Resample(img, out_w, out_h, DownsampleWeights(out_w),
                  DownsampleWeights(out_h));
}

ImageGray Upsample2x(const ImageGray& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("upsample target must be positive");
  }
  return Resample(img, width, height, UpsampleWeights(width),
                  UpsampleWeights(height));
}

BayerChannel BayerChannelAt(int x, int y) {
  const bool odd_x = x & 1;
  const bool odd_y = y & 1;
  if (!odd_x && !odd_y) return BayerChannel::kRed;
  if (odd_x && odd_y) return BayerChannel::kBlue;
  return BayerChannel::kGreen;
}

namespace {

void RequireEvenDims(int w, int h) {
  if (w % 2 != 0 || h % 2 != 0) {
    throw std::invalid_argument("Bayer mosaic needs even dimensions, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
}

}  // namespace

ImageGray BayerMosaic(const ImageRGB& img) {
  RequireEvenDims(img.width(), img.height());
  ImageGray out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = img[static_cast<int>(BayerChannelAt(x, y))].at(x, y);
    }
  }
  return out;
}

ImageRGB BilinearDemosaic(const ImageGray& m) {
  RequireEvenDims(m.width(), m.height());
  ImageRGB out(m.width(), m.height());
  auto cross = [&](int x, int y) {
    return 0.25f * (m.reflected(x - 1, y) + m.reflected(x + 1, y) +
                    m.reflected(x, y - 1) + m.reflected(x, y + 1));
  };
  auto diag = [&](int x, int y) {
    return 0.25f * (m.reflected(x - 1, y - 1) + m.reflected(x + 1, y - 1) +
                    m.reflected(x - 1, y + 1) + m.reflected(x + 1, y + 1));
  };
  auto horiz = [&](int x, int y) {
    return 0.5f * (m.reflected(x - 1, y) + m.reflected(x + 1, y));
  };
  auto vert = [&](int x, int y) {
    return 0.5f * (m.reflected(x, y - 1) + m.reflected(x, y + 1));
  };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      const float v = m.at(x, y);
      float r, g, b;
      switch (BayerChannelAt(x, y)) {
        case BayerChannel::kRed:
          r = v;
          g = cross(x, y);
          b = diag(x, y);
          break;
        case BayerChannel::kBlue:
          b = v;
          g = cross(x, y);
          r = diag(x, y);
          break;
        default:
          g = v;
          if (y % 2 == 0) {  // red row
            r = horiz(x, y);
            b = vert(x, y);
          } else {
            b = horiz(x, y);
            r = vert(x, y);
          }
      }
      out[0].at(x, y) = r;
      out[1].at(x, y) = g;
      out[2].at(x, y) = b;
    }
  }
  return out;
}

ImageGray Luma(const ImageRGB& img) {
  ImageGray out(img.width(), img.height());
  auto r = img[0].samples();
  auto g = img[1].samples();
  auto b = img[2].samples();
  auto dst = out.samples();
  for (size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  }
  return out;
}

ImageGray Rotate90(const ImageGray& img) {
  const int w = img.width();
  const int h = img.height();
  ImageGray out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(y, w - 1 - x) = img.at(x, y);
  }
  return out;
}

ImageGray FlipHorizontal(const ImageGray& img) {
  ImageGray out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const float* src = img.row(y);
    std::reverse_copy(src, src + img.width(), out.row(y));
  }
  return out;
}

ImageGray D4Transform(const ImageGray& img, int k) {
  if (k < 0 || k >= 8) throw std::invalid_argument("D4 index out of range");
  ImageGray out = k >= 4 ? FlipHorizontal(img) : img;
  for (int i = 0; i < k % 4; ++i) out = Rotate90(out);
  return out;
}

ImageGray Clamp(const ImageGray& img, float lo, float hi) {
  ImageGray out = img;
  for (float& v : out.samples()) v = std::clamp(v, lo, hi);
  return out;
}

}  // namespace blade
