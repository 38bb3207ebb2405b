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

#ifndef BLADE_QUANTIZER_H_
#define BLADE_QUANTIZER_H_

#include <cstdint>
#include <vector>

#include "blade/image.h"
#include "blade/structure_tensor.h"

namespace blade {

// Bounded uniform quantization of structure tensor features. Ranges and
// rho are single precision so that they round-trip through the bank file.
struct QuantizerSpec {
  int num_orientations = 16;
  int num_strength = 5;
  float strength_lo = 10.0f;
  float strength_hi = 40.0f;
  int num_coherence = 3;
  float coherence_lo = 0.2f;
  float coherence_hi = 0.8f;
  float rho = 1.2f;

  int num_filters() const {
    return num_orientations * num_strength * num_coherence;
  }
  // Throws std::invalid_argument on empty ranges or zero counts.
  void Validate() const;

  bool operator==(const QuantizerSpec&) const = default;
};

struct Bins {
  int orientation = 0;
  int strength = 0;
  int coherence = 0;
};

Bins QuantizeBins(const Features& f, const QuantizerSpec& q);
// (strength * C + coherence) * O + orientation.
int FlatIndex(const Bins& bins, const QuantizerSpec& q);
Bins UnflattenIndex(int index, const QuantizerSpec& q);
int Quantize(const Features& f, const QuantizerSpec& q);

// Orientation bin as a real number before rounding; bin edges sit at
// half-integers. Exposed for tests that exclude near-edge pixels.
double OrientationCoordinate(double orientation, int num_orientations);

class SelectionMap {
 public:
  SelectionMap() = default;
  SelectionMap(int width, int height)
      : width_(width),
        height_(height),
        index_(static_cast<size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int32_t& at(int x, int y) {
    return index_[static_cast<size_t>(y) * width_ + x];
  }
  int32_t at(int x, int y) const {
    return index_[static_cast<size_t>(y) * width_ + x];
  }
  const std::vector<int32_t>& indices() const { return index_; }
  std::vector<int32_t>& indices() { return index_; }

  bool operator==(const SelectionMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<int32_t> index_;
};

// diagonal gradient -> smoothing with q.rho -> eigen features -> quantize.
SelectionMap ComputeSelection(const ImageGray& img, const QuantizerSpec& q);

// Per-pixel features, same pipeline without the final quantization.
std::vector<Features> ComputeFeatures(const ImageGray& img, double rho);

}  // namespace blade

#endif  // BLADE_QUANTIZER_H_
