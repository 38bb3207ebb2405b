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

#include "blade/quantizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>


namespace blade {

void QuantizerSpec::Validate() const {
  if (num_orientations < 1 || num_strength < 1 || num_coherence < 1) {
    throw std::invalid_argument("quantizer bin counts must be >= 1");
  }
  if (!(strength_lo < strength_hi)) {
    throw std::invalid_argument("strength range must satisfy lo < hi");
  }
  if (!(coherence_lo < coherence_hi)) {
    throw std::invalid_argument("coherence range must satisfy lo < hi");
  }
  if (!(rho > 0.0f)) throw std::invalid_argument("rho must be positive");
}

namespace {

// Uniform bins over [lo, hi]; values outside are clamped, hi goes to the
// top bin, interior edges land in the upper bin via floor.
int UniformBin(double v, double lo, double hi, int count) {
  v = std::clamp(v, lo, hi);
  // Nonnegative, so truncation is floor.
  const int bin = static_cast<int>((v - lo) / (hi - lo) * count);
  return std::min(bin, count - 1);
}

}  // namespace

double OrientationCoordinate(double orientation, int num_orientations) {
  // Fold onto [0, pi); the common range (-pi, 2 pi) avoids fmod.
  double theta = orientation;
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  if (!(theta >= 0.0 && theta < std::numbers::pi)) {
    theta = std::fmod(theta, std::numbers::pi);
    if (theta < 0.0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta = 0.0;
  }
  return theta * num_orientations / std::numbers::pi;
}

Bins QuantizeBins(const Features& f, const QuantizerSpec& q) {
  Bins bins;
  // Nearest bin center, so 0 and pi/2 are centers; exact half-way values
  // go to the lower bin.
  const double u = OrientationCoordinate(f.orientation, q.num_orientations);
  // ceil(u - 1/2) for u in [0, O]; the argument is > -1, where
  // truncate-then-bump equals ceil.
  const double v = u - 0.5;
  int o = static_cast<int>(v);
  if (o < v) ++o;
  if (o >= q.num_orientations) o -= q.num_orientations;
  bins.orientation = o;
  bins.strength =
      UniformBin(f.strength, q.strength_lo, q.strength_hi, q.num_strength);
  bins.coherence = UniformBin(f.coherence, q.coherence_lo, q.coherence_hi,
                              q.num_coherence);
  return bins;
}

int FlatIndex(const Bins& bins, const QuantizerSpec& q) {
  return (bins.strength * q.num_coherence + bins.coherence) *
             q.num_orientations +
         bins.orientation;
}

Bins UnflattenIndex(int index, const QuantizerSpec& q) {
  Bins bins;
  bins.orientation = index % q.num_orientations;
  index /= q.num_orientations;
  bins.coherence = index % q.num_coherence;
  bins.strength = index / q.num_coherence;
  return bins;
}

int Quantize(const Features& f, const QuantizerSpec& q) {
  return FlatIndex(QuantizeBins(f, q), q);
}

SelectionMap ComputeSelection(const ImageGray& img, const QuantizerSpec& q) {
  q.Validate();
  SelectionMap map(img.width(), img.height());
  ForEachTensorRow(img, q.rho, [&](int y, const double* a, const double* b,
                                   const double* c) {
    for (int x = 0; x < map.width(); ++x) {
      map.at(x, y) = Quantize(EigenFeatures(a[x], b[x], c[x]), q);
    }
  });
  return map;
}

std::vector<Features> ComputeFeatures(const ImageGray& img, double rho) {
  std::vector<Features> out(img.size());
  ForEachTensorRow(img, rho, [&](int y, const double* a, const double* b,
                                 const double* c) {
    Features* row = out.data() + static_cast<size_t>(y) * img.width();
    for (int x = 0; x < img.width(); ++x) row[x] = EigenFeatures(a[x], b[x], c[x]);
  });
  return out;
}

}  // namespace blade
