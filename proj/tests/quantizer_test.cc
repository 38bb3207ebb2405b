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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blade/serial.h"
#include "support/scenes.h"

namespace blade {
namespace {

constexpr double kPi = std::numbers::pi;

QuantizerSpec StandardSpec() {
  QuantizerSpec q;
  q.num_orientations = 16;
  q.num_strength = 5;
  q.strength_lo = 10;
  q.strength_hi = 40;
  q.num_coherence = 3;
  q.coherence_lo = 0.2f;
  q.coherence_hi = 0.8f;
  return q;
}

Features F(double orientation, double strength, double coherence) {
  Features f;
  f.orientation = orientation;
  f.strength = strength;
  f.coherence = coherence;
  return f;
}

TEST(QuantizerSpec, ValidatesRangesAndCounts) {
  QuantizerSpec q = StandardSpec();
  EXPECT_NO_THROW(q.Validate());
  EXPECT_EQ(q.num_filters(), 240);
  q.num_strength = 0;
  EXPECT_THROW(q.Validate(), std::invalid_argument);
  q = StandardSpec();
  q.coherence_hi = q.coherence_lo;
  EXPECT_THROW(q.Validate(), std::invalid_argument);
  q = StandardSpec();
  q.strength_lo = 50;
  EXPECT_THROW(q.Validate(), std::invalid_argument);
}

TEST(Quantize, LowerCornerIsIndexZero) {
  const Bins b = QuantizeBins(F(0.0, 10.0, 0.2), StandardSpec());
  EXPECT_EQ(b.orientation, 0);
  EXPECT_EQ(b.strength, 0);
  EXPECT_EQ(b.coherence, 0);
  EXPECT_EQ(Quantize(F(0.0, 10.0, 0.2), StandardSpec()), 0);
}

TEST(Quantize, UniformStrengthBins) {
  EXPECT_EQ(QuantizeBins(F(0.0, 25.0, 0.5), StandardSpec()).strength, 2);
}

TEST(Quantize, ClampsIntoTopBins) {
  EXPECT_EQ(QuantizeBins(F(0.0, 20.0, 0.95), StandardSpec()).coherence, 2);
  EXPECT_EQ(QuantizeBins(F(0.0, 1000.0, 0.5), StandardSpec()).strength, 4);
  EXPECT_EQ(QuantizeBins(F(0.0, 40.0, 0.8), StandardSpec()).strength, 4);
  EXPECT_EQ(QuantizeBins(F(0.0, 40.0, 0.8), StandardSpec()).coherence, 2);
  EXPECT_EQ(QuantizeBins(F(0.0, 0.0, 0.0), StandardSpec()).strength, 0);
}

TEST(Quantize, HorizontalAndVerticalAreBinCenters) {
  const QuantizerSpec q = StandardSpec();
  EXPECT_EQ(QuantizeBins(F(0.0, 20, 0.5), q).orientation, 0);
  EXPECT_EQ(QuantizeBins(F(kPi / 2, 20, 0.5), q).orientation, 8);
  EXPECT_DOUBLE_EQ(OrientationCoordinate(kPi / 2, 16), 8.0);
  // Just below pi wraps onto bin 0.
  EXPECT_EQ(QuantizeBins(F(-1e-9, 20, 0.5), q).orientation, 0);
  // Half a bin width either side of 0 stays in bin 0 or moves to bin 1.
  const double half = kPi / 32;
  EXPECT_EQ(QuantizeBins(F(0.999 * half, 20, 0.5), q).orientation, 0);
  EXPECT_EQ(QuantizeBins(F(1.001 * half, 20, 0.5), q).orientation, 1);
  EXPECT_EQ(QuantizeBins(F(-1.001 * half, 20, 0.5), q).orientation, 15);
}

TEST(Quantize, FlatLayoutRoundTrips) {
  const QuantizerSpec q = StandardSpec();
  for (int k = 0; k < q.num_filters(); ++k) {
    const Bins b = UnflattenIndex(k, q);
    EXPECT_EQ(FlatIndex(b, q), k);
    EXPECT_EQ(k, (b.strength * 3 + b.coherence) * 16 + b.orientation);
  }
}

TEST(Quantize, TotalOverRandomFeatures) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(-3 * kPi, 3 * kPi), s(0, 200), c(0, 1);
  for (const QuantizerSpec& q :
       {StandardSpec(), QuantizerSpec{1, 1, 0, 1, 1, 0, 1, 1}, QuantizerSpec{24, 3, 10, 35, 3, 0.2f, 0.8f, 1.2f}}) {
    for (int n = 0; n < 20000; ++n) {
      const int k = Quantize(F(th(rng), s(rng), c(rng)), q);
      ASSERT_GE(k, 0);
      ASSERT_LT(k, q.num_filters());
    }
    for (double t : {-kPi / 2, kPi / 2, -kPi, kPi, 0.0, -0.0, 2 * kPi - 1e-15}) {
      const int k = Quantize(F(t, 0, 1), q);
      ASSERT_GE(k, 0);
      ASSERT_LT(k, q.num_filters());
    }
  }
}

TEST(Quantize, OrientationIsPiPeriodic) {
  const QuantizerSpec q = StandardSpec();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> th(-kPi / 2, kPi / 2);
  for (int n = 0; n < 5000; ++n) {
    const double t = th(rng);
    const double coord = OrientationCoordinate(t, q.num_orientations);
    // Skip angles whose shifted copy rounds across a bin edge.
    if (std::abs(coord - std::floor(coord) - 0.5) < 1e-9) continue;
    const int b = QuantizeBins(F(t, 20, 0.5), q).orientation;
    EXPECT_EQ(QuantizeBins(F(t + kPi, 20, 0.5), q).orientation, b) << t;
    EXPECT_EQ(QuantizeBins(F(t - kPi, 20, 0.5), q).orientation, b) << t;
  }
}

TEST(Quantize, StrengthBinIsMonotone) {
  const QuantizerSpec q = StandardSpec();
  int prev = -1;
  for (double s = 0; s < 60; s += 0.01) {
    const int b = QuantizeBins(F(0.3, s, 0.5), q).strength;
    ASSERT_GE(b, prev);
    prev = b;
  }
  EXPECT_EQ(prev, 4);
}

TEST(Quantize, InteriorEdgesBelongToTheBinAbove) {
  const QuantizerSpec q = StandardSpec();
  EXPECT_EQ(QuantizeBins(F(0, 16.0, 0.5), q).strength, 1);
  EXPECT_EQ(QuantizeBins(F(0, 15.999999, 0.5), q).strength, 0);
  // Exactly half-way between two orientation centers goes to the lower one.
  EXPECT_EQ(QuantizeBins(F(kPi / 4, 20, 0.5), QuantizerSpec{2, 1, 0, 1, 1, 0, 1, 1}).orientation,
            0);
}

TEST(SelectionMap, ConstantImageSelectsIndexZero) {
  const SelectionMap s = ComputeSelection(ImageGray(20, 15, 77.0f), StandardSpec());
  for (int32_t k : s.indices()) EXPECT_EQ(k, 0);
}

TEST(SelectionMap, IndicesStayInRange) {
  const QuantizerSpec q = StandardSpec();
  const SelectionMap s = ComputeSelection(testing::SyntheticScene(64, 48, 3), q);
  EXPECT_EQ(s.width(), 64);
  EXPECT_EQ(s.height(), 48);
  for (int32_t k : s.indices()) {
    ASSERT_GE(k, 0);
    ASSERT_LT(k, q.num_filters());
  }
}

TEST(SelectionMap, MatchesFeaturePipelineAndSerialPath) {
  const QuantizerSpec q = StandardSpec();
  const ImageGray img = testing::SyntheticScene(57, 43, 4);
  const SelectionMap s = ComputeSelection(img, q);
  const auto features = ComputeFeatures(img, q.rho);
  for (size_t i = 0; i < features.size(); ++i) {
    ASSERT_EQ(s.indices()[i], Quantize(features[i], q));
  }
  // The serial path smooths in 2-D directly; sums associate differently so
  // a feature sitting on a bin edge may fall either way.
  const SelectionMap r = serial::ComputeSelection(img, q);
  int differ = 0;
  for (size_t i = 0; i < features.size(); ++i) differ += s.indices()[i] != r.indices()[i];
  EXPECT_LE(differ, 2);
}

// Bins may disagree only where a feature sits within 1e-6 of a bin edge.
bool NearEdge(double coord) {
  return std::abs(coord - std::round(coord)) < 1e-6;
}

TEST(SelectionMap, VerticalEdgeRotatesByHalfTheOrientations) {
  const QuantizerSpec q = StandardSpec();
  ImageGray img(48, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) img.at(x, y) = x < 24 ? 40.0f : 200.0f;
  }
  const SelectionMap s = ComputeSelection(img, q);
  const SelectionMap r = ComputeSelection(Rotate90(img), q);
  const int bin = UnflattenIndex(s.at(23, 24), q).orientation;
  EXPECT_EQ(bin, 0);
  for (int y = 8; y < 40; ++y) {
    for (int x = 22; x <= 25; ++x) {
      const Bins b = UnflattenIndex(s.at(x, y), q);
      const Bins br = UnflattenIndex(r.at(y, 47 - x), q);
      EXPECT_EQ(b.orientation, bin);
      EXPECT_EQ(br.orientation, (bin + q.num_orientations / 2) % q.num_orientations);
      EXPECT_EQ(br.strength, b.strength);
      EXPECT_EQ(br.coherence, b.coherence);
    }
  }
}

TEST(SelectionMap, QuarterTurnShiftsOrientationBinsOnScenes) {
  const QuantizerSpec q = StandardSpec();
  const int w = 80, h = 64;
  const int margin = static_cast<int>(std::ceil(3 * q.rho)) + 2;
  for (uint64_t seed = 30; seed < 33; ++seed) {
    const ImageGray img = testing::SyntheticScene(w, h, seed);
    const SelectionMap s = ComputeSelection(img, q);
    const SelectionMap r = ComputeSelection(Rotate90(img), q);
    const auto f = ComputeFeatures(img, q.rho);
    for (int y = margin; y < h - margin; ++y) {
      for (int x = margin; x < w - margin; ++x) {
        const Features& ft = f[static_cast<size_t>(y) * w + x];
        const double oc = OrientationCoordinate(ft.orientation, q.num_orientations) - 0.5;
        const double sc = (ft.strength - q.strength_lo) /
                          (q.strength_hi - q.strength_lo) * q.num_strength;
        const double cc = (ft.coherence - q.coherence_lo) /
                          (q.coherence_hi - q.coherence_lo) * q.num_coherence;
        if (NearEdge(oc) || NearEdge(sc) || NearEdge(cc)) continue;
        // Isotropic tensors have no defined orientation.
        if (ft.coherence < 1e-6) continue;
        const Bins a = UnflattenIndex(s.at(x, y), q);
        const Bins b = UnflattenIndex(r.at(y, w - 1 - x), q);
        ASSERT_EQ(b.orientation, (a.orientation + q.num_orientations / 2) % q.num_orientations)
            << seed << " " << x << " " << y;
        ASSERT_EQ(b.strength, a.strength);
        ASSERT_EQ(b.coherence, a.coherence);
      }
    }
  }
}

TEST(SelectionMap, MirrorReflectsOrientationBins) {
  const QuantizerSpec q = StandardSpec();
  const int w = 64, h = 50;
  const ImageGray img = testing::SyntheticScene(w, h, 40);
  const SelectionMap s = ComputeSelection(img, q);
  const SelectionMap m = ComputeSelection(FlipHorizontal(img), q);
  const auto f = ComputeFeatures(img, q.rho);
  const int margin = 8;
  int checked = 0;
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const Features& ft = f[static_cast<size_t>(y) * w + x];
      if (NearEdge(OrientationCoordinate(ft.orientation, 16) - 0.5) || ft.coherence < 1e-6) {
        continue;
      }
      const Bins a = UnflattenIndex(s.at(x, y), q);
      const Bins b = UnflattenIndex(m.at(w - 1 - x, y), q);
      ASSERT_EQ(b.orientation, (16 - a.orientation) % 16);
      ++checked;
    }
  }
  EXPECT_GT(checked, 500);
}

}  // namespace
}  // namespace blade
