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

#ifndef BLADE_TESTS_SUPPORT_SCENES_H_
#define BLADE_TESTS_SUPPORT_SCENES_H_

#include <cstdint>
#include <vector>

#include "blade/image.h"

namespace blade::testing {

// Deterministic photograph stand-ins: a smoothly shaded background with
// antialiased ellipses and convex polygons at random orientations, some
// filled with gratings or fine texture. Values stay inside [0, 255].
ImageGray SyntheticScene(int width, int height, uint64_t seed);
ImageRGB SyntheticColorScene(int width, int height, uint64_t seed);

std::vector<ImageGray> SceneSet(int count, int side, uint64_t first_seed);
std::vector<ImageRGB> ColorSceneSet(int count, int side, uint64_t first_seed);

// Uniform i.i.d. samples in [lo, hi).
ImageGray RandomImage(int width, int height, uint64_t seed, float lo = 0.0f,
                      float hi = 255.0f);

// u(x, y) = c + ax * x + ay * y.
ImageGray AffineImage(int width, int height, double ax, double ay, double c);

}  // namespace blade::testing

#endif  // BLADE_TESTS_SUPPORT_SCENES_H_
