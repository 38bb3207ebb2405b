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

#ifndef BLADE_SERIAL_H_
#define BLADE_SERIAL_H_

#include <cstdint>
#include <span>

#include "blade/filter_bank.h"
#include "blade/image.h"
#include "blade/quantizer.h"
#include "blade/structure_tensor.h"
#include "blade/training.h"

// Straightforward single-threaded versions of the parallel kernels. They
// read pixels through ExtractPatch and keep no scratch layouts, and exist
// to pin down the optimized paths in tests and benchmarks.
namespace blade::serial {

// Same tap order and double accumulation as blade::ApplySelected, so the
// results agree bit for bit.
ImageGray ApplySelected(const FilterBank& bank,
                        std::span<const ImageGray> streams,
                        const SelectionMap& selection, int output = 0);

// One rank-1 update per pixel. `order` optionally permutes the raster
// scan (a permutation of [0, width*height)).
void Accumulate(GramAccumulator& acc, std::span<const ImageGray> inputs,
                std::span<const ImageGray> targets,
                const SelectionMap& selection, const Footprint& fp,
                std::span<const uint32_t> order = {});

// Direct 2-D (non-separable) smoothing of the outer products.
TensorField SmoothTensor(const GradientField& grad, double rho);

SelectionMap ComputeSelection(const ImageGray& img, const QuantizerSpec& q);

}  // namespace blade::serial

#endif  // BLADE_SERIAL_H_
