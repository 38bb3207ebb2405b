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

#ifndef BLADE_INFERENCE_H_
#define BLADE_INFERENCE_H_

#include <span>

#include "blade/filter_bank.h"
#include "blade/image.h"
#include "blade/quantizer.h"

namespace blade {

// out_i = sum_s sum_j h^{sel(i)}_{s,j} z^s_{i+j}, the filter of output bank
// `output` selected at each pixel, correlated (no flip) with the reflected
// input streams. Accumulates in double in row-major tap order; row-parallel
// and bit-identical to serial::ApplySelected.
ImageGray ApplySelected(const FilterBank& bank,
                        std::span<const ImageGray> streams,
                        const SelectionMap& selection, int output = 0);

// Single-stream gray bank; selection from the input itself.
ImageGray Apply(const FilterBank& bank, const ImageGray& img);

// Color bank: one luma selection, three output banks over the RGB patch.
ImageRGB ApplyColor(const FilterBank& bank, const ImageRGB& img);

// Gray bank applied to each channel with the selection of the luma.
ImageRGB ApplyPerChannel(const FilterBank& bank, const ImageRGB& img);

// Arity-2 bank over (current, upsampled coarser result); selection from
// the current level only.
ImageGray ApplyTwoStream(const FilterBank& bank, const ImageGray& current,
                         const ImageGray& coarse_upsampled);

}  // namespace blade

#endif  // BLADE_INFERENCE_H_
