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

#include "blade/inference.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "blade/parallel.h"

namespace blade {
namespace {

struct Padded {
  int width;
  std::vector<float> data;
};

Padded PadReflect(const ImageGray& img, int pad) {
  Padded p;
  p.width = img.width() + 2 * pad;
  const int h = img.height() + 2 * pad;
  p.data.resize(static_cast<size_t>(p.width) * h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(ReflectIndex(y - pad, img.height()));
    float* dst = p.data.data() + static_cast<size_t>(y) * p.width;
    for (int x = 0; x < pad; ++x) dst[x] = src[ReflectIndex(x - pad, img.width())];
    std::copy(src, src + img.width(), dst + pad);
    for (int x = pad + img.width(); x < p.width; ++x) {
      dst[x] = src[ReflectIndex(x - pad, img.width())];
    }
  }
  return p;
}

void RequireArity(const FilterBank& bank, int arity, int outputs,
                  const char* what) {
  if (bank.arity() != arity || bank.num_outputs() != outputs) {
    throw std::invalid_argument(
        std::string(what) + " needs a bank with arity " +
        std::to_string(arity) + " and " + std::to_string(outputs) +
        " output bank(s); got arity " + std::to_string(bank.arity()) +
        " with " + std::to_string(bank.num_outputs()));
  }
}

}  // namespace

ImageGray ApplySelected(const FilterBank& bank,
                        std::span<const ImageGray> streams,
                        const SelectionMap& selection, int output) {
  if (static_cast<int>(streams.size()) != bank.arity()) {
    throw std::invalid_argument("stream count does not match bank arity");
  }
  const int w = selection.width();
  const int h = selection.height();
  for (const auto& s : streams) {
    if (s.width() != w || s.height() != h) {
      throw std::invalid_argument("stream and selection map dimensions "
                                  "differ");
    }
  }
  const int n = bank.footprint().side();
  const int r = bank.footprint().radius();
  const int K = bank.num_filters();
  for (int32_t k : selection.indices()) {
    if (k < 0 || k >= K) {
      throw std::out_of_range("selection index " + std::to_string(k) +
                              " outside the filter bank");
    }
  }
  std::vector<Padded> padded;
  padded.reserve(streams.size());
  for (const auto& s : streams) padded.push_back(PadReflect(s, r));

  const float* coeffs = bank.filter(output, 0).data();
  const size_t D = static_cast<size_t>(bank.filter_length());
  ImageGray out(w, h);
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int y = 0; y < h; ++y) {
    float* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const int k = selection.at(x, y);
      const float* hk = coeffs + static_cast<size_t>(k) * D;
      double acc = 0.0;
      for (const auto& p : padded) {
        const float* win = p.data.data() + static_cast<size_t>(y) * p.width + x;
        for (int dy = 0; dy < n; ++dy) {
          const float* row = win + static_cast<size_t>(dy) * p.width;
          for (int dx = 0; dx < n; ++dx) {
            acc += static_cast<double>(*hk++) * static_cast<double>(row[dx]);
          }
        }
      }
      dst[x] = static_cast<float>(acc);
    }
  }
  return out;
}

ImageGray Apply(const FilterBank& bank, const ImageGray& img) {
  RequireArity(bank, 1, 1, "gray apply");
  const SelectionMap sel = ComputeSelection(img, bank.quantizer());
  return ApplySelected(bank, std::span<const ImageGray>(&img, 1), sel);
}

ImageRGB ApplyColor(const FilterBank& bank, const ImageRGB& img) {
  RequireArity(bank, 3, 3, "color apply");
  const SelectionMap sel = ComputeSelection(Luma(img), bank.quantizer());
  ImageRGB out;
  for (int c = 0; c < 3; ++c) {
    out.planes[c] = ApplySelected(bank, img.planes, sel, c);
  }
  return out;
}

ImageRGB ApplyPerChannel(const FilterBank& bank, const ImageRGB& img) {
  RequireArity(bank, 1, 1, "per-channel apply");
  const SelectionMap sel = ComputeSelection(Luma(img), bank.quantizer());
  ImageRGB out;
  for (int c = 0; c < 3; ++c) {
    out.planes[c] =
        ApplySelected(bank, std::span<const ImageGray>(&img.planes[c], 1), sel);
  }
  return out;
}

ImageGray ApplyTwoStream(const FilterBank& bank, const ImageGray& current,
                         const ImageGray& coarse_upsampled) {
  RequireArity(bank, 2, 1, "two-stream apply");
  if (current.width() != coarse_upsampled.width() ||
      current.height() != coarse_upsampled.height()) {
    throw std::invalid_argument("two-stream inputs differ in dimensions");
  }
  const SelectionMap sel = ComputeSelection(current, bank.quantizer());
  const ImageGray streams[2] = {current, coarse_upsampled};
  return ApplySelected(bank, streams, sel);
}

}  // namespace blade
