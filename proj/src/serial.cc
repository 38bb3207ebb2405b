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

#include "blade/serial.h"

#include <stdexcept>
#include <vector>

namespace blade::serial {

ImageGray ApplySelected(const FilterBank& bank,
                        std::span<const ImageGray> streams,
                        const SelectionMap& selection, int output) {
  if (static_cast<int>(streams.size()) != bank.arity()) {
    throw std::invalid_argument("stream count does not match bank arity");
  }
  const Footprint& fp = bank.footprint();
  const int N = fp.size();
  ImageGray out(selection.width(), selection.height());
  std::vector<float> patch(N);
  for (int y = 0; y < selection.height(); ++y) {
    for (int x = 0; x < selection.width(); ++x) {
      auto h = bank.filter(output, selection.at(x, y));
      double acc = 0.0;
      for (size_t s = 0; s < streams.size(); ++s) {
        ExtractPatch(streams[s], {x, y}, fp, patch);
        for (int j = 0; j < N; ++j) {
          acc += static_cast<double>(h[s * N + j]) *
                 static_cast<double>(patch[j]);
        }
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

void Accumulate(GramAccumulator& acc, std::span<const ImageGray> inputs,
                std::span<const ImageGray> targets,
                const SelectionMap& selection, const Footprint& fp,
                std::span<const uint32_t> order) {
  const int w = selection.width();
  const size_t n = static_cast<size_t>(w) * selection.height();
  if (!order.empty() && order.size() != n) {
    throw std::invalid_argument("order must cover every pixel");
  }
  const int N = fp.size();
  std::vector<float> patch(N);
  std::vector<double> row(acc.width());
  for (size_t p = 0; p < n; ++p) {
    const size_t i = order.empty() ? p : order[p];
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    size_t j = 0;
    for (const auto& im : inputs) {
      ExtractPatch(im, {x, y}, fp, patch);
      for (float v : patch) row[j++] = v;
    }
    for (const auto& t : targets) row[j++] = t.at(x, y);
    acc.AddSample(selection.at(x, y), row);
  }
}

TensorField SmoothTensor(const GradientField& grad, double rho) {
  const std::vector<double> taps = HalfSampleGaussian(rho);
  const int len = static_cast<int>(taps.size());
  const int half = len / 2;
  TensorField out;
  out.width = grad.width + 1;
  out.height = grad.height + 1;
  const size_t n = static_cast<size_t>(out.width) * out.height;
  out.a.assign(n, 0.0);
  out.b.assign(n, 0.0);
  out.c.assign(n, 0.0);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double sa = 0.0, sb = 0.0, sc = 0.0;
      for (int ty = 0; ty < len; ++ty) {
        const int gy = ReflectIndex(y + ty - half, grad.height);
        for (int tx = 0; tx < len; ++tx) {
          const int gx = ReflectIndex(x + tx - half, grad.width);
          const size_t g = static_cast<size_t>(gy) * grad.width + gx;
          const double wgt = taps[tx] * taps[ty];
          sa += wgt * grad.g1[g] * grad.g1[g];
          sb += wgt * grad.g1[g] * grad.g2[g];
          sc += wgt * grad.g2[g] * grad.g2[g];
        }
      }
      const size_t o = out.index(x, y);
      out.a[o] = sa;
      out.b[o] = sb;
      out.c[o] = sc;
    }
  }
  return out;
}

SelectionMap ComputeSelection(const ImageGray& img, const QuantizerSpec& q) {
  q.Validate();
  const TensorField t = serial::SmoothTensor(DiagonalGradient(img), q.rho);
  SelectionMap map(t.width, t.height);
  for (int y = 0; y < t.height; ++y) {
    for (int x = 0; x < t.width; ++x) {
      const size_t i = t.index(x, y);
      map.at(x, y) = Quantize(EigenFeatures(t.a[i], t.b[i], t.c[i]), q);
    }
  }
  return map;
}

}  // namespace blade::serial
