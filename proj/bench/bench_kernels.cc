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

// Serial reference kernels against their OpenMP counterparts. Thread count
// follows BLADE_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "blade/inference.h"
#include "blade/quantizer.h"
#include "blade/serial.h"
#include "blade/training.h"

namespace blade {
namespace {

ImageGray Noise(int side, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> pixel(0.0f, 255.0f);
  ImageGray img(side, side);
  for (float& v : img.samples()) v = pixel(rng);
  return img;
}

FilterBank RandomBank(int fp_side) {
  FilterBank bank(QuantizerSpec{}, Footprint(fp_side));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> coef(-0.1f, 0.1f);
  for (float& v : bank.coefficients()) v = coef(rng);
  return bank;
}

// Arguments: image side, footprint side.
template <bool kSerial>
void BM_ApplySelected(benchmark::State& state) {
  const ImageGray img = Noise(static_cast<int>(state.range(0)), 1);
  const FilterBank bank = RandomBank(static_cast<int>(state.range(1)));
  const SelectionMap sel = ComputeSelection(img, bank.quantizer());
  for (auto _ : state) {
    ImageGray out = kSerial ? serial::ApplySelected(bank, std::span(&img, 1), sel)
                            : ApplySelected(bank, std::span(&img, 1), sel);
    benchmark::DoNotOptimize(out.samples().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}

template <bool kSerial>
void BM_Selection(benchmark::State& state) {
  const ImageGray img = Noise(static_cast<int>(state.range(0)), 2);
  const QuantizerSpec q;
  for (auto _ : state) {
    SelectionMap sel = kSerial ? serial::ComputeSelection(img, q) : ComputeSelection(img, q);
    benchmark::DoNotOptimize(sel.indices().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}

template <bool kSerial>
void BM_Accumulate(benchmark::State& state) {
  const ImageGray in = Noise(static_cast<int>(state.range(0)), 4);
  const ImageGray out = Noise(static_cast<int>(state.range(0)), 5);
  const QuantizerSpec q;
  const SelectionMap sel = ComputeSelection(in, q);
  const Footprint fp(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    GramAccumulator acc(q.num_filters(), fp.size());
    if (kSerial) {
      serial::Accumulate(acc, std::span(&in, 1), std::span(&out, 1), sel, fp);
    } else {
      Accumulate(acc, std::span(&in, 1), std::span(&out, 1), sel, fp);
    }
    benchmark::DoNotOptimize(acc.count(0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.size()));
}

BENCHMARK(BM_ApplySelected<true>)->Name("ApplySelected/serial")->Args({1024, 5})->Args({1024, 7});
BENCHMARK(BM_ApplySelected<false>)->Name("ApplySelected/omp")->Args({1024, 5})->Args({1024, 7});
BENCHMARK(BM_Selection<true>)->Name("Selection/serial")->Arg(1024);
BENCHMARK(BM_Selection<false>)->Name("Selection/omp")->Arg(1024);
BENCHMARK(BM_Accumulate<true>)->Name("Accumulate/serial")->Args({256, 7});
BENCHMARK(BM_Accumulate<false>)->Name("Accumulate/omp")->Args({256, 7});

}  // namespace
}  // namespace blade

BENCHMARK_MAIN();
