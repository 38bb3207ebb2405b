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

#ifndef BLADE_PIPELINES_H_
#define BLADE_PIPELINES_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blade/filter_bank.h"
#include "blade/image.h"
#include "blade/image_io.h"
#include "blade/reference_ops.h"
#include "blade/training.h"

namespace blade {

enum class Task { kBilateral, kTvFlow, kEtf, kAwgn, kPairs, kDemosaic };

Task ParseTask(const std::string& name);
std::string TaskName(Task task);

// One manifest line. Synthetic tasks may leave `target` empty, in which
// case `observed` names the single source image.
struct ManifestEntry {
  std::filesystem::path observed;
  std::filesystem::path target;
};

// "observed<TAB>target" per line; blank lines and '#' comments skipped.
// Relative paths resolve against the manifest directory.
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);

struct PipelineConfig {
  Task task = Task::kAwgn;
  TrainOptions train;
  FlowParams op;        // reference operator parameters
  double sigma = 20.0;  // AWGN noise level
  uint64_t seed = 1;
  int levels = 3;       // multiscale pyramid depth

  // Throws std::invalid_argument before any compute.
  void Validate() const;
};

// Applies "key=value,key=value" overrides to op parameters (dt, steps,
// epsilon, rho, half_length, sigma_r, sigma_s).
void ParseOpParams(const std::string& text, FlowParams& params);

// Parses "COUNT:LO:HI".
struct BinRange {
  int count;
  float lo;
  float hi;
};
BinRange ParseBinRange(const std::string& text);

// The reference operator of an operator-approximation task.
ImageGray ApplyReferenceOp(Task task, const ImageGray& img,
                           const FlowParams& params);

// Builds the regression example of one source image (or pair) for the
// task. `index` perturbs the noise seed per image.
TrainingExample MakeExample(const PipelineConfig& config,
                            const ImageGray& observed, const ImageGray& target,
                            size_t index);
TrainingExample MakeDemosaicExample(const ImageRGB& clean);

// Reads every manifest entry and forms the task's training corpus.
std::vector<TrainingExample> LoadCorpus(const PipelineConfig& config,
                                        std::span<const ManifestEntry> entries);

// Gray banks filter gray images and, channel by channel under a shared
// luma selection, color images. Color banks need color images. alpha < 1
// blends with the identity first (gray banks only).
AnyImage ApplyBankToImage(const FilterBank& bank, const AnyImage& img,
                          double alpha = 1.0);

// Bilinear demosaic followed by the color bank.
ImageRGB DemosaicWithBank(const FilterBank& bank, const ImageGray& mosaic);

// Coarsest level first.
struct MultiscaleBank {
  std::vector<FilterBank> levels;
};

// Trains the coarse-to-fine cascade on AWGN realizations of `clean`. The
// coarsest level is an arity-1 bank; every finer level is an arity-2 bank
// over (noisy level, upsampled denoised coarser level). The level count may
// not exceed MaxPyramidLevels of any image.
MultiscaleBank TrainMultiscale(std::span<const ImageGray> clean,
                               const PipelineConfig& config);
ImageGray ApplyMultiscale(const MultiscaleBank& bank, const ImageGray& noisy);
// floor(log2(min(width, height))): the coarsest level keeps >= 2 pixels.
int MaxPyramidLevels(int width, int height);

std::vector<uint8_t> SerializeMultiscale(const MultiscaleBank& bank);
MultiscaleBank DeserializeMultiscale(std::span<const uint8_t> bytes);

// "PSNR_dB=%.4f MSSIM=%.4f"; PSNR prints as inf for identical images.
// Color images report the channel-pooled PSNR and channel-averaged MSSIM.
std::string EvalReport(const AnyImage& ref, const AnyImage& test);

struct BenchRow {
  int footprint_side;
  std::vector<double> megapixels;
  std::vector<double> seconds;  // median of the timed runs
  std::vector<double> mp_per_s;
  double linearity = 0.0;       // median over rounds of t(4 MP) / t(1 MP);
                                // 0 when either size is missing
  double cost_ratio = 0.0;      // median over rounds of this row's time over
                                // the previous row's, all sizes summed; 0 for
                                // the first row
};

// Times selection plus filtering of synthetic noise images with a random
// 16x5x3 bank. One warm-up round, then `runs` timed rounds that each visit
// every (footprint, size) pair; reports the median per pair.
std::vector<BenchRow> RunBenchmark(std::span<const int> footprint_sides,
                                   std::span<const double> megapixels,
                                   int runs = 5, uint64_t seed = 7);
std::string FormatBenchmark(const std::vector<BenchRow>& rows);

}  // namespace blade

#endif  // BLADE_PIPELINES_H_
