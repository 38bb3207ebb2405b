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

// Command-line front end: train, apply, multiscale denoise, demosaic,
// evaluate, benchmark and render filter montages.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blade/filter_bank.h"
#include "blade/image_io.h"
#include "blade/pipelines.h"
#include "blade/training.h"

namespace {

using namespace blade;

struct TrainFlags {
  std::string task = "awgn";
  std::string manifest;
  std::string out;
  std::string report;
  int fp = 0;
  int orient = 0;
  std::string strength;
  std::string coherence;
  double rho = 0.0;
  double lambda = 2.0;
  double sigma = 20.0;
  std::string op_params;
  uint64_t seed = 1;
  bool no_augment = false;
  int levels = 3;
};

void AddModelFlags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--manifest", f.manifest, "Corpus manifest")->required();
  cmd->add_option("--out", f.out, "Output bank file")->required();
  cmd->add_option("--fp", f.fp, "Footprint side (odd)");
  cmd->add_option("--orient", f.orient, "Orientation bins");
  cmd->add_option("--strength", f.strength, "Strength bins COUNT:LO:HI");
  cmd->add_option("--coherence", f.coherence, "Coherence bins COUNT:LO:HI");
  cmd->add_option("--rho", f.rho, "Structure tensor smoothing");
  cmd->add_option("--lambda", f.lambda, "Filter gradient penalty")
      ->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "AWGN standard deviation")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Noise seed")->capture_default_str();
  cmd->add_flag("--no-augment", f.no_augment, "Disable D4 augmentation");
  cmd->add_option("--report", f.report, "Also write the training report here");
}

// Per-task quantizer and footprint defaults; flags override them.
PipelineConfig BuildConfig(const TrainFlags& f, Task task) {
  PipelineConfig c;
  c.task = task;
  QuantizerSpec& q = c.train.quantizer;
  int fp = 7;
  switch (task) {
    case Task::kBilateral:
      q.num_orientations = 24;
      q.num_strength = 3;
      q.strength_hi = 35.0f;
      q.num_coherence = 3;
      q.rho = 1.2f;
      break;
    case Task::kTvFlow:
      q.num_orientations = 16;
      q.num_strength = 4;
      q.num_coherence = 4;
      q.rho = 1.2f;
      break;
    case Task::kEtf:
      fp = 5;
      q.num_orientations = 24;
      q.num_strength = 1;
      q.num_coherence = 3;
      q.rho = 1.2f;
      break;
    case Task::kAwgn:
      q.rho = 1.7f;
      break;
    case Task::kPairs:
      q.num_orientations = 8;
      q.rho = 1.2f;
      break;
    case Task::kDemosaic:
      fp = 5;
      q.num_orientations = 8;
      q.num_strength = 3;
      q.num_coherence = 3;
      q.rho = 0.7f;
      break;
  }
  if (f.fp) fp = f.fp;
  if (f.orient) q.num_orientations = f.orient;
  if (!f.strength.empty()) {
    const BinRange r = ParseBinRange(f.strength);
    q.num_strength = r.count;
    q.strength_lo = r.lo;
    q.strength_hi = r.hi;
  }
  if (!f.coherence.empty()) {
    const BinRange r = ParseBinRange(f.coherence);
    q.num_coherence = r.count;
    q.coherence_lo = r.lo;
    q.coherence_hi = r.hi;
  }
  if (f.rho > 0.0) q.rho = static_cast<float>(f.rho);
  c.train.footprint_side = fp;
  c.train.lambda = f.lambda;
  c.train.augment = !f.no_augment;
  c.sigma = f.sigma;
  c.seed = f.seed;
  c.levels = f.levels;
  if (!f.op_params.empty()) ParseOpParams(f.op_params, c.op);
  c.Validate();
  return c;
}

void EmitReport(const FilterBank& bank, const std::string& path) {
  const std::string text = FormatTrainingReport(bank);
  std::cout << text;
  if (!path.empty()) {
    WriteFileBytes(path, std::span(reinterpret_cast<const uint8_t*>(text.data()),
                                   text.size()));
  }
}

std::vector<std::string> Split(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = s.find(',', start);
    const size_t end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BLADE edge-adaptive filtering toolkit"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train a filter bank");
  train_cmd->add_option("--task", train.task, "Training task")
      ->required()
      ->check(CLI::IsMember(
          {"bilateral", "tvflow", "etf", "awgn", "pairs", "demosaic"}));
  train_cmd->add_option("--op-params", train.op_params,
                        "Reference operator overrides key=value,...");
  AddModelFlags(train_cmd, train);

  std::string bank_path, in_path, out_path;
  double alpha = 1.0;
  auto* apply_cmd = app.add_subcommand("apply", "Filter an image with a bank");
  apply_cmd->add_option("--bank", bank_path)->required();
  apply_cmd->add_option("--in", in_path)->required();
  apply_cmd->add_option("--out", out_path)->required();
  apply_cmd->add_option("--alpha", alpha, "Blend with the identity")
      ->check(CLI::Range(0.0, 1.0));

  TrainFlags ms;
  auto* ms_train_cmd =
      app.add_subcommand("msdenoise-train", "Train the multiscale denoiser");
  ms_train_cmd->add_option("--levels", ms.levels, "Pyramid levels")
      ->capture_default_str();
  AddModelFlags(ms_train_cmd, ms);

  int ms_apply_levels = 0;
  auto* ms_apply_cmd =
      app.add_subcommand("msdenoise-apply", "Run the multiscale denoiser");
  ms_apply_cmd->add_option("--bank", bank_path)->required();
  ms_apply_cmd->add_option("--in", in_path)->required();
  ms_apply_cmd->add_option("--out", out_path)->required();
  ms_apply_cmd->add_option("--levels", ms_apply_levels,
                           "Must match the bundle when given");

  std::string ref_path, test_path;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR and MSSIM of two images");
  eval_cmd->add_option("--ref", ref_path)->required();
  eval_cmd->add_option("--test", test_path)->required();

  std::string fp_list = "5,7,9,11,13", mp_list = "0.25,1,4";
  int runs = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Filtering throughput");
  bench_cmd->add_option("--fp-list", fp_list)->capture_default_str();
  bench_cmd->add_option("--mp-list", mp_list)->capture_default_str();
  bench_cmd->add_option("--runs", runs)->capture_default_str();

  auto* demosaic_cmd =
      app.add_subcommand("demosaic", "Demosaic an RGGB mosaic with a color bank");
  demosaic_cmd->add_option("--bank", bank_path)->required();
  demosaic_cmd->add_option("--in", in_path)->required();
  demosaic_cmd->add_option("--out", out_path)->required();

  std::string mode = "coefficients";
  auto* montage_cmd = app.add_subcommand("montage", "Render a bank as tiles");
  montage_cmd->add_option("--bank", bank_path)->required();
  montage_cmd->add_option("--out", out_path)->required();
  montage_cmd->add_option("--mode", mode)
      ->check(CLI::IsMember({"coefficients", "stddev"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const PipelineConfig config = BuildConfig(train, ParseTask(train.task));
      const auto entries = ReadManifest(train.manifest);
      const auto corpus = LoadCorpus(config, entries);
      const FilterBank bank = Train(corpus, config.train);
      SaveBank(train.out, bank);
      EmitReport(bank, train.report);
    } else if (apply_cmd->parsed()) {
      const FilterBank bank = LoadBank(bank_path);
      WriteImage(out_path, ApplyBankToImage(bank, ReadImage(in_path), alpha));
    } else if (ms_train_cmd->parsed()) {
      const PipelineConfig config = BuildConfig(ms, Task::kAwgn);
      std::vector<ImageGray> clean;
      for (const auto& e : ReadManifest(ms.manifest)) {
        clean.push_back(ReadGray(e.target.empty() ? e.observed : e.target));
      }
      const MultiscaleBank bank = TrainMultiscale(clean, config);
      WriteFileBytes(ms.out, SerializeMultiscale(bank));
      for (size_t l = 0; l < bank.levels.size(); ++l) {
        std::cout << "# level " << l << " (coarsest first)\n";
        EmitReport(bank.levels[l], "");
      }
    } else if (ms_apply_cmd->parsed()) {
      const MultiscaleBank bank =
          DeserializeMultiscale(ReadFileBytes(bank_path));
      if (ms_apply_levels &&
          ms_apply_levels != static_cast<int>(bank.levels.size())) {
        throw std::invalid_argument(
            "--levels " + std::to_string(ms_apply_levels) +
            " does not match the bundle's " +
            std::to_string(bank.levels.size()) + " levels");
      }
      WriteImage(out_path, ApplyMultiscale(bank, ReadGray(in_path)));
    } else if (eval_cmd->parsed()) {
      std::cout << EvalReport(ReadImage(ref_path), ReadImage(test_path)) << "\n";
    } else if (bench_cmd->parsed()) {
      std::vector<int> sides;
      std::vector<double> mps;
      for (const auto& s : Split(fp_list)) sides.push_back(std::stoi(s));
      for (const auto& s : Split(mp_list)) mps.push_back(std::stod(s));
      std::cout << FormatBenchmark(RunBenchmark(sides, mps, runs));
    } else if (demosaic_cmd->parsed()) {
      const FilterBank bank = LoadBank(bank_path);
      const AnyImage mosaic = ReadImage(in_path);
      if (!std::holds_alternative<ImageGray>(mosaic)) {
        throw std::invalid_argument(in_path + " is not a single-channel mosaic");
      }
      WriteImage(out_path, DemosaicWithBank(bank, std::get<ImageGray>(mosaic)));
    } else if (montage_cmd->parsed()) {
      const FilterBank bank = LoadBank(bank_path);
      WriteImage(out_path,
                 RenderMontage(bank, mode == "stddev" ? MontageMode::kStddev
                                                      : MontageMode::kCoefficients));
    }
  } catch (const std::exception& e) {
    std::cerr << "blade: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
