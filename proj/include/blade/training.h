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

#ifndef BLADE_TRAINING_H_
#define BLADE_TRAINING_H_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "blade/filter_bank.h"
#include "blade/image.h"
#include "blade/quantizer.h"

namespace blade {

// Quadratic filter penalty h^T Q h.
struct Regularizer {
  double lambda = 0.0;
  Eigen::MatrixXd q;
};

// h^T Q h = lambda * sum over unordered 4-neighbor tap pairs of
// (h_i - h_j)^2, block diagonal over input streams.
Regularizer BuildGradientQ(const Footprint& fp, int arity, double lambda);

// Streaming normal equations. Each bucket holds the (D+T) x (D+T) Gram
// matrix of rows [patch (D values), targets (T values)] and a sample count.
// Only the lower triangle is stored.
class GramAccumulator {
 public:
  GramAccumulator(int num_buckets, int dim, int num_targets = 1);

  int num_buckets() const { return static_cast<int>(counts_.size()); }
  int dim() const { return dim_; }
  int num_targets() const { return num_targets_; }
  int width() const { return dim_ + num_targets_; }

  uint64_t count(int k) const { return counts_[k]; }
  uint64_t total_count() const;

  // Full symmetric Gram matrix of bucket k.
  Eigen::MatrixXd gram(int k) const;
  Eigen::MatrixXd AtA(int k) const;
  Eigen::VectorXd Atb(int k, int target = 0) const;
  double btb(int k, int target = 0) const;

  // One regression row: `row` has width() entries (patch then targets).
  void AddSample(int k, std::span<const double> row);
  // `columns` is width() x n; each column is one regression row.
  void AddColumns(int k, const Eigen::Ref<const Eigen::MatrixXd>& columns);

  // G += other.G, M += other.M per bucket.
  void Merge(const GramAccumulator& other);

  // Lower-triangle storage, exposed for exact comparisons.
  const Eigen::MatrixXd& lower(int k) const { return lower_[k]; }

 private:
  int dim_;
  int num_targets_;
  std::vector<Eigen::MatrixXd> lower_;
  std::vector<uint64_t> counts_;
};

// Input streams and targets of one training example. Gray: 1 input and 1
// target. Two-stream: 2 inputs, 1 target. Color: 3 inputs (R, G, B) and 3
// targets. Filter selection runs on `selection`, or when that is empty, on
// inputs[0] (gray, two-stream) or the luma of the inputs (color).
struct TrainingExample {
  std::vector<ImageGray> inputs;
  std::vector<ImageGray> targets;
  ImageGray selection;
};

const ImageGray& SelectionSource(const TrainingExample& ex, ImageGray& scratch);

// Adds one regression row per pixel to bucket selection(i). Rows are
// gathered per bucket in pixel order and folded in with blocked rank
// updates; buckets are processed in parallel.
void Accumulate(GramAccumulator& acc, std::span<const ImageGray> inputs,
                std::span<const ImageGray> targets,
                const SelectionMap& selection, const Footprint& fp);

// The 8 flips/rotations of an example, applied identically to every image.
std::array<TrainingExample, 8> AugmentD4(const TrainingExample& ex);
std::array<std::pair<ImageGray, ImageGray>, 8> AugmentD4(
    const ImageGray& observed, const ImageGray& target);

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BucketSolution {
  std::vector<double> filter;
  double residual_variance = 0.0;  // NaN when M <= D or after fallback
  std::vector<double> stddev;
  uint64_t count = 0;
  bool fallback = false;  // near-singular system, filter set to delta
};

// h = (Q + A^T A)^{-1} A^T b via Cholesky, plus residual variance and
// coefficient standard deviations. Throws SingularSystemError for an empty
// bucket without regularization. Systems with reciprocal condition
// estimate below 1e-12 fall back to the center delta.
BucketSolution SolveBucket(const GramAccumulator& acc, int k,
                           const Regularizer& reg, const Footprint& fp,
                           int target = 0, int delta_stream = 0);

struct TrainOptions {
  QuantizerSpec quantizer;
  int footprint_side = 7;
  double lambda = 2.0;
  bool augment = true;
};

// Accumulates every example (and its D4 transforms when enabled).
GramAccumulator AccumulateCorpus(std::span<const TrainingExample> corpus,
                                 const TrainOptions& options);
// Solves all buckets of all outputs. Empty unregularized buckets become
// the center delta instead of raising.
FilterBank SolveBank(const GramAccumulator& acc, const TrainOptions& options,
                     int arity);
FilterBank Train(std::span<const TrainingExample> corpus,
                 const TrainOptions& options);

// Per-bucket count, residual variance and flags as text.
std::string FormatTrainingReport(const FilterBank& bank);

}  // namespace blade

#endif  // BLADE_TRAINING_H_
