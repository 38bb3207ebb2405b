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

#include "blade/training.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "blade/parallel.h"

namespace blade {

Regularizer BuildGradientQ(const Footprint& fp, int arity, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (arity < 1) throw std::invalid_argument("arity must be >= 1");
  const int n = fp.side();
  const int N = fp.size();
  Regularizer reg;
  reg.lambda = lambda;
  reg.q = Eigen::MatrixXd::Zero(arity * N, arity * N);
  auto add_pair = [&](int i, int j) {
    reg.q(i, i) += lambda;
    reg.q(j, j) += lambda;
    reg.q(i, j) -= lambda;
    reg.q(j, i) -= lambda;
  };
  for (int s = 0; s < arity; ++s) {
    const int base = s * N;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const int i = base + y * n + x;
        if (x + 1 < n) add_pair(i, i + 1);
        if (y + 1 < n) add_pair(i, i + n);
      }
    }
  }
  return reg;
}

GramAccumulator::GramAccumulator(int num_buckets, int dim, int num_targets)
    : dim_(dim), num_targets_(num_targets) {
  if (num_buckets < 1 || dim < 1 || num_targets < 1) {
    throw std::invalid_argument("accumulator sizes must be positive");
  }
  lower_.assign(num_buckets, Eigen::MatrixXd::Zero(width(), width()));
  counts_.assign(num_buckets, 0);
}

uint64_t GramAccumulator::total_count() const {
  uint64_t total = 0;
  for (uint64_t c : counts_) total += c;
  return total;
}

Eigen::MatrixXd GramAccumulator::gram(int k) const {
  return lower_[k].selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd GramAccumulator::AtA(int k) const {
  return gram(k).topLeftCorner(dim_, dim_);
}

Eigen::VectorXd GramAccumulator::Atb(int k, int target) const {
  return lower_[k].block(dim_ + target, 0, 1, dim_).transpose();
}

double GramAccumulator::btb(int k, int target) const {
  return lower_[k](dim_ + target, dim_ + target);
}

void GramAccumulator::AddSample(int k, std::span<const double> row) {
  if (row.size() != static_cast<size_t>(width())) {
    throw std::invalid_argument("regression row has wrong width");
  }
  Eigen::MatrixXd& g = lower_[k];
  for (int i = 0; i < width(); ++i) {
    for (int j = 0; j <= i; ++j) g(i, j) += row[i] * row[j];
  }
  ++counts_[k];
}

void GramAccumulator::AddColumns(
    int k, const Eigen::Ref<const Eigen::MatrixXd>& columns) {
  if (columns.rows() != width()) {
    throw std::invalid_argument("regression block has wrong height");
  }
  lower_[k].selfadjointView<Eigen::Lower>().rankUpdate(columns);
  counts_[k] += static_cast<uint64_t>(columns.cols());
}

void GramAccumulator::Merge(const GramAccumulator& other) {
  if (other.num_buckets() != num_buckets() || other.dim_ != dim_ ||
      other.num_targets_ != num_targets_) {
    throw std::invalid_argument("cannot merge accumulators of different "
                                "shapes");
  }
  for (int k = 0; k < num_buckets(); ++k) {
    lower_[k] += other.lower_[k];
    counts_[k] += other.counts_[k];
  }
}

const ImageGray& SelectionSource(const TrainingExample& ex,
                                 ImageGray& scratch) {
  if (!ex.selection.empty()) return ex.selection;
  if (ex.inputs.size() == 3) {
    scratch = Luma(ImageRGB(ex.inputs[0], ex.inputs[1], ex.inputs[2]));
    return scratch;
  }
  return ex.inputs.at(0);
}

namespace {

// Image with a reflected border of `pad` pixels on every side.
struct PaddedImage {
  int width = 0;
  int pad = 0;
  std::vector<float> data;

  PaddedImage(const ImageGray& img, int pad_) : pad(pad_) {
    width = img.width() + 2 * pad;
    const int h = img.height() + 2 * pad;
    data.resize(static_cast<size_t>(width) * h);
    for (int y = 0; y < h; ++y) {
      const int sy = ReflectIndex(y - pad, img.height());
      const float* src = img.row(sy);
      float* dst = data.data() + static_cast<size_t>(y) * width;
      for (int x = 0; x < width; ++x) {
        dst[x] = src[ReflectIndex(x - pad, img.width())];
      }
    }
  }
  // Top-left tap of the footprint centered at (x, y).
  const float* window(int x, int y) const {
    return data.data() + static_cast<size_t>(y) * width + x;
  }
};

constexpr int kBlockColumns = 128;

void CheckSameDims(const ImageGray& a, const ImageGray& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(what) + " dimensions differ");
  }
}

TrainingExample TransformExample(const TrainingExample& ex, int k) {
  TrainingExample out;
  for (const auto& im : ex.inputs) out.inputs.push_back(D4Transform(im, k));
  for (const auto& im : ex.targets) out.targets.push_back(D4Transform(im, k));
  if (!ex.selection.empty()) out.selection = D4Transform(ex.selection, k);
  return out;
}

}  // namespace

void Accumulate(GramAccumulator& acc, std::span<const ImageGray> inputs,
                std::span<const ImageGray> targets,
                const SelectionMap& selection, const Footprint& fp) {
  if (inputs.empty() || targets.empty()) {
    throw std::invalid_argument("accumulate needs inputs and targets");
  }
  const int w = selection.width();
  const int h = selection.height();
  for (const auto& im : inputs) {
    if (im.width() != w || im.height() != h) {
      throw std::invalid_argument("observed image and selection map "
                                  "dimensions differ");
    }
  }
  for (const auto& im : targets) {
    if (im.width() != w || im.height() != h) {
      throw std::invalid_argument("target and observed image dimensions "
                                  "differ");
    }
  }
  const int N = fp.size();
  const int D = static_cast<int>(inputs.size()) * N;
  if (D != acc.dim() || static_cast<int>(targets.size()) != acc.num_targets()) {
    throw std::invalid_argument("accumulator shape does not match the "
                                "streams and footprint");
  }

  const int K = acc.num_buckets();
  const auto& idx = selection.indices();
  std::vector<size_t> start(K + 1, 0);
  for (int32_t s : idx) {
    if (s < 0 || s >= K) throw std::out_of_range("selection index >= K");
    ++start[s + 1];
  }
  for (int k = 0; k < K; ++k) start[k + 1] += start[k];
  std::vector<uint32_t> order(idx.size());
  {
    std::vector<size_t> fill(start.begin(), start.end() - 1);
    for (size_t i = 0; i < idx.size(); ++i) {
      order[fill[idx[i]]++] = static_cast<uint32_t>(i);
    }
  }

  const int r = fp.radius();
  const int n = fp.side();
  std::vector<PaddedImage> padded;
  padded.reserve(inputs.size());
  for (const auto& im : inputs) padded.emplace_back(im, r);

  const int width = acc.width();
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
    Eigen::MatrixXd block(width, kBlockColumns);
#pragma omp for schedule(dynamic, 1)
    for (int k = 0; k < K; ++k) {
      int used = 0;
      for (size_t p = start[k]; p < start[k + 1]; ++p) {
        const int x = static_cast<int>(order[p] % w);
        const int y = static_cast<int>(order[p] / w);
        double* col = block.col(used).data();
        int j = 0;
        for (const auto& pi : padded) {
          const float* win = pi.window(x, y);
          for (int dy = 0; dy < n; ++dy) {
            const float* row = win + static_cast<size_t>(dy) * pi.width;
            for (int dx = 0; dx < n; ++dx) col[j++] = row[dx];
          }
        }
        for (const auto& t : targets) col[j++] = t.at(x, y);
        if (++used == kBlockColumns) {
          acc.AddColumns(k, block);
          used = 0;
        }
      }
      if (used > 0) acc.AddColumns(k, block.leftCols(used));
    }
  }
  (void)D;
}

std::array<TrainingExample, 8> AugmentD4(const TrainingExample& ex) {
  std::array<TrainingExample, 8> out;
  for (int k = 0; k < 8; ++k) out[k] = TransformExample(ex, k);
  return out;
}

std::array<std::pair<ImageGray, ImageGray>, 8> AugmentD4(
    const ImageGray& observed, const ImageGray& target) {
  std::array<std::pair<ImageGray, ImageGray>, 8> out;
  for (int k = 0; k < 8; ++k) {
    out[k] = {D4Transform(observed, k), D4Transform(target, k)};
  }
  return out;
}

BucketSolution SolveBucket(const GramAccumulator& acc, int k,
                           const Regularizer& reg, const Footprint& fp,
                           int target, int delta_stream) {
  const int D = acc.dim();
  if (reg.q.rows() != D || reg.q.cols() != D) {
    throw std::invalid_argument("regularizer size does not match filters");
  }
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  BucketSolution sol;
  sol.count = acc.count(k);
  const auto D_u = static_cast<uint64_t>(D);

  if (sol.count == 0) {
    if (reg.lambda == 0.0) {
      throw SingularSystemError("bucket " + std::to_string(k) +
                                " has no samples and no regularization");
    }
    // Q alone has the constant filters as null space; take the
    // minimum-norm minimizer.
    sol.filter.assign(D, 0.0);
    sol.residual_variance = kNaN;
    sol.stddev.assign(D, kNaN);
    return sol;
  }

  const Eigen::MatrixXd AtA = acc.AtA(k);
  const Eigen::VectorXd Atb = acc.Atb(k, target);
  const double btb = acc.btb(k, target);
  const Eigen::MatrixXd H = reg.q + AtA;
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
    sol.fallback = true;
    sol.filter.assign(D, 0.0);
    sol.filter[delta_stream * fp.size() + fp.center_index()] = 1.0;
    sol.residual_variance = kNaN;
    sol.stddev.assign(D, kNaN);
    return sol;
  }
  const Eigen::VectorXd h = llt.solve(Atb);
  sol.filter.assign(h.data(), h.data() + D);
  if (sol.count > D_u) {
    const double sse = btb - 2.0 * h.dot(Atb) + h.dot(AtA * h);
    sol.residual_variance =
        std::max(0.0, sse / static_cast<double>(sol.count - D_u));
  } else {
    sol.residual_variance = kNaN;
  }
  const Eigen::VectorXd inv_diag =
      llt.solve(Eigen::MatrixXd::Identity(D, D)).diagonal();
  sol.stddev.resize(D);
  for (int j = 0; j < D; ++j) {
    sol.stddev[j] = std::sqrt(sol.residual_variance * inv_diag[j]);
  }
  return sol;
}

GramAccumulator AccumulateCorpus(std::span<const TrainingExample> corpus,
                                 const TrainOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  options.quantizer.Validate();
  const Footprint fp(options.footprint_side);
  const size_t arity = corpus[0].inputs.size();
  const size_t outputs = corpus[0].targets.size();
  if (arity < 1 || arity > 3 || (outputs != 1 && outputs != 3) ||
      (outputs == 3 && arity != 3) || (arity == 3 && outputs != 3)) {
    throw std::invalid_argument("unsupported stream layout: " +
                                std::to_string(arity) + " inputs, " +
                                std::to_string(outputs) + " targets");
  }
  GramAccumulator acc(options.quantizer.num_filters(),
                      static_cast<int>(arity) * fp.size(),
                      static_cast<int>(outputs));
  for (size_t e = 0; e < corpus.size(); ++e) {
    const TrainingExample& ex = corpus[e];
    if (ex.inputs.size() != arity || ex.targets.size() != outputs) {
      throw std::invalid_argument("training example " + std::to_string(e) +
                                  " has a different stream layout");
    }
    for (const auto& t : ex.targets) CheckSameDims(ex.inputs[0], t, "target");
    for (const auto& in : ex.inputs) CheckSameDims(ex.inputs[0], in, "input");
    const int variants = options.augment ? 8 : 1;
    for (int v = 0; v < variants; ++v) {
      const TrainingExample tx = v == 0 ? ex : TransformExample(ex, v);
      ImageGray scratch;
      const SelectionMap sel =
          ComputeSelection(SelectionSource(tx, scratch), options.quantizer);
      Accumulate(acc, tx.inputs, tx.targets, sel, fp);
    }
  }
  return acc;
}

FilterBank SolveBank(const GramAccumulator& acc, const TrainOptions& options,
                     int arity) {
  const Footprint fp(options.footprint_side);
  const int outputs = acc.num_targets();
  FilterBank bank(options.quantizer, fp, arity, outputs);
  const Regularizer reg = BuildGradientQ(fp, arity, options.lambda);
  const int K = bank.num_filters();
  const int D = bank.filter_length();
  std::vector<FilterStats> stats(static_cast<size_t>(outputs) * K);
  const int threads = NumThreads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1) collapse(2)
  for (int o = 0; o < outputs; ++o) {
    for (int k = 0; k < K; ++k) {
      const int delta_stream = outputs == 3 ? o : 0;
      BucketSolution sol;
      try {
        sol = SolveBucket(acc, k, reg, fp, o, delta_stream);
      } catch (const SingularSystemError&) {
        sol.fallback = true;
        sol.filter.assign(D, 0.0);
        sol.filter[delta_stream * fp.size() + fp.center_index()] = 1.0;
        sol.residual_variance = std::numeric_limits<double>::quiet_NaN();
        sol.stddev.assign(D, sol.residual_variance);
      }
      auto dst = bank.filter(o, k);
      for (int j = 0; j < D; ++j) dst[j] = static_cast<float>(sol.filter[j]);
      FilterStats& st = stats[static_cast<size_t>(o) * K + k];
      st.count = acc.count(k);
      st.residual_variance = static_cast<float>(sol.residual_variance);
      st.stddev.resize(D);
      for (int j = 0; j < D; ++j) st.stddev[j] = static_cast<float>(sol.stddev[j]);
    }
  }
  bank.set_stats(std::move(stats));
  return bank;
}

FilterBank Train(std::span<const TrainingExample> corpus,
                 const TrainOptions& options) {
  const GramAccumulator acc = AccumulateCorpus(corpus, options);
  return SolveBank(acc, options, static_cast<int>(corpus[0].inputs.size()));
}

std::string FormatTrainingReport(const FilterBank& bank) {
  std::ostringstream out;
  const QuantizerSpec& q = bank.quantizer();
  const int D = bank.filter_length();
  out << "# filters=" << bank.num_filters() << " outputs=" << bank.num_outputs()
      << " arity=" << bank.arity() << " footprint=" << bank.footprint().side()
      << " orientations=" << q.num_orientations
      << " strength=" << q.num_strength << ":" << q.strength_lo << ":"
      << q.strength_hi << " coherence=" << q.num_coherence << ":"
      << q.coherence_lo << ":" << q.coherence_hi << " rho=" << q.rho << "\n";
  if (!bank.has_stats()) {
    out << "# no training statistics\n";
    return out.str();
  }
  out << "# output bucket orientation strength coherence count "
         "residual_var flags\n";
  uint64_t total = 0;
  int flagged = 0;
  for (int o = 0; o < bank.num_outputs(); ++o) {
    for (int k = 0; k < bank.num_filters(); ++k) {
      const FilterStats& s = bank.stats(o, k);
      const Bins b = UnflattenIndex(k, q);
      const uint32_t flags = BucketFlags(s, D);
      if (o == 0) total += s.count;
      if (flags) ++flagged;
      out << o << " " << k << " " << b.orientation << " " << b.strength << " "
          << b.coherence << " " << s.count << " " << std::setprecision(6)
          << s.residual_variance << " ";
      if (!flags) out << "-";
      if (flags & kBucketEmpty) out << "empty,";
      if (flags & kBucketUndersampled) out << "undersampled,";
      if (flags & kBucketUnreliableVariance) out << "unreliable_variance,";
      out << "\n";
    }
  }
  out << "# total_samples=" << total << " flagged_buckets=" << flagged << "\n";
  return out.str();
}

}  // namespace blade
