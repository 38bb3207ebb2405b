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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Corpora are synthetic scenes so
// that the run is hermetic and deterministic.

#include <cstddef>
#include <cstdio>

#include <jpeglib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "blade/filter_bank.h"
#include "blade/image.h"
#include "blade/inference.h"
#include "blade/pipelines.h"
#include "blade/quantizer.h"
#include "blade/reference_ops.h"
#include "blade/serial.h"
#include "blade/structure_tensor.h"
#include "blade/training.h"
#include "support/oracles.h"
#include "support/scenes.h"

namespace blade {
namespace {

using testing::ColorSceneSet;
using testing::SceneSet;
using testing::SyntheticScene;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// Round trip through an in-memory baseline JPEG at the given quality.
ImageGray JpegRoundTrip(const ImageGray& img, int quality) {
  std::vector<JSAMPLE> pixels(img.size());
  for (size_t i = 0; i < img.size(); ++i) {
    pixels[i] = static_cast<JSAMPLE>(std::clamp(std::lround(img.samples()[i]), 0L, 255L));
  }
  jpeg_compress_struct c;
  jpeg_error_mgr err;
  c.err = jpeg_std_error(&err);
  jpeg_create_compress(&c);
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&c, &buffer, &size);
  c.image_width = img.width();
  c.image_height = img.height();
  c.input_components = 1;
  c.in_color_space = JCS_GRAYSCALE;
  jpeg_set_defaults(&c);
  jpeg_set_quality(&c, quality, TRUE);
  jpeg_start_compress(&c, TRUE);
  while (c.next_scanline < c.image_height) {
    JSAMPROW row = &pixels[static_cast<size_t>(c.next_scanline) * img.width()];
    jpeg_write_scanlines(&c, &row, 1);
  }
  jpeg_finish_compress(&c);
  jpeg_destroy_compress(&c);

  jpeg_decompress_struct d;
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_mem_src(&d, buffer, size);
  jpeg_read_header(&d, TRUE);
  jpeg_start_decompress(&d);
  ImageGray out(img.width(), img.height());
  std::vector<JSAMPLE> row(img.width());
  while (d.output_scanline < d.output_height) {
    const int y = static_cast<int>(d.output_scanline);
    JSAMPROW p = row.data();
    jpeg_read_scanlines(&d, &p, 1);
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = row[x];
  }
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
  free(buffer);
  return out;
}

TrainingExample Pair(const ImageGray& in, const ImageGray& target) {
  return TrainingExample{{in}, {target}, {}};
}

QuantizerSpec Spec(int o, int s, float s_lo, float s_hi, int c, float rho) {
  QuantizerSpec q;
  q.num_orientations = o;
  q.num_strength = s;
  q.strength_lo = s_lo;
  q.strength_hi = s_hi;
  q.num_coherence = c;
  q.rho = rho;
  return q;
}

QuantizerSpec StandardSpec() { return Spec(16, 5, 10, 40, 3, 1.2f); }
QuantizerSpec DenoiseSpec() { return Spec(16, 5, 10, 40, 3, 1.7f); }

double MeanSquaredErrorOver(const FilterBank& bank, std::span<const TrainingExample> corpus) {
  double se = 0.0;
  size_t n = 0;
  for (const TrainingExample& ex : corpus) {
    se += MeanSquaredError(Apply(bank, ex.inputs[0]), ex.targets[0]) * ex.targets[0].size();
    n += ex.targets[0].size();
  }
  return se / n;
}

double RelMaxDiff(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref) {
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
  return (x - ref).cwiseAbs().maxCoeff() / scale;
}

// 1. K = 1, lambda = 0 training equals least squares solved by QR.
Outcome WienerEquivalence() {
  const ImageGray clean = SyntheticScene(64, 64, 101);
  const ImageGray noisy = AddAwgn(clean, 20, 102);
  TrainOptions opt;
  opt.quantizer = Spec(1, 1, 10, 40, 1, 1.2f);
  opt.footprint_side = 7;
  opt.lambda = 0.0;
  opt.augment = false;
  const auto t0 = Clock::now();
  const std::vector<TrainingExample> corpus{Pair(noisy, clean)};
  const FilterBank bank = Train(corpus, opt);
  const double secs = Seconds(t0);
  const auto dm = testing::BuildDesignMatrix({noisy}, {clean}, 7);
  const Eigen::VectorXd oracle = testing::LeastSquaresQr(dm.a, dm.b.col(0));
  const auto h = bank.filter(0, 0);
  Eigen::VectorXd hv(h.size());
  for (size_t j = 0; j < h.size(); ++j) hv[j] = h[j];
  const double rel = (hv - oracle).norm() / oracle.norm();
  return {rel <= 1e-6 && secs < 1.0,
          Fmt("relative coefficient error %.3g (<= 1e-6), %.3f s (< 1 s)", rel, secs)};
}

// 2. More buckets never fit the training set worse.
Outcome MseDominance() {
  const std::vector<ImageGray> clean = SceneSet(10, 256, 200);
  std::vector<TrainingExample> corpus;
  for (size_t i = 0; i < clean.size(); ++i) {
    corpus.push_back(Pair(AddAwgn(clean[i], 20, 300 + i), clean[i]));
  }
  TrainOptions many;
  many.quantizer = StandardSpec();
  many.augment = false;
  TrainOptions one = many;
  one.quantizer = Spec(1, 1, 10, 40, 1, 1.2f);
  const double mse_many = MeanSquaredErrorOver(Train(corpus, many), corpus);
  const double mse_one = MeanSquaredErrorOver(Train(corpus, one), corpus);
  return {mse_many <= mse_one,
          Fmt("training MSE K=240 %.4f <= K=1 %.4f", mse_many, mse_one)};
}

// 3. Streaming Gram matrices equal the materialized design-matrix products
// for any sample order and any shard split.
Outcome GramOracle() {
  const QuantizerSpec q = StandardSpec();
  const Footprint fp(5);
  const int d = fp.size();
  const ImageGray in1 = SyntheticScene(64, 64, 401), in2 = SyntheticScene(48, 64, 402);
  const ImageGray out1 = AddAwgn(in1, 15, 403), out2 = AddAwgn(in2, 15, 404);
  const SelectionMap s1 = ComputeSelection(in1, q), s2 = ComputeSelection(in2, q);

  GramAccumulator whole(q.num_filters(), d), shard1(q.num_filters(), d),
      shard2(q.num_filters(), d), shuffled(q.num_filters(), d);
  Accumulate(whole, std::span(&in1, 1), std::span(&out1, 1), s1, fp);
  Accumulate(whole, std::span(&in2, 1), std::span(&out2, 1), s2, fp);
  Accumulate(shard1, std::span(&in1, 1), std::span(&out1, 1), s1, fp);
  Accumulate(shard2, std::span(&in2, 1), std::span(&out2, 1), s2, fp);
  GramAccumulator merged = shard2;
  merged.Merge(shard1);
  std::vector<uint32_t> order1(in1.size()), order2(in2.size());
  std::iota(order1.begin(), order1.end(), 0u);
  std::iota(order2.begin(), order2.end(), 0u);
  std::mt19937 rng(405);
  std::shuffle(order1.begin(), order1.end(), rng);
  std::shuffle(order2.begin(), order2.end(), rng);
  serial::Accumulate(shuffled, std::span(&in2, 1), std::span(&out2, 1), s2, fp, order2);
  serial::Accumulate(shuffled, std::span(&in1, 1), std::span(&out1, 1), s1, fp, order1);

  const std::vector<int> sel1(s1.indices().begin(), s1.indices().end());
  const std::vector<int> sel2(s2.indices().begin(), s2.indices().end());
  double worst = 0.0;
  int buckets = 0;
  for (int k = 0; k < q.num_filters(); ++k) {
    const auto a = testing::BuildDesignMatrix({in1}, {out1}, 5, &sel1, k);
    const auto b = testing::BuildDesignMatrix({in2}, {out2}, 5, &sel2, k);
    const Eigen::Index na = a.a.rows(), nb = b.a.rows();
    if (na + nb == 0) continue;
    Eigen::MatrixXd rows(na + nb, d + 1);
    rows.topLeftCorner(na, d) = a.a;
    rows.topRightCorner(na, 1) = a.b;
    rows.bottomLeftCorner(nb, d) = b.a;
    rows.bottomRightCorner(nb, 1) = b.b;
    ++buckets;
    const Eigen::MatrixXd g = rows.transpose() * rows;
    for (const GramAccumulator* acc : {&whole, &merged, &shuffled}) {
      if (acc->count(k) != static_cast<uint64_t>(rows.rows())) return {false, "count mismatch"};
      worst = std::max(worst, RelMaxDiff(acc->AtA(k), g.topLeftCorner(d, d)));
      worst = std::max(worst, RelMaxDiff(acc->Atb(k), g.topRightCorner(d, 1)));
      worst = std::max(worst, std::abs(acc->btb(k) - g(d, d)) / g(d, d));
    }
  }
  return {worst <= 1e-9,
          Fmt("max relative deviation %.3g (<= 1e-9) over %.0f buckets x 3 orders", worst,
              buckets)};
}

// 4. Closed-form 2x2 eigensystems against bisection.
Outcome EigenCorrectness() {
  std::mt19937_64 rng(501);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_value = 0.0, worst_vector = 0.0;
  bool trace_exact = true;
  for (int i = 0; i < 10000; ++i) {
    // M^T M is nonnegative definite; every fifth matrix is rank 1.
    const double p = u(rng), r = u(rng);
    const double qq = i % 5 == 0 ? 0.0 : u(rng), s = i % 5 == 0 ? 0.0 : u(rng);
    const double a = p * p + qq * qq, b = p * r + qq * s, c = r * r + s * s;
    const TensorEigen e = EigenDecompose(a, b, c);
    const auto ref = testing::BisectEigenvalues(a, b, c);
    const double scale = std::max(static_cast<double>(ref[0]), 1e-300);
    worst_value = std::max(worst_value, std::abs(e.lambda1 - static_cast<double>(ref[0])) / scale);
    worst_value = std::max(worst_value, std::abs(e.lambda2 - static_cast<double>(ref[1])) / scale);
    if (e.lambda1 + e.lambda2 != a + c) trace_exact = false;
    const double norm = std::hypot(e.w1, e.w2);
    if (norm > 0.0) {
      const double r1 = a * e.w1 + b * e.w2 - e.lambda1 * e.w1;
      const double r2 = b * e.w1 + c * e.w2 - e.lambda1 * e.w2;
      worst_vector = std::max(worst_vector, std::hypot(r1, r2) / norm);
    }
  }
  return {worst_value <= 1e-9 && worst_vector <= 1e-6 && trace_exact,
          Fmt("eigenvalue error %.3g (<= 1e-9), eigenvector residual %.3g (<= 1e-6), "
              "trace identity ",
              worst_value, worst_vector) +
              (trace_exact ? "exact" : "VIOLATED")};
}

struct Quality {
  double psnr = 0.0;
  double mssim = 0.0;
};

// 5. Bilateral filter approximation.
Outcome BilateralApproximation() {
  const auto t0 = Clock::now();
  const double sigma_r = 25.0, sigma_s = 2.5;
  const std::vector<ImageGray> train = SceneSet(8, 512, 600);
  const std::vector<ImageGray> held = SceneSet(4, 512, 700);
  std::vector<TrainingExample> corpus;
  for (const ImageGray& img : train) corpus.push_back(Pair(img, Bilateral(img, sigma_r, sigma_s)));
  TrainOptions opt;
  opt.quantizer = Spec(24, 3, 10, 35, 3, 1.2f);
  opt.footprint_side = 7;
  const FilterBank bank = Train(corpus, opt);
  Quality avg;
  for (const ImageGray& img : held) {
    const ImageGray ref = Bilateral(img, sigma_r, sigma_s);
    const ImageGray out = Apply(bank, img);
    avg.psnr += Psnr(ref, out) / held.size();
    avg.mssim += Mssim(ref, out) / held.size();
  }
  const double secs = Seconds(t0);
  return {avg.psnr >= 33.0 && avg.mssim >= 0.93 && secs < 300.0,
          Fmt("PSNR %.2f dB (>= 33), MSSIM %.4f (>= 0.93), %.1f s (< 300 s)", avg.psnr,
              avg.mssim, secs)};
}

struct DenoiseSetup {
  // 512 x 512 sources leave the 128 x 128 coarsest level enough samples;
  // with smaller corpora the in-sample coarse results overfit.
  std::vector<ImageGray> train = SceneSet(8, 512, 800);
  std::vector<ImageGray> held = SceneSet(4, 512, 900);
  static constexpr double kSigma = 20.0;

  PipelineConfig Config(int levels) const {
    PipelineConfig c;
    c.task = Task::kAwgn;
    c.train.quantizer = DenoiseSpec();
    c.train.footprint_side = 7;
    c.sigma = kSigma;
    c.seed = 17;
    c.levels = levels;
    return c;
  }

  // Average PSNR of `denoise` and of the noisy input over 3 realizations.
  std::pair<double, double> Evaluate(
      const std::function<ImageGray(const ImageGray&)>& denoise) const {
    double out = 0.0, in = 0.0;
    int n = 0;
    for (size_t i = 0; i < held.size(); ++i) {
      for (uint64_t r = 0; r < 3; ++r) {
        const ImageGray noisy = AddAwgn(held[i], kSigma, 10000 + 10 * i + r);
        out += Psnr(held[i], denoise(noisy));
        in += Psnr(held[i], noisy);
        ++n;
      }
    }
    return {out / n, in / n};
  }
};

// 6. Single-level AWGN denoising.
Outcome AwgnDenoising(const DenoiseSetup& setup, const MultiscaleBank& single) {
  const auto [out, in] = setup.Evaluate([&](const ImageGray& x) { return Apply(single.levels[0], x); });
  return {out - in >= 5.0, Fmt("PSNR %.2f -> %.2f dB, gain %.2f dB (>= 5)", in, out, out - in)};
}

// 7. The cascade is at least as good as its single-level counterpart.
Outcome MultiscaleDominance(const DenoiseSetup& setup, const MultiscaleBank& single) {
  const MultiscaleBank three = TrainMultiscale(setup.train, setup.Config(3));
  const double ms = setup.Evaluate([&](const ImageGray& x) { return ApplyMultiscale(three, x); }).first;
  const double ss = setup.Evaluate([&](const ImageGray& x) { return ApplyMultiscale(single, x); }).first;
  return {ms >= ss, Fmt("3-level %.3f dB >= 1-level %.3f dB", ms, ss)};
}

// 8. Training on real compression artifacts beats training on white noise
// of matched variance when the test degradation is compression.
Outcome JpegVersusAwgn() {
  const std::vector<ImageGray> train = SceneSet(8, 256, 1000);
  const std::vector<ImageGray> held = SceneSet(4, 256, 1100);
  TrainOptions opt;
  opt.quantizer = Spec(8, 5, 10, 40, 3, 1.2f);
  opt.footprint_side = 7;
  std::vector<TrainingExample> jpeg, awgn;
  for (size_t i = 0; i < train.size(); ++i) {
    jpeg.push_back(Pair(JpegRoundTrip(train[i], 50), train[i]));
    awgn.push_back(Pair(AddAwgn(train[i], std::sqrt(43.6), 1200 + i), train[i]));
  }
  const FilterBank jpeg_bank = Train(jpeg, opt);
  const FilterBank awgn_bank = Train(awgn, opt);
  double pj = 0.0, pa = 0.0, p0 = 0.0;
  for (const ImageGray& img : held) {
    const ImageGray degraded = JpegRoundTrip(img, 50);
    pj += Psnr(img, Apply(jpeg_bank, degraded)) / held.size();
    pa += Psnr(img, Apply(awgn_bank, degraded)) / held.size();
    p0 += Psnr(img, degraded) / held.size();
  }
  return {pj - pa >= 0.05,
          Fmt("JPEG-trained %.3f dB vs AWGN-trained %.3f dB, margin %.3f dB (>= 0.05); "
              "JPEG input %.3f dB",
              pj, pa, pj - pa, p0)};
}

// 9. The color bank improves on its bilinear base.
Outcome DemosaicImprovement() {
  const std::vector<ImageRGB> train = ColorSceneSet(8, 256, 1300);
  const std::vector<ImageRGB> held = ColorSceneSet(4, 256, 1400);
  std::vector<TrainingExample> corpus;
  for (const ImageRGB& img : train) corpus.push_back(MakeDemosaicExample(img));
  TrainOptions opt;
  opt.quantizer = Spec(8, 3, 10, 40, 3, 0.7f);
  opt.footprint_side = 5;
  const FilterBank bank = Train(corpus, opt);
  double base = 0.0, refined = 0.0;
  for (const ImageRGB& img : held) {
    const ImageGray mosaic = BayerMosaic(img);
    base += Psnr(img, BilinearDemosaic(mosaic)) / held.size();
    refined += Psnr(img, DemosaicWithBank(bank, mosaic)) / held.size();
  }
  return {refined - base >= 0.3,
          Fmt("bilinear %.2f dB -> %.2f dB, gain %.2f dB (>= 0.3)", base, refined,
              refined - base)};
}

// 10. alpha = 0 reproduces the input exactly.
Outcome IdentityBlend(const MultiscaleBank& single) {
  const ImageGray gray = AddAwgn(SyntheticScene(200, 150, 1500), 20, 1501);
  const ImageRGB color = testing::SyntheticColorScene(120, 90, 1502);
  const bool g = std::get<ImageGray>(ApplyBankToImage(single.levels[0], gray, 0.0)) == gray;
  const bool c = std::get<ImageRGB>(ApplyBankToImage(single.levels[0], color, 0.0)) == color;
  return {g && c, std::string("gray ") + (g ? "exact" : "differs") + ", color " +
                      (c ? "exact" : "differs")};
}

// 11. Filtering cost is linear in pixels and grows with the footprint.
Outcome Linearity() {
  const std::vector<int> sides{5, 7, 9, 11, 13};
  const std::vector<double> mps{1.0, 4.0};
  const std::vector<BenchRow> rows = RunBenchmark(sides, mps, 5);
  bool ok = true;
  std::string detail;
  std::vector<double> rate;
  for (const BenchRow& r : rows) {
    rate.push_back((r.megapixels[0] + r.megapixels[1]) / (r.seconds[0] + r.seconds[1]));
    detail += Fmt("%.0fx%.0f %.2f MP/s", r.footprint_side, r.footprint_side, rate.back());
    if (r.footprint_side == 5 || r.footprint_side == 7) {
      detail += Fmt(" (linearity %.3f)", r.linearity);
      ok = ok && r.linearity >= 3.5 && r.linearity <= 4.5;
    }
    if (r.footprint_side == 7) ok = ok && rate.back() >= 5.0;
    // Strictly lower throughput than the previous footprint, measured per round.
    if (r.cost_ratio != 0.0) {
      detail += Fmt(" (cost x%.3f)", r.cost_ratio);
      ok = ok && r.cost_ratio > 1.0;
    }
    detail += "; ";
  }
  return {ok, detail + "linearity in [3.5, 4.5], strictly decreasing, 7x7 >= 5 MP/s"};
}

bool NearEdge(double coord) { return std::abs(coord - std::round(coord)) < 1e-6; }

// 12. Quarter turns permute orientation bins, in both the selection maps
// and the filters of an augmented-training bank.
Outcome D4Equivariance(const MultiscaleBank& single) {
  const QuantizerSpec q = DenoiseSpec();
  const int w = 96, h = 80;
  const int margin = static_cast<int>(std::ceil(3 * q.rho)) + 2;
  const int half = q.num_orientations / 2;
  long checked = 0, mismatched = 0;
  for (uint64_t seed = 1600; seed < 1604; ++seed) {
    const ImageGray img = SyntheticScene(w, h, seed);
    const SelectionMap s = ComputeSelection(img, q);
    const SelectionMap r = ComputeSelection(Rotate90(img), q);
    const auto f = ComputeFeatures(img, q.rho);
    for (int y = margin; y < h - margin; ++y) {
      for (int x = margin; x < w - margin; ++x) {
        const Features& ft = f[static_cast<size_t>(y) * w + x];
        const double oc = OrientationCoordinate(ft.orientation, q.num_orientations) - 0.5;
        const double sc =
            (ft.strength - q.strength_lo) / (q.strength_hi - q.strength_lo) * q.num_strength;
        const double cc = (ft.coherence - q.coherence_lo) /
                          (q.coherence_hi - q.coherence_lo) * q.num_coherence;
        if (NearEdge(oc) || NearEdge(sc) || NearEdge(cc) || ft.coherence < 1e-6) continue;
        Bins a = UnflattenIndex(s.at(x, y), q);
        a.orientation = (a.orientation + half) % q.num_orientations;
        ++checked;
        if (FlatIndex(a, q) != r.at(y, w - 1 - x)) ++mismatched;
      }
    }
  }

  const FilterBank& bank = single.levels[0];
  const int side = bank.footprint().side();
  const int d = side * side;
  double worst = 0.0;
  int pairs = 0;
  for (int k = 0; k < bank.num_filters(); ++k) {
    Bins b = UnflattenIndex(k, q);
    // Only well-determined buckets: sampling noise dominates sparse ones.
    if (bank.stats(0, k).count < 50u * d) continue;
    b.orientation = (b.orientation + half) % q.num_orientations;
    const int k2 = FlatIndex(b, q);
    const auto h1 = bank.filter(0, k);
    const ImageGray turned = Rotate90(ImageGray(side, side, std::vector<float>(h1.begin(), h1.end())));
    const auto h2 = bank.filter(0, k2);
    double sq = 0.0;
    for (int j = 0; j < d; ++j) sq += std::pow(turned.samples()[j] - h2[j], 2);
    worst = std::max(worst, std::sqrt(sq / d));
    ++pairs;
  }
  return {mismatched == 0 && checked > 0 && pairs > 0 && worst <= 1e-3,
          Fmt("selection mismatches %.0f of %.0f interior pixels; filter RMS %.3g (<= 1e-3) "
              "over %.0f bucket pairs",
              mismatched, checked, worst, pairs)};
}

// 13. Diagonal differences are exact on affine images.
Outcome AffineGradients() {
  double worst = 0.0;
  const double coeffs[][3] = {{0.75, -1.25, 10}, {2.5, 0.5, 3}, {-0.125, 0.0, 200}, {1, 1, 0}};
  for (const auto& k : coeffs) {
    const ImageGray img = testing::AffineImage(40, 33, k[0], k[1], k[2]);
    const GradientField g = DiagonalGradient(img);
    const double g1 = (k[0] - k[1]) / std::sqrt(2.0), g2 = (k[0] + k[1]) / std::sqrt(2.0);
    for (size_t i = 0; i < g.g1.size(); ++i) {
      worst = std::max(worst, std::abs(g.g1[i] - g1));
      worst = std::max(worst, std::abs(g.g2[i] - g2));
    }
  }
  return {worst <= 1e-9, Fmt("max gradient error %.3g (<= 1e-9)", worst)};
}

}  // namespace
}  // namespace blade

int main() {
  using namespace blade;
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("criterion %2d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  const DenoiseSetup setup;
  const MultiscaleBank single = TrainMultiscale(setup.train, setup.Config(1));

  report(1, "wiener-equivalence", guarded(WienerEquivalence));
  report(2, "mse-dominance", guarded(MseDominance));
  report(3, "gram-oracle", guarded(GramOracle));
  report(4, "eigen-correctness", guarded(EigenCorrectness));
  report(5, "bilateral-approximation", guarded(BilateralApproximation));
  report(6, "awgn-denoising", guarded([&] { return AwgnDenoising(setup, single); }));
  report(7, "multiscale-dominance", guarded([&] { return MultiscaleDominance(setup, single); }));
  report(8, "jpeg-vs-awgn", guarded(JpegVersusAwgn));
  report(9, "demosaic-improvement", guarded(DemosaicImprovement));
  report(10, "identity-blend", guarded([&] { return IdentityBlend(single); }));
  report(11, "linearity", guarded(Linearity));
  report(12, "d4-equivariance", guarded([&] { return D4Equivariance(single); }));
  report(13, "affine-gradients", guarded(AffineGradients));
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
