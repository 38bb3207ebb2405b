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

#include "blade/pipelines.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "blade/inference.h"
#include "blade/quantizer.h"

namespace blade {
namespace fs = std::filesystem;

Task ParseTask(const std::string& name) {
  if (name == "bilateral") return Task::kBilateral;
  if (name == "tvflow") return Task::kTvFlow;
  if (name == "etf") return Task::kEtf;
  if (name == "awgn") return Task::kAwgn;
  if (name == "pairs") return Task::kPairs;
  if (name == "demosaic") return Task::kDemosaic;
  throw std::invalid_argument("unknown task '" + name + "'");
}

std::string TaskName(Task task) {
  switch (task) {
    case Task::kBilateral: return "bilateral";
    case Task::kTvFlow: return "tvflow";
    case Task::kEtf: return "etf";
    case Task::kAwgn: return "awgn";
    case Task::kPairs: return "pairs";
    case Task::kDemosaic: return "demosaic";
  }
  return "?";
}

std::vector<ManifestEntry> ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() || base.empty() ? q : base / q;
  };
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ManifestEntry e;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      e.observed = resolve(line);
    } else {
      if (line.find('\t', tab + 1) != std::string::npos) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected at most two tab-separated paths");
      }
      e.observed = resolve(line.substr(0, tab));
      e.target = resolve(line.substr(tab + 1));
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw std::invalid_argument("manifest " + path.string() + " is empty");
  }
  return entries;
}

void PipelineConfig::Validate() const {
  train.quantizer.Validate();
  if (train.footprint_side < 1 || train.footprint_side % 2 == 0) {
    throw std::invalid_argument("footprint side must be a positive odd number");
  }
  if (!(train.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  op.Validate();
}

void ParseOpParams(const std::string& text, FlowParams& params) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("op parameter '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    double v;
    try {
      size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("op parameter '" + key + "' has bad value '" +
                                  value + "'");
    }
    if (key == "dt") params.dt = v;
    else if (key == "steps") params.steps = static_cast<int>(v);
    else if (key == "epsilon") params.epsilon = v;
    else if (key == "rho") params.rho = v;
    else if (key == "half_length") params.half_length = v;
    else if (key == "sigma_r") params.sigma_r = v;
    else if (key == "sigma_s") params.sigma_s = v;
    else throw std::invalid_argument("unknown op parameter '" + key + "'");
  }
}

BinRange ParseBinRange(const std::string& text) {
  BinRange r{};
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d:%f:%f%c", &r.count, &r.lo, &r.hi, &tail) !=
      3) {
    throw std::invalid_argument("expected COUNT:LO:HI, got '" + text + "'");
  }
  return r;
}

ImageGray ApplyReferenceOp(Task task, const ImageGray& img,
                           const FlowParams& params) {
  switch (task) {
    case Task::kBilateral: return Bilateral(img, params.sigma_r, params.sigma_s);
    case Task::kTvFlow: return TvFlow(img, params);
    case Task::kEtf: return EdgeTangentFlow(img, params);
    default: break;
  }
  throw std::invalid_argument("task " + TaskName(task) +
                              " has no reference operator");
}

TrainingExample MakeExample(const PipelineConfig& config,
                            const ImageGray& observed, const ImageGray& target,
                            size_t index) {
  TrainingExample ex;
  switch (config.task) {
    case Task::kBilateral:
    case Task::kTvFlow:
    case Task::kEtf:
      ex.inputs = {observed};
      ex.targets = {ApplyReferenceOp(config.task, observed, config.op)};
      break;
    case Task::kAwgn:
      ex.inputs = {AddAwgn(target, config.sigma, config.seed + index)};
      ex.targets = {target};
      break;
    case Task::kPairs:
      ex.inputs = {observed};
      ex.targets = {target};
      break;
    case Task::kDemosaic:
      throw std::invalid_argument("demosaic examples are color; use "
                                  "MakeDemosaicExample");
  }
  return ex;
}

TrainingExample MakeDemosaicExample(const ImageRGB& clean) {
  // Odd trailing rows/columns are dropped so the Bayer phase tiles evenly.
  const int w = clean.width() & ~1;
  const int h = clean.height() & ~1;
  if (w < 2 || h < 2) {
    throw std::invalid_argument("demosaic training image smaller than 2x2");
  }
  ImageRGB even(w, h);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(clean[c].row(y), w, even[c].row(y));
    }
  }
  const ImageRGB base = BilinearDemosaic(BayerMosaic(even));
  TrainingExample ex;
  for (int c = 0; c < 3; ++c) {
    ex.inputs.push_back(base[c]);
    ex.targets.push_back(even[c]);
  }
  return ex;
}

namespace {

template <typename F>
auto WithPath(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

bool IsColor(const AnyImage& img) {
  return std::holds_alternative<ImageRGB>(img);
}

ImageRGB AsRGB(const AnyImage& img) {
  if (IsColor(img)) return std::get<ImageRGB>(img);
  const ImageGray& g = std::get<ImageGray>(img);
  return ImageRGB(g, g, g);
}

}  // namespace

std::vector<TrainingExample> LoadCorpus(const PipelineConfig& config,
                                        std::span<const ManifestEntry> entries) {
  config.Validate();
  if (entries.empty()) throw std::invalid_argument("training manifest is empty");
  std::vector<TrainingExample> corpus;
  for (size_t i = 0; i < entries.size(); ++i) {
    const ManifestEntry& e = entries[i];
    // The single image of synthetic tasks may sit in either column.
    const fs::path& source = e.target.empty() ? e.observed : e.target;
    switch (config.task) {
      case Task::kBilateral:
      case Task::kTvFlow:
      case Task::kEtf: {
        const ImageGray img = ReadGray(e.observed);
        corpus.push_back(WithPath(e.observed, [&] {
          return MakeExample(config, img, img, i);
        }));
        break;
      }
      case Task::kAwgn: {
        const ImageGray clean = ReadGray(source);
        corpus.push_back(MakeExample(config, clean, clean, i));
        break;
      }
      case Task::kPairs: {
        if (e.target.empty()) {
          throw std::invalid_argument("pairs task needs observed<TAB>target, "
                                      "got a single path " +
                                      e.observed.string());
        }
        const AnyImage obs = ReadImage(e.observed);
        const AnyImage tgt = ReadImage(e.target);
        const ImageRGB o = AsRGB(obs);
        const ImageRGB t = AsRGB(tgt);
        if (o.width() != t.width() || o.height() != t.height()) {
          throw std::invalid_argument(
              "dimension mismatch between " + e.observed.string() + " (" +
              std::to_string(o.width()) + "x" + std::to_string(o.height()) +
              ") and " + e.target.string() + " (" + std::to_string(t.width()) +
              "x" + std::to_string(t.height()) + ")");
        }
        if (!IsColor(obs) && !IsColor(tgt)) {
          corpus.push_back(MakeExample(config, o[0], t[0], i));
          break;
        }
        // Color pairs: each channel is a gray example selected by the luma
        // of the observed image.
        const ImageGray luma = Luma(o);
        for (int c = 0; c < 3; ++c) {
          TrainingExample ex = MakeExample(config, o[c], t[c], i);
          ex.selection = luma;
          corpus.push_back(std::move(ex));
        }
        break;
      }
      case Task::kDemosaic:
        corpus.push_back(WithPath(source, [&] {
          return MakeDemosaicExample(ReadRGB(source));
        }));
        break;
    }
  }
  return corpus;
}

AnyImage ApplyBankToImage(const FilterBank& bank, const AnyImage& img,
                          double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  if (bank.arity() == 2) {
    throw std::invalid_argument("two-stream banks run inside the multiscale "
                                "pipeline only");
  }
  if (bank.is_color()) {
    if (!IsColor(img)) {
      throw std::invalid_argument("color bank needs a color input image");
    }
    if (alpha != 1.0) {
      throw std::invalid_argument("alpha blending needs a gray bank");
    }
    return ApplyColor(bank, std::get<ImageRGB>(img));
  }
  const FilterBank blended = alpha == 1.0 ? bank : BlendWithIdentity(bank, alpha);
  if (IsColor(img)) return ApplyPerChannel(blended, std::get<ImageRGB>(img));
  return Apply(blended, std::get<ImageGray>(img));
}

ImageRGB DemosaicWithBank(const FilterBank& bank, const ImageGray& mosaic) {
  if (!bank.is_color()) {
    throw std::invalid_argument("demosaicing needs a color bank");
  }
  return ApplyColor(bank, BilinearDemosaic(mosaic));
}

int MaxPyramidLevels(int width, int height) {
  int m = std::min(width, height);
  int levels = 0;
  while (m >= 2) {
    ++levels;
    m /= 2;
  }
  return levels;
}

namespace {

std::vector<ImageGray> Pyramid(const ImageGray& img, int levels) {
  std::vector<ImageGray> p{img};
  for (int l = 1; l < levels; ++l) p.push_back(Downsample2x(p.back()));
  return p;
}

void CheckLevels(const ImageGray& img, int levels) {
  const int max = MaxPyramidLevels(img.width(), img.height());
  if (levels > max) {
    throw std::invalid_argument(
        std::to_string(levels) + " pyramid levels exceed log2 of the smaller "
        "side of a " + std::to_string(img.width()) + "x" +
        std::to_string(img.height()) + " image (max " + std::to_string(max) +
        ")");
  }
}

}  // namespace

MultiscaleBank TrainMultiscale(std::span<const ImageGray> clean,
                               const PipelineConfig& config) {
  config.Validate();
  if (clean.empty()) throw std::invalid_argument("training corpus is empty");
  const int L = config.levels;
  std::vector<std::vector<ImageGray>> noisy_pyr, clean_pyr;
  for (size_t i = 0; i < clean.size(); ++i) {
    CheckLevels(clean[i], L);
    noisy_pyr.push_back(
        Pyramid(AddAwgn(clean[i], config.sigma, config.seed + i), L));
    clean_pyr.push_back(Pyramid(clean[i], L));
  }

  MultiscaleBank out;
  std::vector<ImageGray> denoised(clean.size());
  {
    std::vector<TrainingExample> corpus;
    for (size_t i = 0; i < clean.size(); ++i) {
      corpus.push_back({{noisy_pyr[i][L - 1]}, {clean_pyr[i][L - 1]}, {}});
    }
    out.levels.push_back(Train(corpus, config.train));
    for (size_t i = 0; i < clean.size(); ++i) {
      denoised[i] = Apply(out.levels.back(), noisy_pyr[i][L - 1]);
    }
  }
  for (int l = L - 2; l >= 0; --l) {
    std::vector<TrainingExample> corpus;
    for (size_t i = 0; i < clean.size(); ++i) {
      const ImageGray& cur = noisy_pyr[i][l];
      corpus.push_back(
          {{cur, Upsample2x(denoised[i], cur.width(), cur.height())},
           {clean_pyr[i][l]},
           {}});
    }
    out.levels.push_back(Train(corpus, config.train));
    for (size_t i = 0; i < clean.size(); ++i) {
      denoised[i] = ApplyTwoStream(out.levels.back(), corpus[i].inputs[0],
                                   corpus[i].inputs[1]);
    }
  }
  return out;
}

ImageGray ApplyMultiscale(const MultiscaleBank& bank, const ImageGray& noisy) {
  const int L = static_cast<int>(bank.levels.size());
  if (L < 1) throw std::invalid_argument("multiscale bank has no levels");
  CheckLevels(noisy, L);
  const std::vector<ImageGray> pyr = Pyramid(noisy, L);
  ImageGray result = Apply(bank.levels[0], pyr[L - 1]);
  for (int l = L - 2; l >= 0; --l) {
    const ImageGray& cur = pyr[l];
    result = ApplyTwoStream(bank.levels[L - 1 - l], cur,
                            Upsample2x(result, cur.width(), cur.height()));
  }
  return result;
}

std::vector<uint8_t> SerializeMultiscale(const MultiscaleBank& bank) {
  if (bank.levels.empty() || bank.levels.size() > 255) {
    throw std::invalid_argument("multiscale bank needs 1..255 levels");
  }
  std::vector<uint8_t> out = {'B', 'L', 'D', 'M',
                              static_cast<uint8_t>(bank.levels.size())};
  for (const FilterBank& b : bank.levels) {
    const std::vector<uint8_t> rec = Serialize(b);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

MultiscaleBank DeserializeMultiscale(std::span<const uint8_t> bytes) {
  using Kind = FormatError::Kind;
  if (bytes.size() < 5) {
    throw FormatError(Kind::kTruncated,
                      "multiscale header needs 5 bytes, got " +
                          std::to_string(bytes.size()));
  }
  if (bytes[0] != 'B' || bytes[1] != 'L' || bytes[2] != 'D' || bytes[3] != 'M') {
    throw FormatError(Kind::kBadMagic, "not a multiscale bank (magic != BLDM)");
  }
  const int levels = bytes[4];
  if (levels == 0) {
    throw FormatError(Kind::kInconsistent, "multiscale bank has zero levels");
  }
  MultiscaleBank out;
  size_t pos = 5;
  for (int l = 0; l < levels; ++l) {
    size_t used = 0;
    out.levels.push_back(DeserializePrefix(bytes.subspan(pos), &used));
    pos += used;
    const int want_arity = l == 0 ? 1 : 2;
    if (out.levels.back().arity() != want_arity) {
      throw FormatError(Kind::kInconsistent,
                        "level " + std::to_string(l) + " has arity " +
                            std::to_string(out.levels.back().arity()) +
                            ", expected " + std::to_string(want_arity));
    }
  }
  if (pos != bytes.size()) {
    throw FormatError(Kind::kInconsistent,
                      std::to_string(bytes.size() - pos) +
                          " trailing bytes after the last level");
  }
  return out;
}

std::string EvalReport(const AnyImage& ref, const AnyImage& test) {
  if (IsColor(ref) != IsColor(test)) {
    throw std::invalid_argument("reference and test differ in channel count");
  }
  double psnr, mssim;
  if (IsColor(ref)) {
    const ImageRGB& a = std::get<ImageRGB>(ref);
    const ImageRGB& b = std::get<ImageRGB>(test);
    psnr = Psnr(a, b);
    mssim = 0.0;
    for (int c = 0; c < 3; ++c) mssim += Mssim(a[c], b[c]) / 3.0;
  } else {
    const ImageGray& a = std::get<ImageGray>(ref);
    const ImageGray& b = std::get<ImageGray>(test);
    psnr = Psnr(a, b);
    mssim = Mssim(a, b);
  }
  char buf[96];
  if (std::isinf(psnr)) {
    std::snprintf(buf, sizeof buf, "PSNR_dB=inf MSSIM=%.4f", mssim);
  } else {
    std::snprintf(buf, sizeof buf, "PSNR_dB=%.4f MSSIM=%.4f", psnr, mssim);
  }
  return buf;
}

std::vector<BenchRow> RunBenchmark(std::span<const int> footprint_sides,
                                   std::span<const double> megapixels,
                                   int runs, uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> pixel(0.0f, 255.0f);
  std::vector<ImageGray> images;
  for (double mp : megapixels) {
    if (!(mp > 0.0)) throw std::invalid_argument("image sizes must be positive");
    const int side = std::max(
        2, static_cast<int>(std::lround(std::sqrt(mp * 1e6))));
    ImageGray img(side, side);
    for (float& v : img.samples()) v = pixel(rng);
    images.push_back(std::move(img));
  }
  const QuantizerSpec q;  // 16 x 5 x 3
  std::vector<FilterBank> banks;
  for (int side : footprint_sides) {
    banks.emplace_back(q, Footprint(side));
    std::uniform_real_distribution<float> coef(-0.1f, 0.1f);
    for (float& v : banks.back().coefficients()) v = coef(rng);
  }
  auto once = [&](size_t f, size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const ImageGray out = Apply(banks[f], images[i]);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };
  // Rounds visit every configuration once so that slow drifts in machine
  // speed hit all configurations alike; round 0 is the warm-up.
  std::vector<std::vector<double>> times(banks.size() * images.size());
  for (int round = 0; round <= runs; ++round) {
    for (size_t f = 0; f < banks.size(); ++f) {
      for (size_t i = 0; i < images.size(); ++i) {
        const double t = once(f, i);
        if (round > 0) times[f * images.size() + i].push_back(t);
      }
    }
  }
  int one = -1, four = -1;
  for (size_t i = 0; i < megapixels.size(); ++i) {
    if (megapixels[i] == 1.0) one = static_cast<int>(i);
    if (megapixels[i] == 4.0) four = static_cast<int>(i);
  }
  std::vector<BenchRow> rows;
  for (size_t f = 0; f < banks.size(); ++f) {
    BenchRow row;
    row.footprint_side = footprint_sides[f];
    if (one >= 0 && four >= 0) {
      // Both sizes run back to back within a round, so the per-round ratio
      // cancels machine-speed drift that a ratio of medians would keep.
      const std::vector<double>& t1 = times[f * images.size() + one];
      const std::vector<double>& t4 = times[f * images.size() + four];
      std::vector<double> ratio(runs);
      for (int r = 0; r < runs; ++r) ratio[r] = t4[r] / t1[r];
      std::nth_element(ratio.begin(), ratio.begin() + runs / 2, ratio.end());
      row.linearity = ratio[runs / 2];
    }
    if (f > 0) {
      // Adjacent footprints also run back to back, so the ordering is judged
      // per round for the same reason.
      std::vector<double> ratio(runs);
      for (int r = 0; r < runs; ++r) {
        double cur = 0.0, prev = 0.0;
        for (size_t i = 0; i < images.size(); ++i) {
          cur += times[f * images.size() + i][r];
          prev += times[(f - 1) * images.size() + i][r];
        }
        ratio[r] = cur / prev;
      }
      std::nth_element(ratio.begin(), ratio.begin() + runs / 2, ratio.end());
      row.cost_ratio = ratio[runs / 2];
    }
    rows.push_back(std::move(row));
  }
  for (size_t f = 0; f < banks.size(); ++f) {
    BenchRow& row = rows[f];
    for (size_t i = 0; i < images.size(); ++i) {
      std::vector<double>& t = times[f * images.size() + i];
      std::nth_element(t.begin(), t.begin() + runs / 2, t.end());
      const double median = t[runs / 2];
      const double mp = static_cast<double>(images[i].size()) * 1e-6;
      row.megapixels.push_back(mp);
      row.seconds.push_back(median);
      row.mp_per_s.push_back(mp / median);
    }
  }
  return rows;
}

std::string FormatBenchmark(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  char buf[128];
  out << "# footprint megapixels seconds mp_per_s\n";
  for (const BenchRow& r : rows) {
    for (size_t i = 0; i < r.megapixels.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%dx%d %.4f %.6f %.2f\n", r.footprint_side,
                    r.footprint_side, r.megapixels[i], r.seconds[i],
                    r.mp_per_s[i]);
      out << buf;
    }
  }
  for (const BenchRow& r : rows) {
    if (r.linearity > 0.0) {
      std::snprintf(buf, sizeof buf, "# linearity %dx%d t(4MP)/t(1MP)=%.3f\n",
                    r.footprint_side, r.footprint_side, r.linearity);
      out << buf;
    }
  }
  for (size_t f = 1; f < rows.size(); ++f) {
    std::snprintf(buf, sizeof buf, "# cost %dx%d / %dx%d=%.3f\n",
                  rows[f].footprint_side, rows[f].footprint_side,
                  rows[f - 1].footprint_side, rows[f - 1].footprint_side,
                  rows[f].cost_ratio);
    out << buf;
  }
  return out.str();
}

}  // namespace blade
