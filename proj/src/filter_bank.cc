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

#include "blade/filter_bank.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace blade {

bool FilterStats::operator==(const FilterStats& o) const {
  return count == o.count &&
         std::bit_cast<uint32_t>(residual_variance) ==
             std::bit_cast<uint32_t>(o.residual_variance) &&
         stddev.size() == o.stddev.size() &&
         std::memcmp(stddev.data(), o.stddev.data(),
                     stddev.size() * sizeof(float)) == 0;
}

uint32_t BucketFlags(const FilterStats& stats, int filter_length) {
  uint32_t flags = 0;
  if (stats.count == 0) flags |= kBucketEmpty;
  if (stats.count < 2ull * static_cast<uint64_t>(filter_length)) {
    flags |= kBucketUndersampled;
  }
  if (std::isnan(stats.residual_variance)) flags |= kBucketUnreliableVariance;
  return flags;
}

FilterBank::FilterBank(const QuantizerSpec& quantizer,
                       const Footprint& footprint, int arity, int num_outputs)
    : quantizer_(quantizer),
      footprint_(footprint),
      arity_(arity),
      num_outputs_(num_outputs) {
  quantizer_.Validate();
  if (arity < 1 || arity > 3) {
    throw std::invalid_argument("bank arity must be 1, 2 or 3");
  }
  if (num_outputs != 1 && num_outputs != 3) {
    throw std::invalid_argument("bank must have 1 or 3 output banks");
  }
  if (num_outputs == 3 && arity != 3) {
    throw std::invalid_argument("color banks read RGB patches (arity 3)");
  }
  coefficients_.assign(static_cast<size_t>(num_outputs_) * num_filters() *
                           filter_length(),
                       0.0f);
}

size_t FilterBank::Offset(int output, int k) const {
  if (output < 0 || output >= num_outputs_ || k < 0 || k >= num_filters()) {
    throw std::out_of_range("filter index out of range");
  }
  return (static_cast<size_t>(output) * num_filters() + k) * filter_length();
}

std::span<float> FilterBank::filter(int output, int k) {
  return {coefficients_.data() + Offset(output, k),
          static_cast<size_t>(filter_length())};
}

std::span<const float> FilterBank::filter(int output, int k) const {
  return {coefficients_.data() + Offset(output, k),
          static_cast<size_t>(filter_length())};
}

const FilterStats& FilterBank::stats(int output, int k) const {
  if (!stats_) throw std::logic_error("filter bank carries no statistics");
  Offset(output, k);
  return (*stats_)[static_cast<size_t>(output) * num_filters() + k];
}

void FilterBank::set_stats(std::vector<FilterStats> stats) {
  if (stats.size() != static_cast<size_t>(num_outputs_) * num_filters()) {
    throw std::invalid_argument("need one FilterStats per filter");
  }
  for (const auto& s : stats) {
    if (s.stddev.size() != static_cast<size_t>(filter_length())) {
      throw std::invalid_argument("stddev vector has wrong length");
    }
  }
  stats_ = std::move(stats);
}

bool FilterBank::operator==(const FilterBank& o) const {
  return quantizer_ == o.quantizer_ && footprint_.side() == o.footprint_.side() &&
         arity_ == o.arity_ && num_outputs_ == o.num_outputs_ &&
         coefficients_.size() == o.coefficients_.size() &&
         std::memcmp(coefficients_.data(), o.coefficients_.data(),
                     coefficients_.size() * sizeof(float)) == 0 &&
         stats_ == o.stats_;
}

FilterBank MakeIdentityBank(const QuantizerSpec& q, const Footprint& fp,
                            int arity, int num_outputs) {
  FilterBank bank(q, fp, arity, num_outputs);
  for (int o = 0; o < num_outputs; ++o) {
    const int stream = num_outputs == 3 ? o : 0;
    for (int k = 0; k < bank.num_filters(); ++k) {
      bank.filter(o, k)[stream * fp.size() + fp.center_index()] = 1.0f;
    }
  }
  return bank;
}

FilterBank BlendWithIdentity(const FilterBank& bank, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("blend alpha must lie in [0, 1]");
  }
  if (bank.arity() != 1) {
    throw std::invalid_argument("identity blending needs a single-stream "
                                "gray bank");
  }
  FilterBank out(bank.quantizer(), bank.footprint(), 1, 1);
  const int center = bank.footprint().center_index();
  for (int k = 0; k < bank.num_filters(); ++k) {
    auto src = bank.filter(0, k);
    auto dst = out.filter(0, k);
    for (size_t j = 0; j < src.size(); ++j) {
      const double delta = static_cast<int>(j) == center ? 1.0 : 0.0;
      dst[j] = static_cast<float>((1.0 - alpha) * delta + alpha * src[j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary format, little-endian:
//   "BLDE" u32 version u8 arity u8 outputs u16 side u16 O u16 S u16 C
//   f32 s_lo s_hi c_lo c_hi rho
//   per output: K*D f32 coeffs, K f32 residual var, K u64 count,
//               K*D f32 stddev
// A bank without statistics stores residual variance -1 for every filter.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'B', 'L', 'D', 'E'};
constexpr size_t kHeaderSize = 4 + 4 + 1 + 1 + 2 * 4 + 4 * 5;
constexpr float kNoStatsMarker = -1.0f;

class Writer {
 public:
  void Bytes(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void Uint(T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
  }
  void F32(float v) { Uint(std::bit_cast<uint32_t>(v)); }
  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}

  void Require(size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw FormatError(FormatError::Kind::kTruncated,
                        std::string("filter bank truncated in ") + what +
                            ": expected " + std::to_string(pos_ + n) +
                            " bytes, got " + std::to_string(in_.size()));
    }
  }
  template <typename T>
  T Uint() {
    Require(sizeof(T), "header");
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }
  float F32() { return std::bit_cast<float>(Uint<uint32_t>()); }
  size_t pos() const { return pos_; }
  void Skip(size_t n) { pos_ += n; }
  const uint8_t* here() const { return in_.data() + pos_; }

 private:
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> Serialize(const FilterBank& bank) {
  Writer w;
  const QuantizerSpec& q = bank.quantizer();
  w.Bytes(kMagic, 4);
  w.Uint<uint32_t>(kBankFormatVersion);
  w.Uint<uint8_t>(static_cast<uint8_t>(bank.arity()));
  w.Uint<uint8_t>(static_cast<uint8_t>(bank.num_outputs()));
  w.Uint<uint16_t>(static_cast<uint16_t>(bank.footprint().side()));
  w.Uint<uint16_t>(static_cast<uint16_t>(q.num_orientations));
  w.Uint<uint16_t>(static_cast<uint16_t>(q.num_strength));
  w.Uint<uint16_t>(static_cast<uint16_t>(q.num_coherence));
  w.F32(q.strength_lo);
  w.F32(q.strength_hi);
  w.F32(q.coherence_lo);
  w.F32(q.coherence_hi);
  w.F32(q.rho);
  const int K = bank.num_filters();
  const int D = bank.filter_length();
  for (int o = 0; o < bank.num_outputs(); ++o) {
    for (int k = 0; k < K; ++k) {
      for (float v : bank.filter(o, k)) w.F32(v);
    }
    for (int k = 0; k < K; ++k) {
      w.F32(bank.has_stats() ? bank.stats(o, k).residual_variance
                             : kNoStatsMarker);
    }
    for (int k = 0; k < K; ++k) {
      w.Uint<uint64_t>(bank.has_stats() ? bank.stats(o, k).count : 0);
    }
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < D; ++j) {
        w.F32(bank.has_stats() ? bank.stats(o, k).stddev[j] : 0.0f);
      }
    }
  }
  return w.Take();
}

FilterBank DeserializePrefix(std::span<const uint8_t> bytes,
                             size_t* consumed) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatError::Kind::kBadMagic,
                      "not a filter bank: missing BLDE magic");
  }
  Reader r(bytes);
  r.Skip(4);
  r.Require(kHeaderSize - 4, "header");
  const uint32_t version = r.Uint<uint32_t>();
  if (version != kBankFormatVersion) {
    throw FormatError(FormatError::Kind::kVersionMismatch,
                      "unsupported filter bank version " +
                          std::to_string(version) + " (expected " +
                          std::to_string(kBankFormatVersion) + ")");
  }
  const int arity = r.Uint<uint8_t>();
  const int outputs = r.Uint<uint8_t>();
  const int side = r.Uint<uint16_t>();
  QuantizerSpec q;
  q.num_orientations = r.Uint<uint16_t>();
  q.num_strength = r.Uint<uint16_t>();
  q.num_coherence = r.Uint<uint16_t>();
  q.strength_lo = r.F32();
  q.strength_hi = r.F32();
  q.coherence_lo = r.F32();
  q.coherence_hi = r.F32();
  q.rho = r.F32();

  auto inconsistent = [](const std::string& why) {
    return FormatError(FormatError::Kind::kInconsistent,
                       "inconsistent filter bank header: " + why);
  };
  if (arity < 1 || arity > 3) {
    throw inconsistent("arity " + std::to_string(arity));
  }
  if (outputs != 1 && outputs != 3) {
    throw inconsistent("output bank count " + std::to_string(outputs));
  }
  if (outputs == 3 && arity != 3) {
    throw inconsistent("color bank with arity " + std::to_string(arity));
  }
  if (side < 1 || side % 2 == 0) {
    throw inconsistent("footprint side " + std::to_string(side));
  }
  try {
    q.Validate();
  } catch (const std::invalid_argument& e) {
    throw inconsistent(e.what());
  }

  FilterBank bank(q, Footprint(side), arity, outputs);
  const size_t K = bank.num_filters();
  const size_t D = bank.filter_length();
  const size_t per_output = K * D * 4 + K * 4 + K * 8 + K * D * 4;
  r.Require(per_output * outputs, "filter data");

  std::vector<FilterStats> stats(outputs * K);
  bool any_stats = false;
  for (int o = 0; o < outputs; ++o) {
    for (size_t k = 0; k < K; ++k) {
      for (float& v : bank.filter(o, static_cast<int>(k))) v = r.F32();
    }
    for (size_t k = 0; k < K; ++k) {
      const float var = r.F32();
      stats[o * K + k].residual_variance = var;
      if (std::bit_cast<uint32_t>(var) !=
          std::bit_cast<uint32_t>(kNoStatsMarker)) {
        any_stats = true;
      }
    }
    for (size_t k = 0; k < K; ++k) stats[o * K + k].count = r.Uint<uint64_t>();
    for (size_t k = 0; k < K; ++k) {
      auto& sd = stats[o * K + k].stddev;
      sd.resize(D);
      for (float& v : sd) v = r.F32();
    }
  }
  if (any_stats) bank.set_stats(std::move(stats));
  if (consumed) *consumed = r.pos();
  return bank;
}

FilterBank Deserialize(std::span<const uint8_t> bytes) {
  size_t consumed = 0;
  FilterBank bank = DeserializePrefix(bytes, &consumed);
  if (consumed != bytes.size()) {
    throw FormatError(FormatError::Kind::kInconsistent,
                      "filter bank has " +
                          std::to_string(bytes.size() - consumed) +
                          " trailing bytes; header implies " +
                          std::to_string(consumed) + " bytes");
  }
  return bank;
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

void SaveBank(const std::filesystem::path& path, const FilterBank& bank) {
  WriteFileBytes(path, Serialize(bank));
}

FilterBank LoadBank(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return Deserialize(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Montage
// ---------------------------------------------------------------------------

namespace {

struct MontageLayout {
  int n;
  int cols;
  int rows;
  int block_w() const { return (n + 1) * cols + 1; }
  int block_h() const { return (n + 1) * rows + 1; }
};

// Tile origin for filter k inside a block.
Pixel TileOrigin(const MontageLayout& m, const QuantizerSpec& q, int k) {
  const Bins b = UnflattenIndex(k, q);
  const int row = b.strength * q.num_coherence + b.coherence;
  return {1 + b.orientation * (m.n + 1), 1 + row * (m.n + 1)};
}

// Tap value for stream s of filter (o, k) in the chosen mode.
float TapValue(const FilterBank& bank, MontageMode mode, int o, int k,
               int s, int j) {
  const int idx = s * bank.footprint().size() + j;
  if (mode == MontageMode::kCoefficients) return bank.filter(o, k)[idx];
  return bank.stats(o, k).stddev[idx];
}

float StddevScale(const FilterBank& bank) {
  float peak = 0.0f;
  for (int o = 0; o < bank.num_outputs(); ++o) {
    for (int k = 0; k < bank.num_filters(); ++k) {
      for (float v : bank.stats(o, k).stddev) {
        if (std::isfinite(v)) peak = std::max(peak, v);
      }
    }
  }
  return peak;
}

// Coefficient tiles: each tile scaled by its own peak magnitude with zero
// at mid-gray. Stddev tiles: one shared scale, zero black, NaN white, so
// poorly trained filters stand out against the rest.
float MapTap(float v, MontageMode mode, float scale) {
  if (mode == MontageMode::kCoefficients) {
    if (scale == 0.0f) return 127.5f;
    return 127.5f + 127.5f * v / scale;
  }
  if (!std::isfinite(v)) return 255.0f;
  return scale > 0.0f ? 255.0f * v / scale : 0.0f;
}

}  // namespace

AnyImage RenderMontage(const FilterBank& bank, MontageMode mode) {
  if (mode == MontageMode::kStddev && !bank.has_stats()) {
    throw std::invalid_argument("stddev montage needs a trained bank with "
                                "statistics");
  }
  const QuantizerSpec& q = bank.quantizer();
  const int n = bank.footprint().side();
  const int N = bank.footprint().size();
  const MontageLayout m{n, q.num_orientations, q.num_strength * q.num_coherence};
  const float global = mode == MontageMode::kStddev ? StddevScale(bank) : 0.0f;

  auto tile_scale = [&](int o, int k, int first_stream, int num_streams) {
    if (mode == MontageMode::kStddev) return global;
    float peak = 0.0f;
    for (int s = first_stream; s < first_stream + num_streams; ++s) {
      for (int j = 0; j < N; ++j) {
        peak = std::max(peak, std::abs(TapValue(bank, mode, o, k, s, j)));
      }
    }
    return peak;
  };

  if (bank.is_color()) {
    // One block per output bank; tile pixel color = (R, G, B) input taps.
    const int h = m.block_h() * 3 - 2;
    ImageRGB out(m.block_w(), h, 0.0f);
    for (int o = 0; o < 3; ++o) {
      const int y0 = o * (m.block_h() - 1);
      for (int k = 0; k < bank.num_filters(); ++k) {
        const Pixel t = TileOrigin(m, q, k);
        const float scale = tile_scale(o, k, 0, 3);
        for (int j = 0; j < N; ++j) {
          for (int c = 0; c < 3; ++c) {
            out[c].at(t.x + j % n, y0 + t.y + j / n) =
                MapTap(TapValue(bank, mode, o, k, c, j), mode, scale);
          }
        }
      }
    }
    return out;
  }

  const int streams = bank.arity();
  const int h = m.block_h() * streams - (streams - 1);
  ImageGray out(m.block_w(), h, 0.0f);
  for (int s = 0; s < streams; ++s) {
    const int y0 = s * (m.block_h() - 1);
    for (int k = 0; k < bank.num_filters(); ++k) {
      const Pixel t = TileOrigin(m, q, k);
      const float scale = tile_scale(0, k, s, 1);
      for (int j = 0; j < N; ++j) {
        out.at(t.x + j % n, y0 + t.y + j / n) =
            MapTap(TapValue(bank, mode, 0, k, s, j), mode, scale);
      }
    }
  }
  return out;
}

}  // namespace blade
