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

#ifndef BLADE_FILTER_BANK_H_
#define BLADE_FILTER_BANK_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "blade/image.h"
#include "blade/image_io.h"
#include "blade/quantizer.h"

namespace blade {

// Training statistics of one filter.
struct FilterStats {
  uint64_t count = 0;            // M, samples that selected this filter
  float residual_variance = 0;   // NaN when M <= D or the solve fell back
  std::vector<float> stddev;     // sqrt(diag(Sigma_h)), length D

  bool operator==(const FilterStats& o) const;
};

enum BucketFlag : uint32_t {
  kBucketEmpty = 1u << 0,               // M == 0
  kBucketUndersampled = 1u << 1,        // M < 2D
  kBucketUnreliableVariance = 1u << 2,  // residual variance is NaN
};
uint32_t BucketFlags(const FilterStats& stats, int filter_length);

// K = O*S*C filters of length D = arity * N, per output bank. Gray banks
// have one output bank; color banks have three (R, G, B), each reading the
// full RGB patch (arity 3).
class FilterBank {
 public:
  FilterBank(const QuantizerSpec& quantizer, const Footprint& footprint,
             int arity = 1, int num_outputs = 1);

  const QuantizerSpec& quantizer() const { return quantizer_; }
  const Footprint& footprint() const { return footprint_; }
  int arity() const { return arity_; }
  int num_outputs() const { return num_outputs_; }
  int num_filters() const { return quantizer_.num_filters(); }
  int filter_length() const { return arity_ * footprint_.size(); }
  bool is_color() const { return num_outputs_ == 3; }

  std::span<float> filter(int output, int k);
  std::span<const float> filter(int output, int k) const;
  std::span<const float> coefficients() const { return coefficients_; }
  std::span<float> coefficients() { return coefficients_; }

  bool has_stats() const { return stats_.has_value(); }
  const FilterStats& stats(int output, int k) const;
  void set_stats(std::vector<FilterStats> stats);
  void clear_stats() { stats_.reset(); }

  bool operator==(const FilterBank& o) const;

 private:
  size_t Offset(int output, int k) const;

  QuantizerSpec quantizer_;
  Footprint footprint_;
  int arity_;
  int num_outputs_;
  std::vector<float> coefficients_;
  std::optional<std::vector<FilterStats>> stats_;
};

// Every filter (of every stream/output) is the center delta on the stream
// that carries the output channel: stream 0 for gray, stream c for color
// output c.
FilterBank MakeIdentityBank(const QuantizerSpec& q, const Footprint& fp,
                            int arity = 1, int num_outputs = 1);

// (1 - alpha) * delta + alpha * h per filter; statistics are dropped.
FilterBank BlendWithIdentity(const FilterBank& bank, double alpha);

class FormatError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kVersionMismatch, kTruncated, kInconsistent };
  FormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr uint32_t kBankFormatVersion = 1;

std::vector<uint8_t> Serialize(const FilterBank& bank);
// Parses one bank record from the front of `bytes`; `consumed` receives the
// record length. Trailing bytes are left to the caller.
FilterBank DeserializePrefix(std::span<const uint8_t> bytes, size_t* consumed);
// Parses exactly one record; trailing bytes are an inconsistency.
FilterBank Deserialize(std::span<const uint8_t> bytes);

void SaveBank(const std::filesystem::path& path, const FilterBank& bank);
FilterBank LoadBank(const std::filesystem::path& path);
std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);

enum class MontageMode { kCoefficients, kStddev };

// Tiles of n x n, one column per orientation and one row per
// (strength, coherence) pair, separated by 1-pixel black lines. Gray banks
// with several input streams stack one block per stream; color banks
// stack one block per output bank with RGB tiles.
AnyImage RenderMontage(const FilterBank& bank, MontageMode mode);

}  // namespace blade

#endif  // BLADE_FILTER_BANK_H_
