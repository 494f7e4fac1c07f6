/*
 * Copyright 2026 The fecam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fecam/binary_bank.hpp"
#include "fecam/device_model.hpp"

namespace fecam::hdc {

/// Dense binary vector; bit i lives in word i / 64.
class Hypervector {
 public:
  Hypervector() = default;
  explicit Hypervector(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t segments() const noexcept { return words_.size(); }
  std::uint64_t segment(std::size_t i) const { return words_.at(i); }
  std::vector<std::uint64_t>& words() noexcept { return words_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  bool bit(std::size_t i) const { return (words_.at(i / 64) >> (i % 64)) & 1U; }
  void set_bit(std::size_t i, bool value);
  std::size_t popcount() const noexcept;

  /// Cyclic rotation: bit j moves to (j + r) mod D.
  Hypervector rotated(std::size_t r) const;
  Hypervector& operator^=(const Hypervector& other);

  bool operator==(const Hypervector&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const Hypervector& a, const Hypervector& b);

/// Random base vectors for A, C, G, T.
struct ItemMemory {
  std::uint64_t seed = 0;
  std::size_t dimension = 0;
  std::array<Hypervector, 4> base;

  const Hypervector& operator[](char nucleotide) const;
};

/// D must be a power of two and at least 64.
ItemMemory build_item_memory(std::uint64_t seed, std::size_t dimension);

/// 0..3 for A, C, G, T (either case); nullopt otherwise.
std::optional<int> nucleotide_index(char c) noexcept;

/// XOR over positions i of item(seq[i]) rotated by i.
Hypervector encode_kmer(std::string_view seq, const ItemMemory& im);

/// Reusable encoder with the k rotated item vectors cached.
class KmerEncoder {
 public:
  KmerEncoder(const ItemMemory& im, std::size_t k);
  std::size_t k() const noexcept { return k_; }
  Hypervector encode(std::string_view seq) const;

 private:
  std::size_t k_;
  std::size_t dimension_;
  std::vector<std::array<Hypervector, 4>> rotated_;  // [position][nucleotide]
};

/// Behaviour of the CAM banks behind an index.
/// Index banks default to variation-free devices: a noisy search costs one
/// device solve per cell per query. Set params.sigma_vth for noisy mode.
inline DeviceParams ideal_binary_params() {
  DeviceParams p = DeviceParams::binary_defaults();
  p.sigma_vth = 0.0;
  return p;
}

struct IndexOptions {
  DeviceParams params = ideal_binary_params();
  CellConfig cell;
  std::optional<double> m_guard;
  std::uint64_t item_seed = 7;
  std::uint64_t device_seed = 11;
};

inline constexpr std::size_t kSegmentWidth = 64;

/// Every reference window of length k, encoded and stored across
/// D / 64 physical CAM words of 64 cells each.
class GenomeIndex {
 public:
  GenomeIndex(std::string_view reference, std::size_t k, std::size_t stride,
              std::size_t dimension, IndexOptions options = {});

  std::size_t k() const noexcept { return k_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t entries() const noexcept { return offsets_.size(); }
  std::size_t segments_per_entry() const noexcept { return dimension_ / kSegmentWidth; }
  std::size_t offset(std::size_t entry) const { return offsets_.at(entry); }
  const ItemMemory& item_memory() const noexcept { return items_; }
  const KmerEncoder& encoder() const noexcept { return encoder_; }
  const BinaryCamBank& bank() const noexcept { return bank_; }

  /// Concatenates the stored segments of one entry.
  Hypervector reassemble(std::size_t entry) const;

  /// Sum of per-segment decoded Hamming distances from the CAM.
  int cam_distance(std::size_t entry, const Hypervector& query) const;
  /// cam_distance for every entry, in entry order.
  std::vector<int> cam_distances(const Hypervector& query) const;

 private:
  std::size_t k_;
  std::size_t stride_;
  std::size_t dimension_;
  ItemMemory items_;
  KmerEncoder encoder_;
  BinaryCamBank bank_;
  std::vector<std::size_t> offsets_;
};

inline GenomeIndex build_index(std::string_view reference, std::size_t k, std::size_t stride,
                               std::size_t dimension, IndexOptions options = {}) {
  return GenomeIndex(reference, k, stride, dimension, std::move(options));
}

struct Hit {
  std::size_t offset = 0;
  int distance = 0;
  bool operator==(const Hit&) const = default;
};

struct QueryResult {
  std::vector<Hit> hits;  ///< by distance, then offset
  int threshold = 0;
};

QueryResult query(const GenomeIndex& index, std::string_view pattern, int threshold);

/// Naive exact substring scan over every offset.
std::vector<std::size_t> oracle_match(std::string_view reference, std::string_view pattern);

/// FASTA records concatenated; '>' and ';' lines skipped, bases uppercased.
/// Throws EncodingError with the offending sequence offset and line.
std::string read_fasta(std::istream& in);

/// One pattern per line, blank lines skipped, bases uppercased.
std::vector<std::string> read_patterns(std::istream& in);

/// Uniform random ACGT string.
std::string random_sequence(std::size_t length, std::uint64_t seed);

}  // namespace fecam::hdc
