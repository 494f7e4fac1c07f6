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

#include "fecam/hdc_genome.hpp"

#include <algorithm>
#include <bit>
#include <istream>

#include <fmt/format.h>

#include "fecam/errors.hpp"
#include "fecam/random.hpp"

namespace fecam::hdc {

Hypervector::Hypervector(std::size_t dimension)
    : dimension_(dimension), words_((dimension + 63) / 64, 0) {}

void Hypervector::set_bit(std::size_t i, bool value) {
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  auto& w = words_.at(i / 64);
  w = value ? (w | m) : (w & ~m);
}

std::size_t Hypervector::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Hypervector Hypervector::rotated(std::size_t r) const {
  // Word-level rotation; valid because D is a multiple of 64.
  const std::size_t n = words_.size();
  Hypervector out(dimension_);
  if (n == 0) return out;
  r %= dimension_;
  const std::size_t w = r / 64;
  const unsigned b = r % 64;
  for (std::size_t o = 0; o < n; ++o) {
    const std::uint64_t hi = words_[(o + n - w) % n];
    const std::uint64_t lo = words_[(o + 2 * n - w - 1) % n];
    out.words_[o] = b == 0 ? hi : (hi << b) | (lo >> (64 - b));
  }
  return out;
}

Hypervector& Hypervector::operator^=(const Hypervector& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_.at(i);
  return *this;
}

std::size_t hamming_distance(const Hypervector& a, const Hypervector& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.segments(); ++i)
    n += static_cast<std::size_t>(std::popcount(a.words()[i] ^ b.words().at(i)));
  return n;
}

std::optional<int> nucleotide_index(char c) noexcept {
  switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: return std::nullopt;
  }
}

const Hypervector& ItemMemory::operator[](char nucleotide) const {
  const auto idx = nucleotide_index(nucleotide);
  if (!idx) throw EncodingError(fmt::format("invalid nucleotide '{}'", nucleotide), 0);
  return base[static_cast<std::size_t>(*idx)];
}

ItemMemory build_item_memory(std::uint64_t seed, std::size_t dimension) {
  if (dimension < 64 || !std::has_single_bit(dimension))
    throw ConfigError(fmt::format("hypervector dimension must be a power of two >= 64 (got {})", dimension));
  ItemMemory im;
  im.seed = seed;
  im.dimension = dimension;
  for (std::size_t i = 0; i < 4; ++i) {
    CounterRng rng(derive_seed(seed, i));
    Hypervector hv(dimension);
    for (auto& w : hv.words()) w = rng.next_u64();
    im.base[i] = std::move(hv);
  }
  return im;
}

Hypervector encode_kmer(std::string_view seq, const ItemMemory& im) {
  Hypervector h(im.dimension);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto idx = nucleotide_index(seq[i]);
    if (!idx)
      throw EncodingError(fmt::format("invalid nucleotide '{}' at position {}", seq[i], i), i);
    h ^= im.base[static_cast<std::size_t>(*idx)].rotated(i);
  }
  return h;
}

KmerEncoder::KmerEncoder(const ItemMemory& im, std::size_t k)
    : k_(k), dimension_(im.dimension), rotated_(k) {
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t n = 0; n < 4; ++n) rotated_[i][n] = im.base[n].rotated(i);
}

Hypervector KmerEncoder::encode(std::string_view seq) const {
  if (seq.size() != k_)
    throw QueryError(fmt::format("sequence length {} does not match k = {}", seq.size(), k_));
  Hypervector h(dimension_);
  for (std::size_t i = 0; i < k_; ++i) {
    const auto idx = nucleotide_index(seq[i]);
    if (!idx)
      throw EncodingError(fmt::format("invalid nucleotide '{}' at position {}", seq[i], i), i);
    h ^= rotated_[i][static_cast<std::size_t>(*idx)];
  }
  return h;
}

namespace {

BinaryCamBank make_bank(const IndexOptions& o) {
  const double guard = o.m_guard.value_or(default_guard(o.params));
  return BinaryCamBank(o.params, o.cell, make_ladder(o.params, guard), kSegmentWidth, o.device_seed);
}

}  // namespace

GenomeIndex::GenomeIndex(std::string_view reference, std::size_t k, std::size_t stride,
                         std::size_t dimension, IndexOptions options)
    : k_(k),
      stride_(stride),
      dimension_(dimension),
      items_(build_item_memory(options.item_seed, dimension)),
      encoder_(items_, k),
      bank_(make_bank(options)) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (reference.size() < k)
    throw ConfigError(fmt::format("reference of {} bases is shorter than k = {}", reference.size(), k));
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (!nucleotide_index(reference[i]))
      throw EncodingError(fmt::format("invalid nucleotide '{}' at reference offset {}", reference[i], i), i);
  }
  const std::size_t count = (reference.size() - k) / stride + 1;
  offsets_.reserve(count);
  bank_.reserve(count * segments_per_entry());
  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t off = e * stride;
    offsets_.push_back(off);
    const Hypervector hv = encoder_.encode(reference.substr(off, k));
    for (auto w : hv.words()) bank_.append(w);
  }
}

Hypervector GenomeIndex::reassemble(std::size_t entry) const {
  if (entry >= entries()) throw QueryError(fmt::format("entry {} out of range", entry));
  Hypervector hv(dimension_);
  const std::size_t s = segments_per_entry();
  for (std::size_t j = 0; j < s; ++j) hv.words()[j] = bank_.stored(entry * s + j);
  return hv;
}

int GenomeIndex::cam_distance(std::size_t entry, const Hypervector& query) const {
  const std::size_t s = segments_per_entry();
  int total = 0;
  for (std::size_t j = 0; j < s; ++j) total += bank_.search_decode(entry * s + j, query.segment(j)).hamming;
  return total;
}

std::vector<int> GenomeIndex::cam_distances(const Hypervector& query) const {
  if (query.dimension() != dimension_)
    throw QueryError(fmt::format("query dimension {} does not match index dimension {}",
                                 query.dimension(), dimension_));
  std::vector<int> out(entries());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = cam_distance(e, query);
  return out;
}

QueryResult query(const GenomeIndex& index, std::string_view pattern, int threshold) {
  if (pattern.size() != index.k())
    throw QueryError(fmt::format("pattern length {} does not match k = {}", pattern.size(), index.k()));
  if (threshold < 0 || static_cast<std::size_t>(threshold) > index.dimension())
    throw QueryError(fmt::format("threshold {} outside [0, {}]", threshold, index.dimension()));
  const Hypervector hv = index.encoder().encode(pattern);
  const std::vector<int> dist = index.cam_distances(hv);
  QueryResult r;
  r.threshold = threshold;
  for (std::size_t e = 0; e < dist.size(); ++e)
    if (dist[e] <= threshold) r.hits.push_back({index.offset(e), dist[e]});
  std::sort(r.hits.begin(), r.hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.offset < b.offset;
  });
  return r;
}

std::vector<std::size_t> oracle_match(std::string_view reference, std::string_view pattern) {
  std::vector<std::size_t> out;
  if (pattern.empty() || pattern.size() > reference.size()) return out;
  for (std::size_t i = 0; i + pattern.size() <= reference.size(); ++i) {
    bool equal = true;
    for (std::size_t j = 0; j < pattern.size() && equal; ++j) equal = reference[i + j] == pattern[j];
    if (equal) out.push_back(i);
  }
  return out;
}

namespace {

char to_upper_base(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }

}  // namespace

std::string read_fasta(std::istream& in) {
  std::string seq;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '>' || line.front() == ';') continue;
    for (char c : line) {
      if (c == ' ' || c == '\t') continue;
      const char u = to_upper_base(c);
      if (!nucleotide_index(u))
        throw EncodingError(fmt::format("invalid nucleotide '{}' at sequence offset {} (line {})",
                                        c, seq.size(), line_no),
                            seq.size());
      seq.push_back(u);
    }
  }
  return seq;
}

std::vector<std::string> read_patterns(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::string p;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char u = to_upper_base(line[i]);
      if (!nucleotide_index(u))
        throw EncodingError(fmt::format("invalid nucleotide '{}' at position {} of pattern {}",
                                        line[i], i, out.size()),
                            i);
      p.push_back(u);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string random_sequence(std::size_t length, std::uint64_t seed) {
  static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  CounterRng rng(derive_seed(seed));
  std::string s(length, 'A');
  for (auto& c : s) c = kBases[rng.next_u64() >> 62];
  return s;
}

}  // namespace fecam::hdc
