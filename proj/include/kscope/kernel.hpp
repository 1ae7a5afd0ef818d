#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kscope/seqgen.hpp"

namespace kscope {

// n -> t(k^l n + r) for n = 1..M.
struct KernelElement {
  int l = 0;
  std::int64_t r = 0;
  std::vector<std::int64_t> prefix;
};

struct Verdict {
  enum class Kind { saturated, growing, inconclusive };
  Kind kind = Kind::inconclusive;
  int depth = -1;          // saturation depth (saturated only)
  std::int64_t size = 0;   // distinct count or rank at saturation

  std::string describe() const;
};

// Saturated at the first d >= 1 where depths d and d+1 add nothing;
// growing if the sequence strictly increases through its last depth.
Verdict classify_growth(std::span<const std::int64_t> per_depth);

struct KernelProfile {
  int k = 2;
  std::int64_t M = 0;
  int L = 0;
  std::vector<std::int64_t> distinct_counts;
  Verdict verdict;
};

struct RankProfile {
  int k = 2;
  std::int64_t M = 0;
  int L = 0;
  std::vector<std::int64_t> ranks;
  Verdict verdict;
};

struct DensityEstimate {
  std::int64_t X = 0;
  double density = 0.0;
  std::int64_t numerator = 0;    // best p/q with q <= 64
  std::int64_t denominator = 1;
  double residual = 0.0;         // |density - p/q|
};

// Smallest table bound that holds every element of depth <= L with window M.
std::int64_t required_table_size(int k, int L, std::int64_t M);

// Throws CapacityError naming the required N when the table is too short.
KernelElement kernel_element(const ValueTable& t, int k, int l, std::int64_t r, std::int64_t M);

// Exact-content dedup of prefixes; hash collisions fall back to full comparison.
class PrefixIndex {
 public:
  // Index of an equal prefix already present, or nullopt.
  std::optional<std::size_t> find(const std::vector<std::int64_t>& prefix) const;
  // Inserts if new; returns (index, inserted).
  std::pair<std::size_t, bool> insert(std::vector<std::int64_t> prefix);
  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<std::int64_t>& operator[](std::size_t i) const { return items_[i]; }

 private:
  static std::uint64_t hash(const std::vector<std::int64_t>& v);
  std::unordered_multimap<std::uint64_t, std::size_t> buckets_;
  std::vector<std::vector<std::int64_t>> items_;
};

KernelProfile kernel_profile(const ValueTable& t, int k, int L, std::int64_t M);
RankProfile rank_profile(const ValueTable& t, int k, int L, std::int64_t M);

std::vector<DensityEstimate> value_density(const ValueTable& t, std::int64_t v,
                                           std::span<const std::int64_t> lengths);

}  // namespace kscope
