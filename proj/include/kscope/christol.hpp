#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kscope/seqgen.hpp"

namespace kscope {

// Shortest window on which two series may be declared equal.
inline constexpr std::int64_t kMinWindow = 32;

// Truncated power series over F_p. coeffs[0] is always 0 for table-derived series.
struct FpSeries {
  int p = 2;
  std::vector<std::uint8_t> coeffs;  // size == reliable_len
  std::int64_t reliable_len = 0;

  friend bool operator==(const FpSeries&, const FpSeries&) = default;
};

bool is_prime(std::int64_t n);

// coeffs[n] = t(n) mod p for 1 <= n < N. DomainError if p is not prime,
// CapacityError if N exceeds the table.
FpSeries series_from_table(const ValueTable& t, int p, std::int64_t N);

// a_n -> a_{pn+r}. CapacityError when fewer than kMinWindow coefficients survive.
FpSeries cartier_section(const FpSeries& s, int r);

// Coefficient-wise equality on the common window; nullopt if that window is below kMinWindow.
std::optional<bool> equal_on_window(const FpSeries& a, const FpSeries& b);

struct OrbitReport {
  enum class Kind { finite, growing, exhausted };
  Kind kind = Kind::exhausted;
  std::int64_t size = 0;    // distinct elements found
  int depth = 0;            // deepest section level reached
  std::int64_t window = 0;  // shortest comparison window used
  int budget = 0;
};

// Breadth-first closure under the p sections. reverse visits sections r = p-1..0.
OrbitReport orbit_explore(const FpSeries& s, int budget, bool reverse = false);

struct AlgebraicityVerdict {
  enum class Kind { algebraic_evidence, transcendence_evidence, inconclusive };
  Kind kind = Kind::inconclusive;
  std::int64_t size = 0;
  int depth = 0;
  std::int64_t window = 0;

  // e.g. "algebraic_evidence(4) window=2048"
  std::string describe() const;
};

AlgebraicityVerdict algebraicity_verdict(const OrbitReport& report);

}  // namespace kscope
