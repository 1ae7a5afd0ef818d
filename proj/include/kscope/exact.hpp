#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

namespace kscope {

// Incremental rank over the rationals of integer row vectors. Rows are kept
// in fraction-free echelon form, each divided by the gcd of its entries.
class ExactRank {
 public:
  explicit ExactRank(std::size_t width) : width_(width) {}

  // Returns true when the row is independent of those already added.
  bool add_row(std::span<const std::int64_t> row);
  std::size_t rank() const noexcept { return basis_.size(); }
  std::size_t width() const noexcept { return width_; }

 private:
  struct Pivoted {
    std::vector<mpz_class> row;
    std::size_t pivot;
  };
  std::size_t width_;
  std::vector<Pivoted> basis_;
};

using RationalMatrix = std::vector<std::vector<mpq_class>>;

mpq_class determinant(RationalMatrix m);

// Coefficients c[0..t] of det(xI - A), lowest degree first; c[t] = 1.
std::vector<mpq_class> characteristic_polynomial(const RationalMatrix& a);

}  // namespace kscope
