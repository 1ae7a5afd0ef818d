#include "kscope/exact.hpp"

#include <stdexcept>

namespace kscope {

bool ExactRank::add_row(std::span<const std::int64_t> row) {
  if (row.size() != width_) throw std::invalid_argument("row width mismatch");
  std::vector<mpz_class> v(width_);
  for (std::size_t j = 0; j < width_; ++j) v[j] = static_cast<long>(row[j]);

  for (const Pivoted& b : basis_) {
    if (v[b.pivot] == 0) continue;
    const mpz_class scale_v = b.row[b.pivot];
    const mpz_class scale_b = v[b.pivot];
    for (std::size_t j = 0; j < width_; ++j) v[j] = v[j] * scale_v - scale_b * b.row[j];
  }

  std::size_t pivot = width_;
  mpz_class content = 0;
  for (std::size_t j = 0; j < width_; ++j) {
    if (v[j] == 0) continue;
    if (pivot == width_) pivot = j;
    content = gcd(content, v[j]);
  }
  if (pivot == width_) return false;
  if (content != 1) {
    for (auto& x : v) x /= content;
  }
  basis_.push_back({std::move(v), pivot});
  return true;
}

mpq_class determinant(RationalMatrix m) {
  const std::size_t n = m.size();
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return det;
}

// Faddeev-LeVerrier: M_0 = 0, c_t = 1; M_k = A M_{k-1} + c_{t-k+1} I, c_{t-k} = -tr(A M_k)/k.
std::vector<mpq_class> characteristic_polynomial(const RationalMatrix& a) {
  const std::size_t t = a.size();
  std::vector<mpq_class> c(t + 1);
  c[t] = 1;
  RationalMatrix m(t, std::vector<mpq_class>(t, 0));
  for (std::size_t k = 1; k <= t; ++k) {
    RationalMatrix am(t, std::vector<mpq_class>(t, 0));
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < t; ++j) {
        mpq_class s = 0;
        for (std::size_t l = 0; l < t; ++l) s += a[i][l] * m[l][j];
        am[i][j] = s;
      }
    }
    for (std::size_t i = 0; i < t; ++i) am[i][i] += c[t - k + 1];
    m = std::move(am);
    mpq_class tr = 0;
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t l = 0; l < t; ++l) tr += a[i][l] * m[l][i];
    }
    c[t - k] = -tr / static_cast<long>(k);
  }
  return c;
}

}  // namespace kscope
