#include "kscope/kernel.hpp"

#include <cmath>

#include "kscope/errors.hpp"
#include "kscope/exact.hpp"

namespace kscope {

namespace {

std::int64_t checked_power(int k, int l) {
  std::int64_t p = 1;
  for (int i = 0; i < l; ++i) {
    if (__builtin_mul_overflow(p, static_cast<std::int64_t>(k), &p)) {
      throw CapacityError("k^l overflows 64 bits");
    }
  }
  return p;
}

void check_shape(int k, int L, std::int64_t M) {
  if (k < 2) throw DomainError("base k must be >= 2");
  if (L < 0) throw DomainError("depth must be >= 0");
  if (M < 1) throw DomainError("comparison window M must be >= 1");
}

// Calls visit(l, r, prefix) for every kernel element of depth <= L, ordered by
// depth then residue.
template <typename Visit>
void for_each_element(const ValueTable& t, int k, int L, std::int64_t M, Visit&& visit) {
  const std::int64_t need = required_table_size(k, L, M);
  if (t.size() < need) {
    throw CapacityError("kernel of depth " + std::to_string(L) + " with window " + std::to_string(M) +
                        " needs N >= " + std::to_string(need) + ", table has " + std::to_string(t.size()));
  }
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(M));
  std::int64_t step = 1;
  for (int l = 0; l <= L; ++l) {
    for (std::int64_t r = 0; r < step; ++r) {
      for (std::int64_t n = 1; n <= M; ++n) prefix[static_cast<std::size_t>(n - 1)] = t(step * n + r);
      visit(l, r, prefix);
    }
    step *= k;
  }
}

}  // namespace

std::string Verdict::describe() const {
  switch (kind) {
    case Kind::saturated:
      return "saturated_at(" + std::to_string(depth) + "," + std::to_string(size) + ")";
    case Kind::growing:
      return "growing";
    case Kind::inconclusive:
      break;
  }
  return "inconclusive";
}

Verdict classify_growth(std::span<const std::int64_t> v) {
  for (std::size_t d = 1; d + 1 < v.size(); ++d) {
    if (v[d] == v[d - 1] && v[d + 1] == v[d]) {
      return {Verdict::Kind::saturated, static_cast<int>(d), v[d]};
    }
  }
  if (v.size() >= 2) {
    bool strict = true;
    for (std::size_t d = 1; d < v.size(); ++d) strict = strict && v[d] > v[d - 1];
    if (strict) return {Verdict::Kind::growing, -1, v.back()};
  }
  return {};
}

std::int64_t required_table_size(int k, int L, std::int64_t M) {
  const std::int64_t step = checked_power(k, L);
  std::int64_t need = 0;
  if (__builtin_mul_overflow(step, M, &need) || __builtin_add_overflow(need, step - 1, &need)) {
    throw CapacityError("kernel window overflows 64 bits");
  }
  return need;
}

KernelElement kernel_element(const ValueTable& t, int k, int l, std::int64_t r, std::int64_t M) {
  check_shape(k, l, M);
  const std::int64_t step = checked_power(k, l);
  if (r < 0 || r >= step) {
    throw DomainError("residue " + std::to_string(r) + " outside [0, " + std::to_string(step) + ")");
  }
  std::int64_t need = 0;
  if (__builtin_mul_overflow(step, M, &need) || __builtin_add_overflow(need, r, &need)) {
    throw CapacityError("kernel window overflows 64 bits");
  }
  if (t.size() < need) {
    throw CapacityError("kernel element (" + std::to_string(l) + "," + std::to_string(r) + ") with M=" +
                        std::to_string(M) + " needs N >= " + std::to_string(need) + ", table has " +
                        std::to_string(t.size()));
  }
  KernelElement e{l, r, std::vector<std::int64_t>(static_cast<std::size_t>(M))};
  for (std::int64_t n = 1; n <= M; ++n) e.prefix[static_cast<std::size_t>(n - 1)] = t(step * n + r);
  return e;
}

std::uint64_t PrefixIndex::hash(const std::vector<std::int64_t>& v) {
  // FNV-1a over the raw words
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::int64_t x : v) {
    auto u = static_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) {
      h ^= (u & 0xffU);
      h *= 1099511628211ULL;
      u >>= 8;
    }
  }
  return h;
}

std::optional<std::size_t> PrefixIndex::find(const std::vector<std::int64_t>& prefix) const {
  const auto [lo, hi] = buckets_.equal_range(hash(prefix));
  for (auto it = lo; it != hi; ++it) {
    if (items_[it->second] == prefix) return it->second;
  }
  return std::nullopt;
}

std::pair<std::size_t, bool> PrefixIndex::insert(std::vector<std::int64_t> prefix) {
  if (auto existing = find(prefix)) return {*existing, false};
  const std::uint64_t h = hash(prefix);
  items_.push_back(std::move(prefix));
  buckets_.emplace(h, items_.size() - 1);
  return {items_.size() - 1, true};
}

KernelProfile kernel_profile(const ValueTable& t, int k, int L, std::int64_t M) {
  check_shape(k, L, M);
  KernelProfile out{k, M, L, std::vector<std::int64_t>(static_cast<std::size_t>(L + 1), 0), {}};
  PrefixIndex index;
  for_each_element(t, k, L, M, [&](int l, std::int64_t, const std::vector<std::int64_t>& prefix) {
    index.insert(prefix);
    out.distinct_counts[static_cast<std::size_t>(l)] = static_cast<std::int64_t>(index.size());
  });
  out.verdict = classify_growth(out.distinct_counts);
  return out;
}

RankProfile rank_profile(const ValueTable& t, int k, int L, std::int64_t M) {
  check_shape(k, L, M);
  RankProfile out{k, M, L, std::vector<std::int64_t>(static_cast<std::size_t>(L + 1), 0), {}};
  ExactRank rank(static_cast<std::size_t>(M));
  for_each_element(t, k, L, M, [&](int l, std::int64_t, const std::vector<std::int64_t>& prefix) {
    if (rank.rank() < rank.width()) rank.add_row(prefix);
    out.ranks[static_cast<std::size_t>(l)] = static_cast<std::int64_t>(rank.rank());
  });
  out.verdict = classify_growth(out.ranks);
  return out;
}

std::vector<DensityEstimate> value_density(const ValueTable& t, std::int64_t v,
                                           std::span<const std::int64_t> lengths) {
  std::vector<DensityEstimate> out;
  for (const std::int64_t X : lengths) {
    if (X < 1 || X > t.size()) {
      throw CapacityError("density prefix length " + std::to_string(X) + " outside 1.." +
                          std::to_string(t.size()));
    }
    std::int64_t hits = 0;
    for (std::int64_t n = 1; n <= X; ++n) hits += t(n) == v ? 1 : 0;
    DensityEstimate e;
    e.X = X;
    e.density = static_cast<double>(hits) / static_cast<double>(X);
    e.residual = 2.0;
    for (std::int64_t q = 1; q <= 64; ++q) {
      const auto p = static_cast<std::int64_t>(std::llround(e.density * static_cast<double>(q)));
      const double res = std::abs(e.density - static_cast<double>(p) / static_cast<double>(q));
      if (res < e.residual - 1e-15) {
        e.numerator = p;
        e.denominator = q;
        e.residual = res;
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace kscope
