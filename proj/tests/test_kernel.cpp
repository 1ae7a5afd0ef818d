#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "kscope/errors.hpp"
#include "kscope/kernel.hpp"

using namespace kscope;

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Distinct prefixes of depth <= d, by plain set insertion.
std::vector<std::int64_t> brute_counts(const ValueTable& t, int k, int L, std::int64_t M) {
  std::set<std::vector<std::int64_t>> seen;
  std::vector<std::int64_t> out;
  for (int l = 0; l <= L; ++l) {
    const std::int64_t kl = ipow(k, l);
    for (std::int64_t r = 0; r < kl; ++r) {
      std::vector<std::int64_t> v;
      for (std::int64_t n = 1; n <= M; ++n) v.push_back(t(kl * n + r));
      seen.insert(v);
    }
    out.push_back(static_cast<std::int64_t>(seen.size()));
  }
  return out;
}

// Rank modulo a large prime; equals the rational rank unless the prime divides a minor.
std::vector<std::int64_t> modular_ranks(const ValueTable& t, int k, int L, std::int64_t M) {
  constexpr std::int64_t P = 2305843009213693951;  // 2^61 - 1
  const auto mul = [](std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % P);
  };
  const auto inv = [&](std::int64_t a) {
    std::int64_t r = 1, e = P - 2;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  };
  std::vector<std::vector<std::int64_t>> basis;  // reduced rows with pivot columns
  std::vector<std::size_t> pivots;
  std::vector<std::int64_t> out;
  for (int l = 0; l <= L; ++l) {
    const std::int64_t kl = ipow(k, l);
    for (std::int64_t r = 0; r < kl; ++r) {
      std::vector<std::int64_t> v;
      for (std::int64_t n = 1; n <= M; ++n) v.push_back(((t(kl * n + r) % P) + P) % P);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const std::int64_t f = v[pivots[b]];
        if (f == 0) continue;
        for (std::size_t c = 0; c < v.size(); ++c) v[c] = ((v[c] - mul(f, basis[b][c])) % P + P) % P;
      }
      std::size_t p = 0;
      while (p < v.size() && v[p] == 0) ++p;
      if (p == v.size()) continue;
      const std::int64_t s = inv(v[p]);
      for (auto& x : v) x = mul(x, s);
      for (auto& row : basis) {
        const std::int64_t f = row[p];
        if (f == 0) continue;
        for (std::size_t c = 0; c < v.size(); ++c) row[c] = ((row[c] - mul(f, v[c])) % P + P) % P;
      }
      basis.push_back(v);
      pivots.push_back(p);
    }
    out.push_back(static_cast<std::int64_t>(basis.size()));
  }
  return out;
}

bool strictly_increasing(const std::vector<std::int64_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("kernel elements") {
  const ValueTable tm = generate(FunctionId(FnTag::thue_morse_pm), 100);
  CHECK(kernel_element(tm, 2, 1, 0, 8).prefix == kernel_element(tm, 2, 0, 0, 8).prefix);

  const ValueTable lambda = generate(FunctionId(FnTag::lambda), 100);
  const auto e0 = kernel_element(lambda, 2, 0, 0, 8).prefix;
  const auto e1 = kernel_element(lambda, 2, 1, 0, 8).prefix;
  for (std::size_t i = 0; i < e0.size(); ++i) CHECK(e1[i] == -e0[i]);

  const ValueTable id = generate(FunctionId(FnTag::identity_n), 100);
  CHECK(kernel_element(id, 2, 2, 3, 4).prefix == std::vector<std::int64_t>{7, 11, 15, 19});

  CHECK_THROWS_AS(kernel_element(id, 2, 2, 4, 4), DomainError);
  try {
    kernel_element(id, 2, 5, 3, 4);
    FAIL("expected a capacity error");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("131") != std::string::npos);  // 32*4 + 3
  }
}

TEST_CASE("refinement consistency") {
  const ValueTable t = generate(FunctionId(FnTag::mu), 5000);
  for (int k : {2, 3}) {
    for (int l = 0; l <= 2; ++l) {
      const std::int64_t kl = ipow(k, l);
      for (std::int64_t r = 0; r < kl; ++r) {
        const auto parent = kernel_element(t, k, l, r, 100).prefix;
        for (int j = 0; j < k; ++j) {
          const auto child = kernel_element(t, k, l + 1, r + j * kl, 30).prefix;
          for (std::int64_t n = 1; n <= 30; ++n) {
            // child(n) = t(k^{l+1} n + r + j k^l) = parent(k n + j)
            const std::int64_t m = k * n + j;
            if (m <= 100) REQUIRE(child[static_cast<std::size_t>(n - 1)] == parent[static_cast<std::size_t>(m - 1)]);
          }
        }
      }
    }
  }
}

TEST_CASE("growth classification") {
  const std::vector<std::int64_t> sat{1, 2, 2, 2};
  const Verdict v = classify_growth(sat);
  CHECK(v.kind == Verdict::Kind::saturated);
  CHECK(v.depth == 2);  // depths 2 and 3 add nothing
  CHECK(v.size == 2);
  CHECK(v.describe() == "saturated_at(2,2)");
  const std::vector<std::int64_t> grow{1, 3, 6, 12};
  CHECK(classify_growth(grow).describe() == "growing");
  const std::vector<std::int64_t> mixed{1, 2, 2, 3};
  CHECK(classify_growth(mixed).describe() == "inconclusive");
  const std::vector<std::int64_t> one{1};
  CHECK(classify_growth(one).kind == Verdict::Kind::inconclusive);
}

TEST_CASE("kernel profiles against brute force") {
  SUBCASE("thue-morse saturates at two elements") {
    const ValueTable t = generate(FunctionId(FnTag::thue_morse_pm), required_table_size(2, 6, 64));
    const KernelProfile p = kernel_profile(t, 2, 6, 64);
    CHECK(p.distinct_counts == brute_counts(t, 2, 6, 64));
    CHECK(p.verdict.kind == Verdict::Kind::saturated);
    CHECK(p.verdict.size == 2);
  }
  SUBCASE("constant sequence in base 3") {
    const ValueTable t = generate(FunctionId(FnTag::const_one), required_table_size(3, 5, 32));
    const KernelProfile p = kernel_profile(t, 3, 5, 32);
    CHECK(p.verdict.kind == Verdict::Kind::saturated);
    CHECK(p.verdict.size == 1);
  }
  SUBCASE("multiplicative functions keep growing") {
    for (FnTag tag : {FnTag::lambda, FnTag::mu, FnTag::chi_P, FnTag::chi_PP}) {
      const ValueTable t = generate(FunctionId(tag), required_table_size(2, 6, 64));
      const KernelProfile p = kernel_profile(t, 2, 6, 64);
      CAPTURE(tag_name(tag));
      CHECK(p.distinct_counts == brute_counts(t, 2, 6, 64));
      CHECK(strictly_increasing(p.distinct_counts));
      CHECK(p.verdict.kind == Verdict::Kind::growing);
    }
  }
  SUBCASE("table too short") {
    const ValueTable t = generate(FunctionId(FnTag::lambda), 1000);
    CHECK_THROWS_AS(kernel_profile(t, 2, 8, 256), CapacityError);
    CHECK(required_table_size(2, 8, 256) == 256 * 256 + 255);
  }
}

TEST_CASE("rank profiles against modular elimination") {
  SUBCASE("regular controls saturate at rank 2") {
    for (FnTag tag : {FnTag::identity_n, FnTag::sum_binary_digits}) {
      const ValueTable t = generate(FunctionId(tag), required_table_size(2, 6, 32));
      const RankProfile p = rank_profile(t, 2, 6, 32);
      CAPTURE(tag_name(tag));
      CHECK(p.ranks == modular_ranks(t, 2, 6, 32));
      CHECK(p.verdict.kind == Verdict::Kind::saturated);
      CHECK(p.verdict.size == 2);
    }
  }
  SUBCASE("phi keeps growing") {
    const ValueTable t = generate(FunctionId(FnTag::phi), required_table_size(2, 6, 64));
    const RankProfile p = rank_profile(t, 2, 6, 64);
    CHECK(p.ranks == modular_ranks(t, 2, 6, 64));
    CHECK(strictly_increasing(p.ranks));
  }
  SUBCASE("rank never exceeds the distinct count") {
    for (FnTag tag : {FnTag::tau, FnTag::omega, FnTag::thue_morse_pm, FnTag::mu}) {
      const ValueTable t = generate(FunctionId(tag), required_table_size(2, 5, 40));
      const RankProfile r = rank_profile(t, 2, 5, 40);
      const KernelProfile c = kernel_profile(t, 2, 5, 40);
      for (std::size_t d = 0; d < r.ranks.size(); ++d) {
        CHECK(r.ranks[d] <= c.distinct_counts[d]);
        CHECK(r.ranks[d] <= 40);
        if (d > 0) CHECK(r.ranks[d] >= r.ranks[d - 1]);
      }
    }
  }
}

TEST_CASE("value densities") {
  const ValueTable one = generate(FunctionId(FnTag::const_one), 1000);
  const std::vector<std::int64_t> xs{10, 100, 1000};
  for (const DensityEstimate& e : value_density(one, 1, xs)) CHECK(e.density == 1.0);

  const ValueTable tau2 = reduce_mod(generate(FunctionId(FnTag::tau), 1000000), 2);
  const std::vector<std::int64_t> big{1000000};
  CHECK(value_density(tau2, 1, big)[0].density == 0.001);

  // 1 - Q(X)/X, Q counted by inclusion-exclusion over d^2
  const ValueTable mu = generate(FunctionId(FnTag::mu), 1000000);
  std::int64_t squarefree = 0;
  for (std::int64_t d = 1; d * d <= 1000000; ++d) {
    int m = 1;
    std::int64_t x = d;
    bool sq = false;
    for (std::int64_t p = 2; p * p <= x; ++p) {
      if (x % p) continue;
      x /= p;
      if (x % p == 0) sq = true;
      m = -m;
    }
    if (x > 1) m = -m;
    if (!sq) squarefree += m * (1000000 / (d * d));
  }
  const DensityEstimate e = value_density(mu, 0, big)[0];
  CHECK(e.density == doctest::Approx(1.0 - static_cast<double>(squarefree) / 1e6).epsilon(1e-15));
  CHECK(e.density == doctest::Approx(0.392074).epsilon(1e-6));
  CHECK(e.denominator <= 64);
  CHECK_THROWS_AS(value_density(one, 1, big), CapacityError);
}
