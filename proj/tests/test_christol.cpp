#include <bit>

#include "doctest.h"
#include "kscope/christol.hpp"
#include "kscope/errors.hpp"
#include "kscope/kernel.hpp"

using namespace kscope;

namespace {

std::vector<int> coeffs(const FpSeries& s, std::size_t n) { return {s.coeffs.begin(), s.coeffs.begin() + n}; }

FpSeries digit_parity(std::int64_t N) {
  return series_from_table(generate(FunctionId(FnTag::sum_binary_digits), N), 2, N);
}

}  // namespace

TEST_CASE("series from tables") {
  const FpSeries lam = series_from_table(generate(FunctionId(FnTag::lambda), 8), 3, 8);
  CHECK(coeffs(lam, 8) == std::vector<int>{0, 1, 2, 2, 1, 2, 1, 2});
  CHECK(lam.reliable_len == 8);
  const FpSeries mu = series_from_table(generate(FunctionId(FnTag::mu), 5), 2, 5);
  CHECK(coeffs(mu, 5) == std::vector<int>{0, 1, 1, 1, 0});
  const FpSeries one = series_from_table(generate(FunctionId(FnTag::const_one), 100), 2, 100);
  CHECK(one.coeffs[0] == 0);
  for (std::size_t n = 1; n < 100; ++n) CHECK(one.coeffs[n] == 1);
  CHECK_THROWS_AS(series_from_table(generate(FunctionId(FnTag::mu), 5), 4, 5), DomainError);
  CHECK_THROWS_AS(series_from_table(generate(FunctionId(FnTag::mu), 5), 2, 6), CapacityError);
}

TEST_CASE("cartier sections") {
  const FpSeries one = series_from_table(generate(FunctionId(FnTag::const_one), 200), 2, 200);
  const FpSeries s0 = cartier_section(one, 0);
  const FpSeries s1 = cartier_section(one, 1);
  CHECK(s0.reliable_len == 100);
  CHECK(s1.reliable_len == 100);
  CHECK(s0.coeffs[0] == 0);
  for (std::size_t n = 1; n < 100; ++n) CHECK(s0.coeffs[n] == 1);
  for (std::size_t n = 0; n < 100; ++n) CHECK(s1.coeffs[n] == 1);

  const FpSeries tm = digit_parity(128);
  const FpSeries t0 = cartier_section(tm, 0);
  CHECK(*equal_on_window(t0, tm));
  const FpSeries t1 = cartier_section(tm, 1);
  for (std::int64_t n = 0; n < t1.reliable_len; ++n) {
    const int expect = (std::popcount(static_cast<std::uint64_t>(n)) + 1) % 2;
    CHECK(t1.coeffs[static_cast<std::size_t>(n)] == expect);
  }
  CHECK(t1.reliable_len == 64);
  CHECK(cartier_section(digit_parity(64), 1).reliable_len == 32);
  CHECK_THROWS_AS(cartier_section(digit_parity(63), 1), CapacityError);  // 31 coefficients
  CHECK_THROWS_AS(cartier_section(tm, 2), DomainError);
}

TEST_CASE("section and kernel duality") {
  for (FnTag tag : {FnTag::lambda, FnTag::mu, FnTag::tau, FnTag::thue_morse_pm, FnTag::phi}) {
    for (int p : {2, 3, 5}) {
      const std::int64_t N = 3000;
      const ValueTable t = generate(FunctionId(tag), N);
      const FpSeries s = series_from_table(t, p, N);
      for (int r = 0; r < p; ++r) {
        const FpSeries sec = cartier_section(s, r);
        const std::int64_t M = sec.reliable_len - 1;
        const ValueTable reduced = reduce_mod(t, p);
        const KernelElement e = kernel_element(reduced, p, 1, r, M);
        CAPTURE(tag_name(tag));
        CAPTURE(p);
        CAPTURE(r);
        for (std::int64_t n = 1; n <= M; ++n) {
          REQUIRE(sec.coeffs[static_cast<std::size_t>(n)] == e.prefix[static_cast<std::size_t>(n - 1)]);
        }
      }
    }
  }
}

TEST_CASE("interleaving the sections rebuilds the series") {
  const FpSeries s = series_from_table(generate(FunctionId(FnTag::mu), 999), 3, 999);
  std::vector<FpSeries> secs;
  for (int r = 0; r < 3; ++r) secs.push_back(cartier_section(s, r));
  for (std::int64_t n = 0; n < s.reliable_len; ++n) {
    const FpSeries& sec = secs[static_cast<std::size_t>(n % 3)];
    REQUIRE(n / 3 < sec.reliable_len);
    CHECK(sec.coeffs[static_cast<std::size_t>(n / 3)] == s.coeffs[static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("orbits") {
  SUBCASE("automatic fixtures close up") {
    const FpSeries one = series_from_table(generate(FunctionId(FnTag::const_one), 4096), 2, 4096);
    const OrbitReport r1 = orbit_explore(one, 10);
    CHECK(r1.kind == OrbitReport::Kind::finite);
    CHECK(r1.size <= 2);
    CHECK(algebraicity_verdict(r1).kind == AlgebraicityVerdict::Kind::algebraic_evidence);

    const OrbitReport r2 = orbit_explore(digit_parity(4096), 10);
    CHECK(r2.kind == OrbitReport::Kind::finite);
    CHECK(r2.size <= 4);
    CHECK(r2.size == orbit_explore(digit_parity(4096), 10, true).size);
  }
  SUBCASE("lambda and mu modulo 3 keep growing") {
    for (FnTag tag : {FnTag::lambda, FnTag::mu}) {
      const FpSeries s = series_from_table(generate(FunctionId(tag), 65536), 3, 65536);
      const OrbitReport fwd = orbit_explore(s, 50);
      const OrbitReport rev = orbit_explore(s, 50, true);
      CAPTURE(tag_name(tag));
      CHECK(fwd.kind == OrbitReport::Kind::growing);
      CHECK(fwd.size > 50);
      CHECK(rev.kind == OrbitReport::Kind::growing);
      CHECK(algebraicity_verdict(fwd).kind == AlgebraicityVerdict::Kind::transcendence_evidence);
    }
  }
  SUBCASE("short series run out of window") {
    const FpSeries s = series_from_table(generate(FunctionId(FnTag::lambda), 96), 3, 96);
    const OrbitReport r = orbit_explore(s, 1000);
    CHECK(r.kind == OrbitReport::Kind::exhausted);
    CHECK(r.depth == 2);
    CHECK(algebraicity_verdict(r).describe().rfind("inconclusive(2)", 0) == 0);
    CHECK_THROWS_AS(orbit_explore(series_from_table(generate(FunctionId(FnTag::mu), 90), 3, 90), 10), DomainError);
  }
  SUBCASE("orbit size does not depend on visiting order") {
    for (FnTag tag : {FnTag::const_one, FnTag::sum_binary_digits, FnTag::thue_morse_pm}) {
      for (int p : {2, 3}) {
        const FpSeries s = series_from_table(generate(FunctionId(tag), 20000), p, 20000);
        const OrbitReport a = orbit_explore(s, 200);
        const OrbitReport b = orbit_explore(s, 200, true);
        CHECK(a.kind == b.kind);
        CHECK(a.size == b.size);
      }
    }
  }
}

TEST_CASE("verdict plumbing") {
  OrbitReport r;
  r.kind = OrbitReport::Kind::finite;
  r.size = 4;
  r.window = 2048;
  CHECK(algebraicity_verdict(r).describe() == "algebraic_evidence(4) window=2048");
  r.kind = OrbitReport::Kind::growing;
  r.size = 51;
  r.depth = 6;
  CHECK(algebraicity_verdict(r).describe() == "transcendence_evidence(6,51) window=2048");
  r.kind = OrbitReport::Kind::exhausted;
  r.depth = 3;
  CHECK(algebraicity_verdict(r).describe() == "inconclusive(3) window=2048");
}
