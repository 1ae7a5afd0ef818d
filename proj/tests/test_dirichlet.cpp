#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kscope/dirichlet.hpp"
#include "kscope/errors.hpp"
#include "kscope/kernel.hpp"

using namespace kscope;

namespace {

constexpr double pi = std::numbers::pi;

LinearRepresentation rep_of(FnTag tag) {
  const ValueTable t = generate(FunctionId(tag), required_table_size(2, 4, 64));
  return build_representation(t, 2, 4, 64);
}

// Plain ascending sum with an integral tail bound, used as an oracle for Re s >= 3.
cplx brute_series(const ValueTable& t, cplx s) {
  cplx sum = 0.0;
  for (std::int64_t n = t.size(); n >= 1; --n) sum += static_cast<double>(t(n)) * std::pow(static_cast<double>(n), -s);
  return sum;
}

const cplx zeta_half_10{1.54489522029675276692, -0.11533646527127337544};
const cplx zeta_m35_7{-0.41333307121788821695, 1.84182646197012282483};

}  // namespace

TEST_CASE("direct sums") {
  const ValueTable one = generate(FunctionId(FnTag::const_one), 1000000);
  const EvalResult z2 = direct_sum(one, 2.0, 1000000);
  REQUIRE(z2.value);
  CHECK(z2.method == EvalMethod::direct);
  CHECK(std::abs(*z2.value - pi * pi / 6) <= z2.error_estimate);
  CHECK(z2.error_estimate <= 1.0000001e-6);

  const ValueTable lambda = generate(FunctionId(FnTag::lambda), 1000000);
  CHECK(std::abs(*direct_sum(lambda, 2.0, 1000000).value - pi * pi / 15) < 1e-6);
  CHECK(std::abs(*direct_sum(lambda, 2.0, 1000000).value - 0.6579736) < 1e-6);

  const ValueTable mu = generate(FunctionId(FnTag::mu), 1000000);
  CHECK(std::abs(*direct_sum(mu, 2.0, 1000000).value - 6 / (pi * pi)) < 1e-6);
  CHECK(std::abs(*direct_sum(mu, 2.0, 1000000).value - 0.6079271) < 1e-6);

  const ValueTable phi = generate(FunctionId(FnTag::phi), 1000);
  CHECK_THROWS_AS(direct_sum(phi, 2.0, 1000), DomainError);
  CHECK_NOTHROW(direct_sum(phi, 2.3, 1000));
  CHECK_THROWS_AS(direct_sum(one, 1.2, 1000), DomainError);
  CHECK_THROWS_AS(direct_sum(one, 2.0, 2000000), CapacityError);
}

TEST_CASE("growth bounds hold on the tail") {
  const std::int64_t N0 = 2000, N1 = 200000;
  for (const FunctionId& id :
       {FunctionId(FnTag::tau), FunctionId(FnTag::tau_k, 3), FunctionId(FnTag::sigma_m, 1),
        FunctionId(FnTag::sigma_m, 2), FunctionId(FnTag::rho), FunctionId(FnTag::omega), FunctionId(FnTag::big_omega),
        FunctionId(FnTag::sum_binary_digits), FunctionId(FnTag::tau_of_square), FunctionId(FnTag::tau_squared),
        FunctionId(FnTag::nth_prime), FunctionId(FnTag::phi), FunctionId(FnTag::mu)}) {
    const GrowthBound g = growth_bound(id, N0);
    const ValueTable t = generate(id, N1);
    CAPTURE(id.name());
    for (std::int64_t n = N0; n <= N1; ++n) {
      REQUIRE(std::abs(static_cast<double>(t(n))) <= g.C * std::pow(static_cast<double>(n), g.d) * (1 + 1e-12));
    }
  }
  CHECK(growth_bound(FunctionId(FnTag::lambda).reduced(5), 100).C == 4.0);
}

TEST_CASE("continuation of zeta through the constant sequence") {
  const LinearRepresentation rep = rep_of(FnTag::const_one);
  SUBCASE("right half-plane") {
    CHECK(std::abs(*continue_via_recursion(rep, 2.0).value - pi * pi / 6) < 1e-12);
    CHECK(std::abs(*continue_via_recursion(rep, 1.5).value - 2.6123753486854883433) < 1e-12);
    CHECK(std::abs(*continue_via_recursion(rep, {2, 1}).value - cplx(1.1503557032549026717, -0.4375308659196078811)) <
          1e-12);
  }
  SUBCASE("strip and left half-plane") {
    const EvalResult z0 = continue_via_recursion(rep, 0.0);
    REQUIRE(z0.value);
    CHECK(std::abs(*z0.value + 0.5) < 1e-10);
    CHECK(z0.flags.removable);
    CHECK(std::abs(*continue_via_recursion(rep, -1.0).value + 1.0 / 12) < 1e-10);
    CHECK(std::abs(*continue_via_recursion(rep, {0.5, 10}).value - zeta_half_10) < 1e-10);
    CHECK(std::abs(*continue_via_recursion(rep, {-3.5, 7}).value - zeta_m35_7) < 1e-9);
    CHECK(std::abs(*continue_via_recursion(rep, {0.5, 14.134725141734694}).value) < 1e-9);
  }
  SUBCASE("pole at one") {
    const EvalResult r = continue_via_recursion(rep, 1.0);
    CHECK_FALSE(r.value);
    CHECK(r.flags.near_singular);
    CHECK(r.flags.det_magnitude < 1e-8);
    CHECK(system_det_magnitude(rep, 1.0) < 1e-15);
  }
  SUBCASE("the recursion depth does not change the value") {
    for (cplx s : {cplx(0.3, 2.0), cplx(-0.7, 5.0), cplx(0.5, 10.0), cplx(1.3, -4.0)}) {
      const int L = static_cast<int>(std::ceil(4.0 - s.real()));
      const cplx a = *continue_via_recursion(rep, s, L, 200).value;
      const cplx b = *continue_via_recursion(rep, s, L + 1, 200).value;
      CAPTURE(s);
      CHECK(std::abs(a - b) < 1e-8);
    }
    CHECK_THROWS_AS(continue_via_recursion(rep, 0.0, 1, 200), DomainError);
  }
}

TEST_CASE("thue-morse continuation") {
  const LinearRepresentation rep = rep_of(FnTag::thue_morse_pm);
  const ValueTable t = generate(FunctionId(FnTag::thue_morse_pm), 1000000);
  SUBCASE("agrees with direct sums where both converge") {
    for (cplx s : {cplx(1.5, 0), cplx(2, 0), cplx(2.5, 3), cplx(3, 0)}) {
      const EvalResult d = direct_sum(t, s, 1000000);
      const EvalResult r = continue_via_recursion(rep, s);
      CAPTURE(s);
      CHECK(std::abs(*d.value - *r.value) <= d.error_estimate + r.error_estimate);
    }
    CHECK(std::abs(*continue_via_recursion(rep, 3.0).value - brute_series(t, 3.0)) < 1e-11);
  }
  SUBCASE("cancelled lattice point at s = 1") {
    // Thue-Morse Dirichlet series has no pole at s = 1 although the lattice predicts one
    const EvalResult r = continue_via_recursion(rep, 1.0);
    CHECK_FALSE(r.value);  // the linear system itself is singular there
    const EvalResult near = continue_via_recursion(rep, {1.0, 1e-3});
    const EvalResult nearer = continue_via_recursion(rep, {1.0, 1e-4});
    CHECK(std::abs(*near.value - *nearer.value) < 1e-2);
  }
  SUBCASE("depth independence") {
    for (cplx s : {cplx(0.5, 3), cplx(-1, 1), cplx(-2.5, 0.5)}) {
      const int L = static_cast<int>(std::ceil(4.0 - s.real()));
      CHECK(std::abs(*continue_via_recursion(rep, s, L, 200).value - *continue_via_recursion(rep, s, L + 1, 200).value) <
            1e-8);
    }
  }
}

TEST_CASE("zeta quotients") {
  CHECK(std::abs(*zeta_quotient_eval(IdentityId(FunctionId(FnTag::lambda)), 2.0).value - pi * pi / 15) < 1e-13);
  CHECK(std::abs(*zeta_quotient_eval(IdentityId(FunctionId(FnTag::mu)), 2.0).value - 6 / (pi * pi)) < 1e-13);
  CHECK(std::abs(*zeta_quotient_eval(IdentityId(FunctionId(FnTag::q_m, 2)), 2.0).value - 15 / (pi * pi)) < 1e-13);
  CHECK(std::abs(*zeta_quotient_eval(IdentityId(FunctionId(FnTag::phi)), 3.0).value - 1.3684327776202058757) < 1e-13);

  // prime zeta P(2) from an explicit prime sum to 10^7; tail below sum_{n > 10^7} n^-2 < 1e-7
  const FactorTable ft(10000000);
  long double p2 = 0.0L;
  for (auto it = ft.primes().rbegin(); it != ft.primes().rend(); ++it) {
    p2 += 1.0L / (static_cast<long double>(*it) * static_cast<long double>(*it));
  }
  const cplx chi = *zeta_quotient_eval(IdentityId(FunctionId(FnTag::chi_P)), 2.0).value;
  CHECK(chi.real() - static_cast<double>(p2) >= 0.0);
  CHECK(chi.real() - static_cast<double>(p2) < 1e-7);
  CHECK(std::abs(chi - 0.4522474200410654985) < 1e-13);
  CHECK(std::abs(*zeta_quotient_eval(IdentityId(FunctionId(FnTag::chi_P)), 3.0).value - 0.1747626392994435364) < 1e-13);

  CHECK_THROWS_AS(zeta_quotient_eval(IdentityId(FunctionId(FnTag::mu)), 0.9), DomainError);
  CHECK_THROWS_AS(zeta_quotient_eval(IdentityId(FunctionId(FnTag::phi)), 2.0), DomainError);
  CHECK_THROWS_AS(zeta_quotient_eval(IdentityId(FunctionId(FnTag::chi_P)), cplx(1.5, 1.0)), DomainError);
  CHECK_NOTHROW(zeta_quotient_eval(IdentityId(FunctionId(FnTag::chi_P)), cplx(2.0, 1.0)));
  CHECK(zeta_quotient_eval(IdentityId(FunctionId(FnTag::mu)), 1.0 + 1e-8).flags.near_singular);
  CHECK_FALSE(zeta_quotient_eval(IdentityId(FunctionId(FnTag::mu)), 1.0 + 1e-8).value);
  CHECK_THROWS_AS(IdentityId(FunctionId(FnTag::tau)), DomainError);
  CHECK(all_identities().size() == 11);
}

TEST_CASE("identity residuals") {
  const std::int64_t N = 100000;
  for (const IdentityId& id : all_identities()) {
    const ValueTable t = generate(id.function(), N);
    const auto pts = id.sample_points();
    const IdentityReport rep = verify_identity(id, t, pts, N);
    CAPTURE(rep.function);
    CHECK(rep.all_pass());
    CHECK(rep.samples.size() == 4);
  }
  const IdentityId big(FunctionId(FnTag::big_omega));
  const ValueTable t = generate(FunctionId(FnTag::big_omega), N);
  const std::vector<cplx> s3{3.0};
  CHECK(verify_identity(big, t, s3, N).all_pass());
  const std::vector<cplx> bad{1.1};
  CHECK_THROWS_AS(verify_identity(big, t, bad, N), DomainError);
  CHECK_THROWS_AS(verify_identity(IdentityId(FunctionId(FnTag::mu)), t, s3, N), DomainError);
}

TEST_CASE("square-free reciprocals") {
  const auto six = landau_walfisz_singularities(6);
  REQUIRE(six.size() == 5);
  const std::vector<std::int64_t> ns{1, 2, 3, 5, 6};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(six[i].n == ns[i]);
    CHECK(six[i].point == 1.0 / static_cast<double>(ns[i]));
  }
  CHECK(landau_walfisz_singularities(1).size() == 1);
  CHECK(landau_walfisz_singularities(10).size() == 7);
  CHECK_THROWS_AS(landau_walfisz_singularities(0), DomainError);
}

TEST_CASE("pole scans") {
  const LinearRepresentation one = rep_of(FnTag::const_one);
  SUBCASE("one genuine pole for zeta near the line Re s = 1") {
    const PoleScanReport r = pole_scan(one, 0.9, 1.1, 10.0, 0.05);
    CHECK(r.observed_poles() == 1);
    CHECK(r.observed_within_predicted());
    bool found = false;
    for (const PoleCandidate& c : r.candidates) {
      if (c.genuine) {
        found = true;
        CHECK(std::abs(c.s - 1.0) < 1e-8);
      } else {
        // vanishing determinant without a pole: the value stays bounded
        CHECK(c.growth_ratio < 1.5);
      }
    }
    CHECK(found);
    CHECK(r.predicted.size() == 2);
  }
  SUBCASE("pole count grows at most linearly") {
    for (double T : {10.0, 50.0, 100.0}) {
      const PoleScanReport r = pole_scan(one, 0.9, 1.1, T, 0.1);
      CHECK(r.observed_within_predicted());
      CHECK(static_cast<double>(r.observed_poles()) <= 1.0 + T / 9.0);
      CHECK(r.candidates.size() == r.predicted.size());
    }
  }
  SUBCASE("thue-morse has nothing in the critical strip window") {
    const PoleScanReport r = pole_scan(rep_of(FnTag::thue_morse_pm), 0.4, 0.6, 5.0, 0.05);
    CHECK(r.candidates.empty());
    CHECK(r.observed_within_predicted());
    CHECK_NOTHROW(pole_scan(one, 0.5, 0.5, 20.0, 0.5));
  }
  SUBCASE("grid scans are deterministic across thread counts") {
    const auto a = scan_grid(one, -0.5, 1.5, 3.0, 0.25, 1);
    const auto b = scan_grid(one, -0.5, 1.5, 3.0, 0.25, 4);
    REQUIRE(a.size() == b.size());
    bool singular_seen = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].re == b[i].re);
      CHECK(a[i].im == b[i].im);
      if (std::isnan(a[i].abs_value)) {
        CHECK(std::isnan(b[i].abs_value));
      } else {
        CHECK(a[i].abs_value == b[i].abs_value);
      }
      singular_seen = singular_seen || a[i].near_singular;
    }
    CHECK(singular_seen);  // s = 1 is a grid node
  }
}
