#include <bit>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kscope/automaton.hpp"
#include "kscope/errors.hpp"
#include "kscope/io.hpp"
#include "kscope/kernel.hpp"

using namespace kscope;

namespace {

std::int64_t tm_oracle(std::int64_t n) { return std::popcount(static_cast<std::uint64_t>(n)) % 2 ? -1 : 1; }

LinearRepresentation tm_rep() {
  const ValueTable t = generate(FunctionId(FnTag::thue_morse_pm), required_table_size(2, 4, 64));
  return build_representation(t, 2, 4, 64);
}

LinearRepresentation one_rep() {
  const ValueTable t = generate(FunctionId(FnTag::const_one), required_table_size(2, 4, 64));
  return build_representation(t, 2, 4, 64);
}

bool has_point(const std::vector<PolePoint>& pts, std::complex<double> s) {
  for (const PolePoint& p : pts) {
    if (std::abs(p.s - s) < 1e-12) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("thue-morse representation") {
  const LinearRepresentation rep = tm_rep();
  REQUIRE(rep.dimension() == 2);
  CHECK(rep.matrix(0) == IntMatrix{{1, 0}, {0, 1}});
  CHECK(rep.matrix(1) == IntMatrix{{0, 1}, {1, 0}});
  CHECK(rep.seed() == std::vector<std::int64_t>{-1, 1});
  CHECK(rep.output_coord() == 0);
  CHECK(rep.is_row_selection());
  CHECK(rep.labels().front() == KernelLabel{0, 0});
  for (std::int64_t n = 1; n <= 10000; ++n) REQUIRE(eval(rep, n) == tm_oracle(n));
  CHECK(eval(rep, 3) == 1);
  CHECK(eval(rep, (std::int64_t{1} << 20) + 1) == tm_oracle((std::int64_t{1} << 20) + 1));
  CHECK(eval(rep, 123456789012345) == tm_oracle(123456789012345));
  CHECK_THROWS_AS(eval(rep, 0), DomainError);
}

TEST_CASE("constant and reduced representations") {
  const LinearRepresentation one = one_rep();
  CHECK(one.dimension() == 1);
  CHECK(one.matrix(0) == IntMatrix{{1}});
  CHECK(one.matrix(1) == IntMatrix{{1}});
  CHECK(one.seed() == std::vector<std::int64_t>{1});
  CHECK(eval(one, 997) == 1);

  // (1 - u)/2 is the binary digit-sum parity
  const ValueTable parity = reduce_mod(generate(FunctionId(FnTag::sum_binary_digits), 20000), 2);
  const LinearRepresentation rep = build_representation(parity, 2, 4, 64);
  CHECK(rep.dimension() == 2);
  CHECK(rep.is_row_selection());
  for (std::int64_t n = 1; n <= 20000; ++n) REQUIRE(eval(rep, n) == (1 - tm_oracle(n)) / 2);

  // base 3 round trip on a periodic sequence
  const ValueTable tau2 = reduce_mod(generate(FunctionId(FnTag::identity_n), 30000), 3);
  const LinearRepresentation r3 = build_representation(tau2, 3, 4, 64);
  for (std::int64_t n = 1; n <= tau2.size(); ++n) REQUIRE(eval(r3, n) == tau2(n));
  CHECK(r3.verified_to() == tau2.size());
}

TEST_CASE("non-automatic tables are refused") {
  const ValueTable t = generate(FunctionId(FnTag::lambda), required_table_size(2, 6, 64));
  CHECK_THROWS_AS(build_representation(t, 2, 6, 64), VerdictError);
}

TEST_CASE("regular representation of n") {
  // U_n = (n, 1): U_{2n} = diag(2,1) U_n, U_{2n+1} = [[2,1],[0,1]] U_n
  const LinearRepresentation rep(2, {{{2, 0}, {0, 1}}, {{2, 1}, {0, 1}}}, {{1, 1}}, 0);
  CHECK_FALSE(rep.is_row_selection());
  for (std::int64_t n = 1; n <= 5000; ++n) REQUIRE(eval(rep, n) == n);
  const RationalMatrix avg = average_matrix(rep);
  CHECK(avg[0][0] == 2);
  CHECK(avg[0][1] == mpq_class(1, 2));
  CHECK_FALSE(is_row_stochastic(avg));
  auto ev = average_eigenvalues(rep);
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
  CHECK(ev[0].real() == doctest::Approx(1.0));
  CHECK(ev[1].real() == doctest::Approx(2.0));
  const PoleLattice lat = pole_lattice(rep, 0, 0);
  CHECK(has_point(lat.points, {2.0, 0.0}));  // log 2 / log 2 + 1
}

TEST_CASE("average matrix and exact eigenvalue one") {
  const RationalMatrix a = average_matrix(tm_rep());
  const mpq_class half(1, 2);
  CHECK(a == RationalMatrix{{half, half}, {half, half}});
  CHECK(is_row_stochastic(a));
  CHECK(average_matrix(one_rep()) == RationalMatrix{{mpq_class(1)}});

  const PoleLattice lat = pole_lattice(tm_rep(), 2, 2);
  CHECK(lat.eigenvalue_one_certified);
  mpq_class at_one = 0;
  for (const mpq_class& c : lat.charpoly) at_one += c;
  CHECK(at_one == 0);
  CHECK(lat.skipped.size() == 1);  // alpha = 0
  REQUIRE(lat.eigenvalues.size() == 2);
}

TEST_CASE("pole lattices") {
  const double spacing = 2.0 * std::numbers::pi / std::log(2.0);
  const PoleLattice one = pole_lattice(one_rep(), 3, 2);
  CHECK(has_point(one.points, {1.0, 0.0}));
  CHECK(has_point(one.points, {1.0, spacing}));
  CHECK(has_point(one.points, {0.0, 0.0}));
  CHECK(has_point(one.points, {-1.0, -3.0 * spacing}));
  CHECK(one.points.size() == 7 * 3);
  for (const PolePoint& p : one.points) {
    CHECK(p.s.real() == doctest::Approx(1.0 - p.l));
    CHECK(p.s.imag() == doctest::Approx(spacing * static_cast<double>(p.m)));
  }

  const PoleLattice tm = pole_lattice(tm_rep(), 1, 0);
  CHECK(tm.points.size() == 3);  // alpha = 1 only
  CHECK(has_point(tm.points, {1.0, 0.0}));

  const auto in = lattice_points_in(one_rep(), 0.9, 1.1, 10.0);
  CHECK(in.size() == 2);
  CHECK(has_point(in, {1.0, 0.0}));
  CHECK(has_point(in, {1.0, spacing}));
  CHECK(lattice_points_in(one_rep(), 0.5, 0.5, 20.0).empty());
  CHECK_THROWS_AS(pole_lattice(one_rep(), -1, 0), DomainError);
}

TEST_CASE("representation json round trip") {
  const LinearRepresentation rep = tm_rep();
  const io::Json j = io::representation_json(rep);
  CHECK(j["k"] == 2);
  CHECK(j["t"] == 2);
  CHECK(j["seed"] == io::Json::array({-1, 1}));
  const LinearRepresentation back = io::representation_from_json(io::Json::parse(j.dump()));
  CHECK(back.matrices() == rep.matrices());
  CHECK(back.initial() == rep.initial());
  CHECK(back.labels() == rep.labels());
  CHECK(back.verified_to() == rep.verified_to());
  CHECK_THROWS_AS(io::representation_from_json(io::Json::parse(R"({"k": 2})")), DomainError);
  CHECK_THROWS_AS(LinearRepresentation(2, {{{1}}}, {{1}}, 0), DomainError);
}
