#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kscope/automaton.hpp"
#include "kscope/seqgen.hpp"

namespace kscope {

using cplx = std::complex<double>;

enum class EvalMethod { direct, recursion, zeta_quotient };
std::string_view method_name(EvalMethod m);

struct EvalFlags {
  bool near_singular = false;
  double det_magnitude = 0.0;  // smallest |det| seen in a linear solve (recursion only)
  bool truncated = false;
  std::int64_t terms = 0;      // summation length (direct) or binomial terms (recursion)
  bool removable = false;      // value obtained by averaging around a cancelled lattice point
};

struct EvalResult {
  cplx s;
  std::optional<cplx> value;   // empty when the evaluation is refused (candidate pole)
  EvalMethod method = EvalMethod::direct;
  double error_estimate = 0.0;
  EvalFlags flags;
};

// |f(n)| <= C n^d for every n > N; poly_degree is the integer part used for
// the convergence guard Re s > poly_degree + 1.25.
struct GrowthBound {
  double C = 1.0;
  double d = 0.0;
  int poly_degree = 0;
};

GrowthBound growth_bound(const FunctionId& id, std::int64_t N);

// sum_{n <= N_terms} f(n) n^{-s}; error C N^{1+d-Re s} / (Re s - 1 - d).
// Throws DomainError outside the convergence region, CapacityError if N_terms > t.size().
EvalResult direct_sum(const ValueTable& t, cplx s, std::int64_t N_terms);

struct RecursionOptions {
  int levels = -1;                  // unit steps down from the direct-sum region; -1 = automatic
  int m_max = 200;                  // cap on binomial terms per level
  double base_offset = 4.0;         // automatic levels put the direct region at Re s >= d + base_offset
  double base_tol = 1e-15;          // tail bound for direct sums in the base region
  std::int64_t max_base_terms = 4'000'000;
  double singular_det = 1e-8;
  double removable_radius = 1e-3;   // circle radius used to average across cancelled lattice points
};

// Analytic continuation of G(s) = sum U_n n^{-s} through
// (I - k^{1-s} avg) G(s) = sum_{n<k} U_n n^{-s} + sum_r A_r sum_m C(s+m-1, m) (-r)^m G(s+m) / k^{s+m}.
// Returns the output coordinate. Refuses (near_singular) when |det| < singular_det.
EvalResult continue_via_recursion(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts = {});
EvalResult continue_via_recursion(const LinearRepresentation& rep, cplx s, int levels, int m_max);
// Full vector G(s); empty when refused.
std::optional<std::vector<cplx>> continue_vector(const LinearRepresentation& rep, cplx s,
                                                 const RecursionOptions& opts = {});

// |det(I - k^{1-s} avg)|
double system_det_magnitude(const LinearRepresentation& rep, cplx s);

// Closed forms for the Dirichlet series of mu, lambda, q_m, phi, rho, tau(n^2),
// tau(n)^2, chi_P, chi_PP, omega and big_omega.
class IdentityId {
 public:
  // Throws DomainError for functions without a closed form here.
  explicit IdentityId(FunctionId fn);
  const FunctionId& function() const noexcept { return fn_; }
  std::string formula() const;
  // Re s must exceed this (2 for phi, 1 otherwise).
  double validity_abscissa() const;
  bool uses_log_zeta() const;
  // {2, 2.5, 3, 2+i}, shifted right by one for phi.
  std::vector<cplx> sample_points() const;

 private:
  FunctionId fn_;
};

std::vector<IdentityId> all_identities();

// Throws DomainError outside the validity half-plane (and, for the log-zeta
// forms, outside real s > 1 or Re s >= 2).
EvalResult zeta_quotient_eval(const IdentityId& id, cplx s);

struct IdentitySample {
  cplx s;
  cplx lhs;  // direct sum
  cplx rhs;  // closed form
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::string function;
  std::string formula;
  std::int64_t N_terms = 0;
  std::vector<IdentitySample> samples;
  bool all_pass() const;
};

// PASS iff |direct - closed form| <= direct-sum tail bound + 1e-9. Samples need Re s >= 1.25.
IdentityReport verify_identity(const IdentityId& id, const ValueTable& t, std::span<const cplx> samples,
                               std::int64_t N_terms);

struct Singularity {
  std::int64_t n = 1;
  double point = 1.0;  // 1/n
};

// 1/n for square-free n <= n_max, descending.
std::vector<Singularity> landau_walfisz_singularities(std::int64_t n_max);

struct PoleCandidate {
  cplx s;
  int level = 0;               // which det(I - k^{1-s-j} avg) vanishes
  double det_magnitude = 0.0;
  double growth_ratio = 0.0;   // |G| at distance 1e-4 over |G| at 1e-3
  bool genuine = false;        // |G| blows up: a pole of the output coordinate
  bool matches_lattice = false;
};

struct PoleScanReport {
  double a = 0.0, b = 0.0, T = 0.0, step = 0.0;
  std::int64_t grid_points = 0;
  std::vector<PoleCandidate> candidates;   // refined det zeros in the rectangle
  std::vector<PolePoint> predicted;        // lattice points in the rectangle
  std::int64_t observed_poles() const;
  bool observed_within_predicted() const;
};

struct ScanRow {
  double re = 0.0, im = 0.0;
  double abs_value = 0.0;  // NaN when refused or not evaluated
  double det_magnitude = 0.0;
  bool near_singular = false;
  bool truncated = false;
};

// Grid search of det zeros over Re s in [a, b], Im s in [0, T] (a == b allowed),
// Newton refinement, and classification of each zero as a genuine or cancelled pole.
PoleScanReport pole_scan(const LinearRepresentation& rep, double a, double b, double T, double step);
// Grid evaluation of the continued series for plotting.
std::vector<ScanRow> scan_grid(const LinearRepresentation& rep, double a, double b, double T, double step,
                               int threads = 1);

}  // namespace kscope
