#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace kscope {

using cplx = std::complex<double>;
using cplx_ld = std::complex<long double>;

struct ZetaEval {
  cplx s;
  cplx value;
  int terms_used = 0;       // N in the Euler-Maclaurin split
  int bernoulli_order = 0;  // number of Bernoulli correction terms
  double error_estimate = 0.0;
};

// Euler-Maclaurin with adaptive N and up to 30 Bernoulli terms.
// Working range |s| <= 1000. Throws DomainError at s = 1 or outside the range,
// PrecisionError if target_tol cannot be met.
ZetaEval zeta_em(cplx s, double target_tol = 1e-12);
// Same evaluation carried out in extended precision.
cplx_ld zeta_ld(cplx_ld s, long double target_tol = 1e-15L);

// log Gamma on the branch continuous from the positive real axis (Re z > 0),
// extended by reflection elsewhere.
cplx log_gamma(cplx z);
cplx gamma(cplx z);

// chi(s) with zeta(s) = chi(s) zeta(1 - s).
cplx functional_factor(cplx s);

double riemann_siegel_theta(double t);
// Real-valued Z(t) = exp(i theta(t)) zeta(1/2 + i t).
double hardy_z(double t);

struct ZeroRecord {
  double ordinate = 0.0;
  double lo = 0.0;  // bracket with Z(lo), Z(hi) of opposite sign
  double hi = 0.0;
  double refined_to = 0.0;
};

// Sign changes of Z on (0, T] on a grid of the given step, bisected to 1e-6.
std::vector<ZeroRecord> critical_line_zeros(double T, double grid_step = 0.05);

struct ZeroCount {
  double T = 0.0;
  std::int64_t count = 0;         // argument principle
  std::int64_t sign_changes = 0;  // critical-line sign changes up to T
  double winding = 0.0;           // total arg change / 2 pi before rounding
  int contour_evaluations = 0;

  bool agrees() const noexcept { return count == sign_changes; }
};

// Zeros with 0 < Im s <= T via the argument principle on (-0.5, 1.5) x (0.1, T).
// Throws ContourError when T is within 1e-3 of a zero ordinate or the
// winding cannot be resolved.
ZeroCount zero_count(double T);

struct TlogTRow {
  double T = 0.0;
  std::int64_t N = 0;
  double ratio_T = 0.0;      // N / T
  double ratio_TlogT = 0.0;  // N / (T log T)
};

std::vector<TlogTRow> tlogt_ratio_table(std::span<const double> Ts);
bool ratio_T_strictly_increasing(std::span<const TlogTRow> rows);

}  // namespace kscope
