#include "kscope/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "kscope/errors.hpp"

namespace kscope {

namespace {

// B_{2j} / (2j)! for j = 1..31
constexpr std::array<long double, 31> kBernoulliOverFactorial = {
    8.333333333333333333333333e-2L,    -1.388888888888888888888889e-3L, 3.306878306878306878306878e-5L,
    -8.267195767195767195767196e-7L,   2.087675698786809897921009e-8L,  -5.284190138687493184847682e-10L,
    1.338253653068467883282698e-11L,   -3.389680296322582866830195e-13L, 8.586062056277844564135905e-15L,
    -2.174868698558061873041516e-16L,  5.509002828360229515202653e-18L,  -1.395446468581252334070769e-19L,
    3.53470703962946747169323e-21L,    -8.953517427037546850402611e-23L, 2.267952452337683060310951e-24L,
    -5.744790668872202445263882e-26L,  1.455172475614864901866265e-27L,  -3.685994940665310178181782e-29L,
    9.336734257095044672032555e-31L,   -2.365022415700629934559635e-32L, 5.990671762482134304659912e-34L,
    -1.517454884468290261710813e-35L,  3.843758125454188232229445e-37L,  -9.736353072646691035267621e-39L,
    2.4662470442006809571064e-40L,     -6.247076741820743693148757e-42L, 1.582403024464491429751082e-43L,
    -4.008273685948935968530012e-45L,  1.015307585556955631163071e-46L,  -2.571804158241871749924819e-48L,
    6.514456035233814931558435e-50L,
};
constexpr int kMaxBernoulli = 30;
constexpr double kPi = std::numbers::pi;

struct EmResult {
  cplx_ld value;
  int N;
  int order;
  long double bound;
};

// Chooses N and the Bernoulli order so the remainder bound
// |s+2p+1|/(sigma+2p+1) * |first omitted term| is below tol.
EmResult euler_maclaurin(cplx_ld s, long double tol) {
  const long double sigma = s.real();
  const long double height = std::abs(s.imag());
  int N = static_cast<int>(std::max<long double>(10.0L, height / (2.0L * kPi) + 10.0L));
  for (int attempt = 0; attempt < 40; ++attempt, N = N + N / 2) {
    const long double logN = std::log(static_cast<long double>(N));
    const cplx_ld Ns = std::exp(-s * logN);  // N^{-s}
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{1-s-2j}
    cplx_ld rising = s;  // s(s+1)...(s+2j-2) for j = 1
    cplx_ld npow = Ns / static_cast<long double>(N);
    std::array<cplx_ld, kMaxBernoulli + 1> terms{};
    int order = -1;
    long double bound = 0.0L;
    for (int j = 1; j <= kMaxBernoulli + 1; ++j) {
      terms[static_cast<std::size_t>(j - 1)] = kBernoulliOverFactorial[static_cast<std::size_t>(j - 1)] * rising * npow;
      const int p = j - 1;  // terms 1..p kept, term j is the first omitted
      const long double denom = sigma + 2.0L * p + 1.0L;
      if (p >= 1 && denom > 0.0L) {
        const long double b = std::abs(s + static_cast<long double>(2 * p + 1)) / denom *
                              std::abs(terms[static_cast<std::size_t>(j - 1)]);
        if (b <= tol) {
          order = p;
          bound = b;
          break;
        }
      }
      rising *= (s + static_cast<long double>(2 * j - 1)) * (s + static_cast<long double>(2 * j));
      npow /= static_cast<long double>(N) * static_cast<long double>(N);
    }
    if (order < 0) continue;

    cplx_ld sum = 0.0L;
    for (int n = N - 1; n >= 1; --n) sum += std::exp(-s * std::log(static_cast<long double>(n)));
    sum += Ns * static_cast<long double>(N) / (s - 1.0L) + Ns / 2.0L;
    for (int j = order; j >= 1; --j) sum += terms[static_cast<std::size_t>(j - 1)];
    const long double rounding = 64.0L * static_cast<long double>(N) * 1e-19L;
    return {sum, N, order, bound + rounding};
  }
  throw PrecisionError("Euler-Maclaurin could not reach tolerance " + std::to_string(static_cast<double>(tol)));
}

void check_zeta_argument(cplx_ld s) {
  if (std::abs(s - 1.0L) < 1e-15L) throw DomainError("zeta has a pole at s = 1");
  if (std::abs(s) > 1000.0L) throw DomainError("zeta working range is |s| <= 1000");
}

}  // namespace

ZetaEval zeta_em(cplx s, double target_tol) {
  const cplx_ld sl(s.real(), s.imag());
  check_zeta_argument(sl);
  const EmResult r = euler_maclaurin(sl, static_cast<long double>(target_tol) / 2.0L);
  ZetaEval out;
  out.s = s;
  out.value = cplx(static_cast<double>(r.value.real()), static_cast<double>(r.value.imag()));
  out.terms_used = r.N;
  out.bernoulli_order = r.order;
  out.error_estimate = static_cast<double>(r.bound) + 1e-16 * std::abs(out.value);
  if (out.error_estimate > target_tol * std::max(1.0, std::abs(out.value))) {
    throw PrecisionError("zeta error estimate " + std::to_string(out.error_estimate) + " exceeds tolerance");
  }
  return out;
}

cplx_ld zeta_ld(cplx_ld s, long double target_tol) {
  check_zeta_argument(s);
  return euler_maclaurin(s, target_tol).value;
}

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  cplx shift = 0.0;
  while (std::abs(z) < 15.0 || z.real() < 10.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static constexpr std::array<double, 8> c = {1.0 / 12,         -1.0 / 360,  1.0 / 1260,       -1.0 / 1680,
                                              1.0 / 1188,       -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx p = inv;
  for (const double ci : c) {
    series += ci * p;
    p *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx functional_factor(cplx s) {
  // 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s)
  return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) * gamma(1.0 - s);
}

double riemann_siegel_theta(double t) {
  return log_gamma(cplx(0.25, t / 2.0)).imag() - t / 2.0 * std::log(kPi);
}

double hardy_z(double t) {
  const cplx_ld z = zeta_ld(cplx_ld(0.5L, t), 1e-14L);
  const long double th = riemann_siegel_theta(t);
  return static_cast<double>(std::cos(th) * z.real() - std::sin(th) * z.imag());
}

std::vector<ZeroRecord> critical_line_zeros(double T, double grid_step) {
  if (!(T > 0.0) || T > 1000.0) throw DomainError("critical_line_zeros needs 0 < T <= 1000");
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  std::vector<ZeroRecord> out;
  const auto steps = static_cast<long>(std::ceil(T / grid_step));
  double t0 = 0.0;
  double z0 = hardy_z(t0);
  for (long i = 1; i <= steps; ++i) {
    const double t1 = std::min(T, static_cast<double>(i) * grid_step);
    const double z1 = hardy_z(t1);
    if ((z0 < 0.0) != (z1 < 0.0)) {
      double lo = t0, hi = t1, zlo = z0;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double zm = hardy_z(mid);
        if ((zm < 0.0) == (zlo < 0.0)) {
          lo = mid;
          zlo = zm;
        } else {
          hi = mid;
        }
      }
      out.push_back({0.5 * (lo + hi), lo, hi, 1e-6});
    }
    t0 = t1;
    z0 = z1;
  }
  return out;
}

namespace {

struct ArgTracker {
  int evaluations = 0;

  cplx_ld f(cplx_ld s) {
    ++evaluations;
    return zeta_ld(s, 1e-13L);
  }

  // Arg change of zeta along [a, b], subdividing until each piece changes by
  // less than pi/2 and the halves agree with the whole.
  long double track(cplx_ld a, cplx_ld fa, cplx_ld b, cplx_ld fb, int depth) {
    const long double whole = std::arg(fb / fa);
    const cplx_ld m = 0.5L * (a + b);
    const cplx_ld fm = f(m);
    const long double d1 = std::arg(fm / fa);
    const long double d2 = std::arg(fb / fm);
    const long double limit = std::numbers::pi_v<long double> / 2.0L;
    if (std::abs(whole) < limit && std::abs(d1) < limit && std::abs(d2) < limit &&
        std::abs(d1 + d2 - whole) < 1e-9L) {
      return whole;
    }
    if (depth > 40 || std::abs(b - a) < 1e-7L) {
      throw ContourError("argument tracking failed near s = " + std::to_string(static_cast<double>(m.real())) +
                         " + " + std::to_string(static_cast<double>(m.imag())) + "i");
    }
    return track(a, fa, m, fm, depth + 1) + track(m, fm, b, fb, depth + 1);
  }

  long double edge(cplx_ld a, cplx_ld b, long double piece) {
    const auto pieces = std::max<long>(1, static_cast<long>(std::ceil(std::abs(b - a) / piece)));
    long double total = 0.0L;
    cplx_ld prev = a;
    cplx_ld fprev = f(a);
    for (long i = 1; i <= pieces; ++i) {
      const cplx_ld next = a + (b - a) * (static_cast<long double>(i) / static_cast<long double>(pieces));
      const cplx_ld fnext = f(next);
      total += track(prev, fprev, next, fnext, 0);
      prev = next;
      fprev = fnext;
    }
    return total;
  }
};

}  // namespace

ZeroCount zero_count(double T) {
  if (!(T > 0.0) || T > 1000.0) throw DomainError("zero_count needs 0 < T <= 1000");
  const std::vector<ZeroRecord> zeros = critical_line_zeros(T);
  for (const ZeroRecord& z : zeros) {
    if (std::abs(z.ordinate - T) < 1e-3) {
      throw ContourError("T = " + std::to_string(T) + " is within 1e-3 of the zero at " + std::to_string(z.ordinate) +
                         "; shift T");
    }
  }
  if (!zeros.empty() || T > 14.0) {
    // a zero just above T would be missed by the grid but still sit near the contour
    if (std::abs(hardy_z(T)) < 1e-6) throw ContourError("contour passes too close to a zero; shift T");
  }

  constexpr long double left = -0.5L, right = 1.5L, bottom = 0.1L;
  const long double top = T;
  ArgTracker tracker;
  long double total = 0.0L;
  total += tracker.edge({right, bottom}, {right, top}, 0.25L);
  total += tracker.edge({right, top}, {left, top}, 0.05L);
  total += tracker.edge({left, top}, {left, bottom}, 0.25L);
  total += tracker.edge({left, bottom}, {right, bottom}, 0.25L);

  ZeroCount out;
  out.T = T;
  out.winding = static_cast<double>(total / (2.0L * std::numbers::pi_v<long double>));
  out.count = std::llround(out.winding);
  out.sign_changes = static_cast<std::int64_t>(zeros.size());
  out.contour_evaluations = tracker.evaluations;
  if (std::abs(out.winding - static_cast<double>(out.count)) > 1e-3) {
    throw ContourError("winding number " + std::to_string(out.winding) + " is not an integer");
  }
  return out;
}

std::vector<TlogTRow> tlogt_ratio_table(std::span<const double> Ts) {
  std::vector<TlogTRow> rows;
  for (const double T : Ts) {
    const ZeroCount c = zero_count(T);
    rows.push_back({T, c.count, static_cast<double>(c.count) / T,
                    static_cast<double>(c.count) / (T * std::log(T))});
  }
  return rows;
}

bool ratio_T_strictly_increasing(std::span<const TlogTRow> rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].ratio_T > rows[i - 1].ratio_T)) return false;
  }
  return true;
}

}  // namespace kscope
