#include "kscope/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "kscope/errors.hpp"
#include "kscope/zeta.hpp"

namespace kscope {

namespace {

using cld = std::complex<long double>;
using Vec = std::vector<cld>;
using CMatrix = std::vector<std::vector<cld>>;

constexpr double kLn2 = std::numbers::ln2;

// max over y >= 0 of (a y + b) e^{-eps y}: the constant C in a log n + b <= C n^eps.
double log_to_power_constant(double a, double b, double eps) {
  const double y = 1.0 / eps - b / a;
  if (y <= 0.0) return b;
  return (a * y + b) * std::exp(-eps * y);
}

double loglog(std::int64_t N) { return std::log(std::log(static_cast<double>(std::max<std::int64_t>(N, 16)))); }

cld to_ld(cplx z) { return {z.real(), z.imag()}; }
cplx to_d(cld z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

long double norm_inf(const Vec& v) {
  long double m = 0.0L;
  for (const cld& x : v) m = std::max(m, std::abs(x));
  return m;
}

// LU with partial pivoting; returns det and overwrites rhs columns with solutions.
struct LuResult {
  cld det;
  bool singular = false;
};

LuResult lu_solve(CMatrix m, std::vector<Vec>& rhs) {
  const std::size_t n = m.size();
  cld det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (m[p][c] == cld(0.0L, 0.0L)) return {0.0L, true};
    if (p != c) {
      std::swap(m[p], m[c]);
      for (auto& b : rhs) std::swap(b[p], b[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const cld f = m[r][c] / m[c][c];
      if (f == cld(0.0L, 0.0L)) continue;
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
      for (auto& b : rhs) b[r] -= f * b[c];
    }
  }
  for (auto& b : rhs) {
    for (std::size_t i = n; i-- > 0;) {
      cld acc = b[i];
      for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * b[j];
      b[i] = acc / m[i][i];
    }
  }
  return {det, false};
}

CMatrix average_ld(const LinearRepresentation& rep) {
  const RationalMatrix avg = average_matrix(rep);
  CMatrix out(avg.size(), std::vector<cld>(avg.size()));
  for (std::size_t i = 0; i < avg.size(); ++i) {
    for (std::size_t j = 0; j < avg.size(); ++j) out[i][j] = static_cast<long double>(avg[i][j].get_d());
  }
  return out;
}

// I - k^{1-s} avg
CMatrix system_matrix(const CMatrix& avg, int k, cld s) {
  const cld z = std::exp((1.0L - s) * std::log(static_cast<long double>(k)));
  CMatrix m(avg.size(), std::vector<cld>(avg.size()));
  for (std::size_t i = 0; i < avg.size(); ++i) {
    for (std::size_t j = 0; j < avg.size(); ++j) m[i][j] = (i == j ? 1.0L : 0.0L) - z * avg[i][j];
  }
  return m;
}

cld determinant(CMatrix m) {
  std::vector<Vec> none;
  return lu_solve(std::move(m), none).det;
}

struct RepGrowth {
  long double C;
  long double d;
};

// ||U_n||_inf <= C n^d with C = max ||U_m|| (m < k) and d = log_k(max row sum).
RepGrowth rep_growth(const LinearRepresentation& rep) {
  long double C = 0.0L;
  for (const auto& u : rep.initial()) {
    for (const std::int64_t x : u) C = std::max<long double>(C, std::abs(static_cast<long double>(x)));
  }
  const long double a = std::max<long double>(1.0L, static_cast<long double>(rep.max_row_sum()));
  return {C, std::log(a) / std::log(static_cast<long double>(rep.base()))};
}

struct SubSingular {
  int level;
  double det;
};

// One continuation of G(s): values at s + j for integer offsets j, memoized.
// Offsets j >= levels come from direct sums; smaller offsets from the linear system.
// For |s| large the first q < split terms are summed exactly and only the tail
// sum_{q >= split} U_q q^{-s-m} is expanded, which keeps the binomial series tame.
class Continuation {
 public:
  Continuation(const LinearRepresentation& rep, cld s, int levels, const RecursionOptions& opts)
      : rep_(rep), s_(s), levels_(levels), opts_(opts), k_(rep.base()), t_(static_cast<std::size_t>(rep.dimension())),
        avg_(average_ld(rep)), growth_(rep_growth(rep)) {
    const long double size = std::abs(s);
    split_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(size * (k_ - 1) / (4.0L * k_))));
    min_det_ = std::numeric_limits<double>::infinity();
  }

  struct Level {
    bool ready = false;
    Vec G, H, T;  // G = H + T, H = sum_{q < split}, T = sum_{q >= split}
    long double errG = 0.0L, errT = 0.0L;
  };

  // empty if the top-level system is singular
  std::optional<Vec> top() {
    if (levels_ > 0) {
      const cld det = determinant(system_matrix(avg_, k_, s_));
      min_det_ = std::min(min_det_, static_cast<double>(std::abs(det)));
      if (std::abs(det) < opts_.singular_det) return std::nullopt;
    }
    return level(0).G;
  }

  long double error() { return level(0).errG; }
  double min_det() const { return min_det_; }
  bool truncated() const { return truncated_; }
  std::int64_t binomial_terms() const { return binomial_terms_; }

 private:
  const long double* state(std::int64_t n) {
    while (static_cast<std::int64_t>(states_.size() / t_) < n) {
      const std::int64_t m = static_cast<std::int64_t>(states_.size() / t_) + 1;
      const std::size_t base = states_.size();
      states_.resize(base + t_);
      if (m < k_) {
        for (std::size_t c = 0; c < t_; ++c) {
          states_[base + c] = static_cast<long double>(rep_.initial()[static_cast<std::size_t>(m - 1)][c]);
        }
      } else {
        const IntMatrix& a = rep_.matrix(static_cast<int>(m % k_));
        const std::size_t src = static_cast<std::size_t>(m / k_ - 1) * t_;
        for (std::size_t i = 0; i < t_; ++i) {
          long double acc = 0.0L;
          for (std::size_t j = 0; j < t_; ++j) acc += static_cast<long double>(a[i][j]) * states_[src + j];
          states_[base + i] = acc;
        }
      }
    }
    return &states_[static_cast<std::size_t>(n - 1) * t_];
  }

  static cld power(long double base, cld exponent) { return std::exp(exponent * std::log(base)); }

  void axpy(Vec& y, cld a, const long double* x) const {
    for (std::size_t c = 0; c < t_; ++c) y[c] += a * x[c];
  }

  const Level& level(int j) {
    auto& lv = levels_memo_[j];
    if (lv.ready) return lv;
    if (j >= levels_) {
      direct(j, lv);
    } else {
      solve(j, lv);
    }
    lv.ready = true;
    return lv;
  }

  void direct(int j, Level& lv) {
    const cld sj = s_ + static_cast<long double>(j);
    const long double sigma = sj.real();
    const long double gap = sigma - 1.0L - growth_.d;
    std::int64_t N = split_ + k_;
    long double tail = 0.0L;
    if (growth_.C > 0.0L) {
      const long double need = std::pow(growth_.C / (gap * static_cast<long double>(opts_.base_tol)), 1.0L / gap);
      N = std::max<std::int64_t>(N, static_cast<std::int64_t>(std::min<long double>(need, 9e18L)) + 1);
    }
    if (N > opts_.max_base_terms) {
      N = opts_.max_base_terms;
      truncated_ = true;
    }
    if (growth_.C > 0.0L) tail = growth_.C * std::pow(static_cast<long double>(N), -gap) / gap;
    lv.G.assign(t_, 0.0L);
    lv.H.assign(t_, 0.0L);
    lv.T.assign(t_, 0.0L);
    for (std::int64_t n = N; n >= 1; --n) {
      const cld w = power(static_cast<long double>(n), -sj);
      axpy(n < split_ ? lv.H : lv.T, w, state(n));
    }
    for (std::size_t c = 0; c < t_; ++c) lv.G[c] = lv.H[c] + lv.T[c];
    const long double rounding = 1e-18L * (1.0L + norm_inf(lv.G)) * std::log2(static_cast<long double>(N) + 1.0L);
    lv.errG = lv.errT = tail + rounding;
  }

  void solve(int j, Level& lv) {
    const cld sj = s_ + static_cast<long double>(j);
    CMatrix m = system_matrix(avg_, k_, sj);
    // inverse columns give both the solution and the error amplification
    std::vector<Vec> cols(t_ + 1, Vec(t_, 0.0L));
    for (std::size_t i = 0; i < t_; ++i) cols[i][i] = 1.0L;

    {
      const cld det = determinant(m);
      min_det_ = std::min(min_det_, static_cast<double>(std::abs(det)));
      if (std::abs(det) < opts_.singular_det) {
        if (j == 0) throw std::logic_error("top-level singularity must be screened by top()");
        throw SubSingular{j, static_cast<double>(std::abs(det))};
      }
    }

    Vec rhs(t_, 0.0L);
    for (std::int64_t n = 1; n < k_; ++n) axpy(rhs, power(static_cast<long double>(n), -sj), state(n));

    Vec head(t_, 0.0L);  // H_j
    for (std::int64_t q = 1; q < split_; ++q) axpy(head, power(static_cast<long double>(q), -sj), state(q));
    const cld kms = power(static_cast<long double>(k_), -sj);

    long double err_rhs = 0.0L;
    for (int r = 1; r < k_; ++r) {
      Vec acc(t_, 0.0L);
      for (std::int64_t q = 1; q < split_; ++q) {
        axpy(acc, power(static_cast<long double>(k_ * q + r), -sj), state(q));
      }
      for (std::size_t c = 0; c < t_; ++c) acc[c] -= kms * head[c];

      // sum_{m>=1} C(s+m-1, m) (-r/k)^m k^{-s} T_{j+m}
      const long double ratio = -static_cast<long double>(r) / static_cast<long double>(k_);
      cld coef = kms;
      long double err = 0.0L;
      bool converged = false;
      for (int mm = 1; mm <= opts_.m_max; ++mm) {
        coef *= (sj + static_cast<long double>(mm - 1)) / static_cast<long double>(mm) * ratio;
        const Level& sub = level(j + mm);
        long double term_size = 0.0L;
        for (std::size_t c = 0; c < t_; ++c) {
          const cld term = coef * sub.T[c];
          acc[c] += term;
          term_size = std::max(term_size, std::abs(term));
        }
        err += std::abs(coef) * sub.errT;
        binomial_terms_ = std::max<std::int64_t>(binomial_terms_, mm);
        if (mm >= 2 && term_size <= 1e-17L * std::max(1.0L, norm_inf(acc))) {
          converged = true;
          break;
        }
      }
      if (!converged) truncated_ = true;

      const IntMatrix& a = rep_.matrix(r);
      long double row_norm = 0.0L;
      for (std::size_t i = 0; i < t_; ++i) {
        long double rs = 0.0L;
        for (std::size_t c = 0; c < t_; ++c) {
          rhs[i] += static_cast<long double>(a[i][c]) * acc[c];
          rs += std::abs(static_cast<long double>(a[i][c]));
        }
        row_norm = std::max(row_norm, rs);
      }
      err_rhs += row_norm * err;
    }

    cols[t_] = rhs;
    lu_solve(std::move(m), cols);
    long double inv_norm = 0.0L;
    for (std::size_t i = 0; i < t_; ++i) {
      long double rs = 0.0L;
      for (std::size_t c = 0; c < t_; ++c) rs += std::abs(cols[c][i]);
      inv_norm = std::max(inv_norm, rs);
    }
    lv.G = cols[t_];
    lv.H = head;
    lv.T.resize(t_);
    for (std::size_t c = 0; c < t_; ++c) lv.T[c] = lv.G[c] - head[c];
    lv.errG = inv_norm * (err_rhs + 1e-18L * (1.0L + norm_inf(rhs)));
    lv.errT = lv.errG;
  }

  const LinearRepresentation& rep_;
  cld s_;
  int levels_;
  RecursionOptions opts_;
  int k_;
  std::size_t t_;
  CMatrix avg_;
  RepGrowth growth_;
  std::int64_t split_ = 1;
  std::vector<long double> states_;
  std::map<int, Level> levels_memo_;
  double min_det_;
  bool truncated_ = false;
  std::int64_t binomial_terms_ = 0;
};

int resolve_levels(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts) {
  const long double d = rep_growth(rep).d;
  int levels = opts.levels;
  if (levels < 0) {
    levels = std::max(0, static_cast<int>(std::ceil(static_cast<double>(d) + opts.base_offset - s.real())));
  }
  if (!(s.real() + levels > 1.25 + static_cast<double>(d))) {
    throw DomainError("Re s + levels must exceed 1.25 + growth degree; raise levels");
  }
  return levels;
}

struct VectorEval {
  std::optional<Vec> value;
  EvalFlags flags;
  double error = 0.0;
};

VectorEval evaluate_vector(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts, bool allow_average);

// Averages over a small circle around s when a sub-level system is singular at s.
// A genuine pole shows up as |G| growing tenfold when the radius shrinks tenfold.
VectorEval average_around(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts, double det) {
  VectorEval out;
  out.flags.det_magnitude = det;
  const std::size_t coord = static_cast<std::size_t>(rep.output_coord());
  const double rho = opts.removable_radius;
  const cplx probe_dir = std::polar(1.0, std::numbers::pi / 3.0);
  const VectorEval far = evaluate_vector(rep, s + rho * probe_dir, opts, false);
  const VectorEval near = evaluate_vector(rep, s + 0.1 * rho * probe_dir, opts, false);
  if (!far.value || !near.value ||
      std::abs((*near.value)[coord]) > 3.0L * std::abs((*far.value)[coord])) {
    out.flags.near_singular = true;
    return out;
  }
  Vec sum(static_cast<std::size_t>(rep.dimension()), 0.0L);
  const cplx dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  double err = 0.0;
  for (const cplx& dir : dirs) {
    const VectorEval v = evaluate_vector(rep, s + rho * dir, opts, false);
    if (!v.value) {
      out.flags.near_singular = true;
      return out;
    }
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += (*v.value)[c] / 4.0L;
    err = std::max(err, v.error);
    out.flags.truncated = out.flags.truncated || v.flags.truncated;
    out.flags.terms = std::max(out.flags.terms, v.flags.terms);
  }
  // fourth-order remainder of the circle average, estimated from the spread of the samples
  out.error = err + std::pow(rho, 4) * static_cast<double>(norm_inf(sum));
  out.value = sum;
  out.flags.removable = true;
  return out;
}

VectorEval evaluate_vector(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts, bool allow_average) {
  const int levels = resolve_levels(rep, s, opts);
  VectorEval out;
  Continuation cont(rep, to_ld(s), levels, opts);
  try {
    out.value = cont.top();
    out.flags.det_magnitude = cont.min_det();
    if (!out.value) {
      out.flags.near_singular = true;
      return out;
    }
    out.error = static_cast<double>(cont.error());
    out.flags.truncated = cont.truncated();
    out.flags.terms = cont.binomial_terms();
  } catch (const SubSingular& sub) {
    if (!allow_average) {
      out.flags.near_singular = true;
      out.flags.det_magnitude = sub.det;
      return out;
    }
    return average_around(rep, s, opts, sub.det);
  }
  return out;
}

int mobius(std::int64_t n) {
  int mu = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

std::int64_t totient(std::int64_t n) {
  std::int64_t out = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    out -= out / p;
  }
  if (n > 1) out -= out / n;
  return out;
}

cld zeta_q(cld s) { return zeta_ld(s, 1e-16L); }

// log zeta(x), accurate in absolute terms when zeta(x) is close to 1.
cld log_zeta(cld x) {
  cld w = 0.0L;
  if (x.real() >= 30.0L) {
    for (int n = 2;; ++n) {
      const cld term = std::exp(-x * std::log(static_cast<long double>(n)));
      w += term;
      if (std::abs(term) < 1e-30L) break;
    }
  } else {
    w = zeta_q(x) - 1.0L;
  }
  if (std::abs(w) < 1e-3L) {
    cld sum = 0.0L, p = w;
    for (int i = 1; i < 40; ++i) {
      sum += (i % 2 == 1 ? 1.0L : -1.0L) * p / static_cast<long double>(i);
      p *= w;
      if (std::abs(p) < 1e-30L) break;
    }
    return sum;
  }
  return std::log(1.0L + w);
}

// Number of log-zeta terms needed: 2^{-n sigma} below 1e-19.
int log_series_length(long double sigma) {
  return static_cast<int>(std::ceil(63.0L / sigma)) + 1;
}

cld prime_zeta(cld s) {
  cld sum = 0.0L;
  const int n_max = log_series_length(s.real());
  for (int n = 1; n <= n_max; ++n) {
    const int mu = mobius(n);
    if (mu == 0) continue;
    sum += static_cast<long double>(mu) / static_cast<long double>(n) * log_zeta(static_cast<long double>(n) * s);
  }
  return sum;
}

}  // namespace

std::string_view method_name(EvalMethod m) {
  switch (m) {
    case EvalMethod::direct: return "direct";
    case EvalMethod::recursion: return "recursion";
    case EvalMethod::zeta_quotient: return "zeta_quotient";
  }
  return "direct";
}

GrowthBound growth_bound(const FunctionId& id, std::int64_t N) {
  if (id.modulus()) return {static_cast<double>(*id.modulus() - 1), 0.0, 0};
  // Nicolas-Robin: tau(n) <= n^{1.5379 log 2 / log log n}; Robin: omega(n) <= 1.3841 log n / log log n.
  const double tau_exp = 1.5379 * kLn2 / loglog(N);
  const double rho_exp = 1.3841 * kLn2 / loglog(N);
  constexpr double eps = 0.05;
  switch (id.tag()) {
    case FnTag::lambda:
    case FnTag::mu:
    case FnTag::abs_mu:
    case FnTag::q_m:
    case FnTag::chi_P:
    case FnTag::chi_PP:
    case FnTag::const_one:
    case FnTag::thue_morse_pm:
      return {1.0, 0.0, 0};
    case FnTag::identity_n:
    case FnTag::phi:
      return {1.0, 1.0, 1};
    case FnTag::omega:
    case FnTag::big_omega:  // <= log2 n
      return {log_to_power_constant(1.0 / kLn2, 0.0, eps), eps, 0};
    case FnTag::sum_binary_digits:  // <= log2 n + 1
      return {log_to_power_constant(1.0 / kLn2, 1.0, eps), eps, 0};
    case FnTag::tau:
      return {1.0, tau_exp, 0};
    case FnTag::tau_k:  // tau_k(n) <= tau(n)^{k-1}
      return {1.0, (id.param().value_or(2) - 1) * tau_exp, 0};
    case FnTag::rho:
    case FnTag::r_half_rho:
      return {1.0, rho_exp, 0};
    case FnTag::tau_of_square:  // tau(n^2) <= tau(n)^2
    case FnTag::tau_squared:
      return {1.0, 2.0 * tau_exp, 0};
    case FnTag::sigma_m: {
      const int m = id.param().value_or(1);
      if (m == 0) return {1.0, tau_exp, 0};
      if (m == 1) return {log_to_power_constant(1.0, 1.0, eps), 1.0 + eps, 1};  // sigma(n) <= n (1 + log n)
      return {zeta_em(cplx(m, 0.0)).value.real(), static_cast<double>(m), m};  // sigma_m(n) <= zeta(m) n^m
    }
    case FnTag::nth_prime:  // p_n <= n (log n + log log n) <= 2 n log n for n >= 6
      return {log_to_power_constant(2.0, 0.0, eps), 1.0 + eps, 1};
  }
  return {1.0, 0.0, 0};
}

EvalResult direct_sum(const ValueTable& t, cplx s, std::int64_t N_terms) {
  if (N_terms < 1 || N_terms > t.size()) {
    throw CapacityError("direct sum of " + std::to_string(N_terms) + " terms needs a table of that size; have " +
                        std::to_string(t.size()));
  }
  const GrowthBound g = growth_bound(t.id(), N_terms);
  const double sigma = s.real();
  if (!(sigma > g.poly_degree + 1.25) || !(sigma - 1.0 - g.d > 0.0)) {
    throw DomainError("direct sum of " + t.id().name() + " needs Re s > " +
                      std::to_string(std::max(g.poly_degree + 1.25, 1.0 + g.d)));
  }
  long double re = 0.0L, im = 0.0L, mass = 0.0L;
  const long double sl = sigma;
  const long double tl = s.imag();
  for (std::int64_t n = 1; n <= N_terms; ++n) {
    const std::int64_t v = t(n);
    if (v == 0) continue;
    const long double ln = std::log(static_cast<long double>(n));
    const long double mag = static_cast<long double>(v) * std::exp(-sl * ln);
    mass += std::abs(mag);
    if (tl == 0.0L) {
      re += mag;
    } else {
      const long double ang = -tl * ln;
      re += mag * std::cos(ang);
      im += mag * std::sin(ang);
    }
  }
  EvalResult out;
  out.s = s;
  out.value = cplx(static_cast<double>(re), static_cast<double>(im));
  out.method = EvalMethod::direct;
  const double gap = sigma - 1.0 - g.d;
  out.error_estimate = g.C * std::pow(static_cast<double>(N_terms), -gap) / gap + 1e-18 * static_cast<double>(mass);
  out.flags.truncated = true;
  out.flags.terms = N_terms;
  return out;
}

std::optional<std::vector<cplx>> continue_vector(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts) {
  const VectorEval v = evaluate_vector(rep, s, opts, true);
  if (!v.value) return std::nullopt;
  std::vector<cplx> out;
  for (const cld& x : *v.value) out.push_back(to_d(x));
  return out;
}

EvalResult continue_via_recursion(const LinearRepresentation& rep, cplx s, const RecursionOptions& opts) {
  const VectorEval v = evaluate_vector(rep, s, opts, true);
  EvalResult out;
  out.s = s;
  out.method = EvalMethod::recursion;
  out.flags = v.flags;
  out.error_estimate = v.error;
  if (v.value) out.value = to_d((*v.value)[static_cast<std::size_t>(rep.output_coord())]);
  return out;
}

EvalResult continue_via_recursion(const LinearRepresentation& rep, cplx s, int levels, int m_max) {
  RecursionOptions opts;
  opts.levels = levels;
  opts.m_max = m_max;
  return continue_via_recursion(rep, s, opts);
}

double system_det_magnitude(const LinearRepresentation& rep, cplx s) {
  return static_cast<double>(std::abs(determinant(system_matrix(average_ld(rep), rep.base(), to_ld(s)))));
}

IdentityId::IdentityId(FunctionId fn) : fn_(std::move(fn)) {
  if (fn_.modulus()) throw DomainError("no closed form for reduced sequences");
  switch (fn_.tag()) {
    case FnTag::mu:
    case FnTag::lambda:
    case FnTag::q_m:
    case FnTag::phi:
    case FnTag::rho:
    case FnTag::tau_of_square:
    case FnTag::tau_squared:
    case FnTag::chi_P:
    case FnTag::chi_PP:
    case FnTag::omega:
    case FnTag::big_omega:
      return;
    default:
      throw DomainError("no zeta-quotient identity for " + fn_.name());
  }
}

std::string IdentityId::formula() const {
  switch (fn_.tag()) {
    case FnTag::mu: return "1/zeta(s)";
    case FnTag::lambda: return "zeta(2s)/zeta(s)";
    case FnTag::q_m: return "zeta(s)/zeta(" + std::to_string(*fn_.param()) + "s)";
    case FnTag::phi: return "zeta(s-1)/zeta(s)";
    case FnTag::rho: return "zeta(s)^2/zeta(2s)";
    case FnTag::tau_of_square: return "zeta(s)^3/zeta(2s)";
    case FnTag::tau_squared: return "zeta(s)^4/zeta(2s)";
    case FnTag::chi_P: return "sum_n mu(n)/n log zeta(ns)";
    case FnTag::chi_PP: return "sum_k sum_n mu(n)/n log zeta(kns)";
    case FnTag::omega: return "zeta(s) sum_k mu(k)/k log zeta(ks)";
    case FnTag::big_omega: return "zeta(s) sum_k phi(k)/k log zeta(ks)";
    default: return "";
  }
}

double IdentityId::validity_abscissa() const { return fn_.tag() == FnTag::phi ? 2.0 : 1.0; }

bool IdentityId::uses_log_zeta() const {
  const FnTag t = fn_.tag();
  return t == FnTag::chi_P || t == FnTag::chi_PP || t == FnTag::omega || t == FnTag::big_omega;
}

std::vector<cplx> IdentityId::sample_points() const {
  const double shift = fn_.tag() == FnTag::phi ? 1.0 : 0.0;
  return {{2.0 + shift, 0.0}, {2.5 + shift, 0.0}, {3.0 + shift, 0.0}, {2.0 + shift, 1.0}};
}

std::vector<IdentityId> all_identities() {
  return {IdentityId(FunctionId(FnTag::mu)),          IdentityId(FunctionId(FnTag::lambda)),
          IdentityId(FunctionId(FnTag::q_m, 2)),      IdentityId(FunctionId(FnTag::phi)),
          IdentityId(FunctionId(FnTag::rho)),         IdentityId(FunctionId(FnTag::tau_of_square)),
          IdentityId(FunctionId(FnTag::tau_squared)), IdentityId(FunctionId(FnTag::chi_P)),
          IdentityId(FunctionId(FnTag::chi_PP)),      IdentityId(FunctionId(FnTag::omega)),
          IdentityId(FunctionId(FnTag::big_omega))};
}

EvalResult zeta_quotient_eval(const IdentityId& id, cplx s) {
  const double abscissa = id.validity_abscissa();
  if (!(s.real() > abscissa)) {
    throw DomainError(id.formula() + " holds only for Re s > " + std::to_string(abscissa));
  }
  if (id.uses_log_zeta() && !(s.imag() == 0.0 || s.real() >= 2.0)) {
    throw DomainError("log-zeta series are evaluated only for real s > 1 or Re s >= 2");
  }
  EvalResult out;
  out.s = s;
  out.method = EvalMethod::zeta_quotient;
  if (std::abs(s - cplx(abscissa, 0.0)) < 1e-6) {
    out.flags.near_singular = true;
    out.flags.det_magnitude = std::abs(s - cplx(abscissa, 0.0));
    return out;
  }
  const cld sl = to_ld(s);
  cld v = 0.0L;
  switch (id.function().tag()) {
    case FnTag::mu: v = 1.0L / zeta_q(sl); break;
    case FnTag::lambda: v = zeta_q(2.0L * sl) / zeta_q(sl); break;
    case FnTag::q_m: v = zeta_q(sl) / zeta_q(static_cast<long double>(*id.function().param()) * sl); break;
    case FnTag::phi: v = zeta_q(sl - 1.0L) / zeta_q(sl); break;
    case FnTag::rho: v = std::pow(zeta_q(sl), 2) / zeta_q(2.0L * sl); break;
    case FnTag::tau_of_square: v = std::pow(zeta_q(sl), 3) / zeta_q(2.0L * sl); break;
    case FnTag::tau_squared: v = std::pow(zeta_q(sl), 4) / zeta_q(2.0L * sl); break;
    case FnTag::chi_P: v = prime_zeta(sl); break;
    case FnTag::chi_PP: {
      const int k_max = log_series_length(sl.real());
      for (int k = 1; k <= k_max; ++k) {
        const int n_max = log_series_length(k * sl.real());
        for (int n = 1; n <= n_max; ++n) {
          const int mu = mobius(n);
          if (mu == 0) continue;
          v += static_cast<long double>(mu) / static_cast<long double>(n) *
               log_zeta(static_cast<long double>(k * n) * sl);
        }
      }
      break;
    }
    case FnTag::omega: v = zeta_q(sl) * prime_zeta(sl); break;
    case FnTag::big_omega: {
      cld sum = 0.0L;
      const int k_max = log_series_length(sl.real());
      for (int k = 1; k <= k_max; ++k) {
        sum += static_cast<long double>(totient(k)) / static_cast<long double>(k) *
               log_zeta(static_cast<long double>(k) * sl);
      }
      v = zeta_q(sl) * sum;
      break;
    }
    default: break;
  }
  out.value = to_d(v);
  out.error_estimate = 1e-14 * (1.0 + std::abs(*out.value));
  return out;
}

bool IdentityReport::all_pass() const {
  return std::all_of(samples.begin(), samples.end(), [](const IdentitySample& s) { return s.pass; });
}

IdentityReport verify_identity(const IdentityId& id, const ValueTable& t, std::span<const cplx> samples,
                               std::int64_t N_terms) {
  if (t.id() != id.function()) {
    throw DomainError("table holds " + t.id().name() + " but the identity is for " + id.function().name());
  }
  IdentityReport report;
  report.function = id.function().name();
  report.formula = id.formula();
  report.N_terms = N_terms;
  for (const cplx& s : samples) {
    if (s.real() < 1.25) throw DomainError("identity samples need Re s >= 1.25");
    const EvalResult lhs = direct_sum(t, s, N_terms);
    const EvalResult rhs = zeta_quotient_eval(id, s);
    if (!rhs.value) throw DomainError("closed form is singular at the sample point");
    IdentitySample sample;
    sample.s = s;
    sample.lhs = *lhs.value;
    sample.rhs = *rhs.value;
    sample.residual = std::abs(sample.lhs - sample.rhs);
    sample.bound = lhs.error_estimate;
    sample.pass = sample.residual <= sample.bound + 1e-9;
    report.samples.push_back(sample);
  }
  return report;
}

std::vector<Singularity> landau_walfisz_singularities(std::int64_t n_max) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  std::vector<Singularity> out;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (mobius(n) != 0) out.push_back({n, 1.0 / static_cast<double>(n)});
  }
  return out;
}

std::int64_t PoleScanReport::observed_poles() const {
  return std::count_if(candidates.begin(), candidates.end(), [](const PoleCandidate& c) { return c.genuine; });
}

bool PoleScanReport::observed_within_predicted() const {
  return std::all_of(candidates.begin(), candidates.end(),
                     [](const PoleCandidate& c) { return !c.genuine || c.matches_lattice; });
}

PoleScanReport pole_scan(const LinearRepresentation& rep, double a, double b, double T, double step) {
  if (a > b || T < 0.0 || !(step > 0.0)) throw DomainError("pole scan needs a <= b, T >= 0, step > 0");
  PoleScanReport report;
  report.a = a;
  report.b = b;
  report.T = T;
  report.step = step;
  report.predicted = lattice_points_in(rep, a, b, T);

  const CMatrix avg = average_ld(rep);
  const int k = rep.base();
  const long double logk = std::log(static_cast<long double>(k));

  // det(I - k^{1-s-j} avg) can only vanish where |k^{1-s-j}| = 1/|alpha| >= 1/spectral_radius.
  double radius = 0.0;
  for (const auto& ev : average_eigenvalues(rep)) radius = std::max(radius, std::abs(ev));
  if (radius == 0.0) return report;
  const int J = std::max(0, static_cast<int>(std::ceil(1.0 + std::log(radius) / static_cast<double>(logk) - a)));

  const long nx = a == b ? 1 : static_cast<long>(std::llround((b - a) / step)) + 1;
  const long ny = static_cast<long>(std::llround(T / step)) + 1;
  const auto node = [&](long ix, long iy) {
    const double re = nx == 1 ? a : a + (b - a) * static_cast<double>(ix) / static_cast<double>(nx - 1);
    const double im = ny == 1 ? 0.0 : T * static_cast<double>(iy) / static_cast<double>(ny - 1);
    return cld(re, im);
  };
  report.grid_points = nx * ny;

  const double tol_in = 1e-7;
  for (int j = 0; j <= J; ++j) {
    const auto det_at = [&](cld s) { return determinant(system_matrix(avg, k, s + static_cast<long double>(j))); };
    std::vector<long double> mag(static_cast<std::size_t>(nx * ny));
    for (long ix = 0; ix < nx; ++ix) {
      for (long iy = 0; iy < ny; ++iy) mag[static_cast<std::size_t>(ix * ny + iy)] = std::abs(det_at(node(ix, iy)));
    }
    for (long ix = 0; ix < nx; ++ix) {
      for (long iy = 0; iy < ny; ++iy) {
        const long double here = mag[static_cast<std::size_t>(ix * ny + iy)];
        bool minimum = true;
        for (long dx = -1; dx <= 1 && minimum; ++dx) {
          for (long dy = -1; dy <= 1; ++dy) {
            const long jx = ix + dx, jy = iy + dy;
            if ((dx == 0 && dy == 0) || jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
            if (mag[static_cast<std::size_t>(jx * ny + jy)] < here) {
              minimum = false;
              break;
            }
          }
        }
        if (!minimum) continue;

        // Newton on the analytic function det_j(s)
        cld s = node(ix, iy);
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
          const cld f = det_at(s);
          if (std::abs(f) < 1e-15L) {
            ok = true;
            break;
          }
          const long double h = 1e-6L;
          const cld df = (det_at(s + h) - det_at(s - h)) / (2.0L * h);
          if (std::abs(df) < 1e-300L) break;
          const cld delta = f / df;
          s -= delta;
          if (std::abs(delta) < 1e-15L) {
            ok = true;
            break;
          }
        }
        const double det_mag = static_cast<double>(std::abs(det_at(s)));
        if (!ok || det_mag >= 1e-8) continue;
        const cplx sd = to_d(s);
        if (sd.real() < a - tol_in || sd.real() > b + tol_in || sd.imag() < -tol_in || sd.imag() > T + tol_in) continue;
        const bool seen = std::any_of(report.candidates.begin(), report.candidates.end(),
                                      [&](const PoleCandidate& c) { return std::abs(c.s - sd) < 1e-6; });
        if (seen) continue;
        PoleCandidate cand;
        cand.s = sd;
        cand.level = j;
        cand.det_magnitude = det_mag;
        report.candidates.push_back(cand);
      }
    }
  }

  const cplx dir = std::polar(1.0, std::numbers::pi / 3.0);
  for (PoleCandidate& c : report.candidates) {
    const EvalResult far = continue_via_recursion(rep, c.s + 1e-3 * dir);
    const EvalResult near = continue_via_recursion(rep, c.s + 1e-4 * dir);
    if (far.value && near.value && std::abs(*far.value) > 0.0) {
      c.growth_ratio = std::abs(*near.value) / std::abs(*far.value);
      c.genuine = c.growth_ratio > 3.0;
    } else {
      c.growth_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    c.matches_lattice = std::any_of(report.predicted.begin(), report.predicted.end(),
                                    [&](const PolePoint& p) { return std::abs(p.s - c.s) < 1e-6; });
  }
  std::sort(report.candidates.begin(), report.candidates.end(), [](const PoleCandidate& x, const PoleCandidate& y) {
    return x.s.imag() != y.s.imag() ? x.s.imag() < y.s.imag() : x.s.real() < y.s.real();
  });
  return report;
}

std::vector<ScanRow> scan_grid(const LinearRepresentation& rep, double a, double b, double T, double step,
                               int threads) {
  if (a > b || T < 0.0 || !(step > 0.0)) throw DomainError("scan needs a <= b, T >= 0, step > 0");
  const long nx = a == b ? 1 : static_cast<long>(std::llround((b - a) / step)) + 1;
  const long ny = static_cast<long>(std::llround(T / step)) + 1;
  std::vector<ScanRow> rows(static_cast<std::size_t>(nx * ny));
  const auto work = [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      const long iy = i / nx, ix = i % nx;
      const double re = nx == 1 ? a : a + (b - a) * static_cast<double>(ix) / static_cast<double>(nx - 1);
      const double im = ny == 1 ? 0.0 : T * static_cast<double>(iy) / static_cast<double>(ny - 1);
      ScanRow& row = rows[static_cast<std::size_t>(i)];
      row.re = re;
      row.im = im;
      row.det_magnitude = system_det_magnitude(rep, {re, im});
      const EvalResult r = continue_via_recursion(rep, {re, im});
      row.near_singular = r.flags.near_singular;
      row.truncated = r.flags.truncated;
      row.abs_value = r.value ? std::abs(*r.value) : std::numeric_limits<double>::quiet_NaN();
    }
  };
  const long total = nx * ny;
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (workers == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, total * w / workers, total * (w + 1) / workers);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace kscope
