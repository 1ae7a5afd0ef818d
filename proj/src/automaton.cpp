#include "kscope/automaton.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "kscope/errors.hpp"
#include "kscope/kernel.hpp"

namespace kscope {

namespace {

std::int64_t mul_add(std::int64_t acc, std::int64_t a, std::int64_t b) {
  std::int64_t prod = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(acc, prod, &acc)) {
    throw CapacityError("64-bit overflow evaluating linear representation");
  }
  return acc;
}

}  // namespace

LinearRepresentation::LinearRepresentation(int k, std::vector<IntMatrix> matrices,
                                           std::vector<std::vector<std::int64_t>> initial, int output_coord,
                                           std::vector<KernelLabel> labels, std::int64_t verified_to)
    : k_(k),
      dim_(0),
      matrices_(std::move(matrices)),
      initial_(std::move(initial)),
      output_(output_coord),
      labels_(std::move(labels)),
      verified_to_(verified_to) {
  if (k_ < 2) throw DomainError("representation base must be >= 2");
  if (static_cast<int>(matrices_.size()) != k_) throw DomainError("need exactly k matrices A_0..A_{k-1}");
  dim_ = static_cast<int>(matrices_.front().size());
  if (dim_ < 1) throw DomainError("representation dimension must be >= 1");
  for (const auto& a : matrices_) {
    if (static_cast<int>(a.size()) != dim_) throw DomainError("matrix row count mismatch");
    for (const auto& row : a) {
      if (static_cast<int>(row.size()) != dim_) throw DomainError("matrix must be square");
    }
  }
  if (static_cast<int>(initial_.size()) != k_ - 1) throw DomainError("need initial vectors U_1..U_{k-1}");
  for (const auto& u : initial_) {
    if (static_cast<int>(u.size()) != dim_) throw DomainError("initial vector length mismatch");
  }
  if (output_ < 0 || output_ >= dim_) throw DomainError("output coordinate out of range");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != dim_) throw DomainError("one label per coordinate");
}

bool LinearRepresentation::is_row_selection() const {
  for (const auto& a : matrices_) {
    for (const auto& row : a) {
      int ones = 0;
      for (const std::int64_t x : row) {
        if (x == 1) {
          ++ones;
        } else if (x != 0) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

std::int64_t LinearRepresentation::max_row_sum() const {
  std::int64_t best = 0;
  for (const auto& a : matrices_) {
    for (const auto& row : a) {
      std::int64_t s = 0;
      for (const std::int64_t x : row) s += x < 0 ? -x : x;
      best = std::max(best, s);
    }
  }
  return best;
}

std::vector<std::int64_t> LinearRepresentation::state(std::int64_t n) const {
  if (n < 1) throw DomainError("representation index must be >= 1");
  std::vector<int> digits;
  while (n >= k_) {
    digits.push_back(static_cast<int>(n % k_));
    n /= k_;
  }
  std::vector<std::int64_t> u = initial_[static_cast<std::size_t>(n - 1)];
  std::vector<std::int64_t> next(static_cast<std::size_t>(dim_));
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    const IntMatrix& a = matrices_[static_cast<std::size_t>(*it)];
    for (int i = 0; i < dim_; ++i) {
      std::int64_t acc = 0;
      for (int j = 0; j < dim_; ++j) acc = mul_add(acc, a[i][j], u[j]);
      next[i] = acc;
    }
    u.swap(next);
  }
  return u;
}

std::vector<std::int64_t> LinearRepresentation::states_upto(std::int64_t N) const {
  const auto t = static_cast<std::size_t>(dim_);
  std::vector<std::int64_t> out(static_cast<std::size_t>(N) * t);
  for (std::int64_t n = 1; n <= N; ++n) {
    const std::size_t base = static_cast<std::size_t>(n - 1) * t;
    if (n < k_) {
      std::copy(initial_[n - 1].begin(), initial_[n - 1].end(), out.begin() + static_cast<std::ptrdiff_t>(base));
      continue;
    }
    const IntMatrix& a = matrices_[static_cast<std::size_t>(n % k_)];
    const std::size_t src = static_cast<std::size_t>(n / k_ - 1) * t;
    for (std::size_t i = 0; i < t; ++i) {
      std::int64_t acc = 0;
      for (std::size_t j = 0; j < t; ++j) acc = mul_add(acc, a[i][j], out[src + j]);
      out[base + i] = acc;
    }
  }
  return out;
}

LinearRepresentation build_representation(const ValueTable& t, int k, int L, std::int64_t M) {
  const KernelProfile profile = kernel_profile(t, k, L, M);
  if (profile.verdict.kind != Verdict::Kind::saturated) {
    throw VerdictError("kernel of " + t.id().name() + " is " + profile.verdict.describe() +
                       "; a representation needs a saturated kernel");
  }
  const int depth = profile.verdict.depth;

  // Coordinates: distinct elements through the saturation depth, first occurrence labels.
  PrefixIndex index;
  std::vector<KernelLabel> labels;
  std::int64_t step = 1;
  for (int l = 0; l <= depth; ++l) {
    for (std::int64_t r = 0; r < step; ++r) {
      if (index.insert(kernel_element(t, k, l, r, M).prefix).second) labels.push_back({l, r});
    }
    step *= k;
  }
  const int dim = static_cast<int>(labels.size());

  std::vector<IntMatrix> mats(static_cast<std::size_t>(k), IntMatrix(dim, std::vector<std::int64_t>(dim, 0)));
  for (int c = 0; c < dim; ++c) {
    const KernelLabel lab = labels[static_cast<std::size_t>(c)];
    std::int64_t kl = 1;
    for (int i = 0; i < lab.l; ++i) kl *= k;
    for (int j = 0; j < k; ++j) {
      const KernelElement child = kernel_element(t, k, lab.l + 1, lab.r + j * kl, M);
      const auto target = index.find(child.prefix);
      if (!target) {
        throw ConstructionError("child (" + std::to_string(lab.l + 1) + "," + std::to_string(lab.r + j * kl) +
                                ") of a saturated kernel has no matching coordinate");
      }
      mats[static_cast<std::size_t>(j)][c][*target] = 1;
    }
  }

  std::vector<std::vector<std::int64_t>> initial(static_cast<std::size_t>(k - 1),
                                                 std::vector<std::int64_t>(dim));
  for (int m = 1; m < k; ++m) {
    for (int c = 0; c < dim; ++c) {
      const KernelLabel lab = labels[static_cast<std::size_t>(c)];
      std::int64_t kl = 1;
      for (int i = 0; i < lab.l; ++i) kl *= k;
      initial[m - 1][c] = t.at(kl * m + lab.r);
    }
  }

  LinearRepresentation rep(k, std::move(mats), std::move(initial), 0, labels, t.size());

  // Every coordinate c labelled (l, r) must satisfy U_n[c] = t(k^l n + r) wherever defined.
  const std::vector<std::int64_t> states = rep.states_upto(t.size());
  for (int c = 0; c < dim; ++c) {
    const KernelLabel lab = labels[static_cast<std::size_t>(c)];
    std::int64_t kl = 1;
    for (int i = 0; i < lab.l; ++i) kl *= k;
    for (std::int64_t n = 1; kl * n + lab.r <= t.size(); ++n) {
      const std::int64_t got = states[static_cast<std::size_t>((n - 1) * dim + c)];
      if (got != t(kl * n + lab.r)) {
        throw ConstructionError("representation of " + t.id().name() + " disagrees with the table at n=" +
                                std::to_string(n) + " coordinate (" + std::to_string(lab.l) + "," +
                                std::to_string(lab.r) + ")");
      }
    }
  }
  return rep;
}

std::int64_t eval(const LinearRepresentation& rep, std::int64_t n) {
  return rep.state(n)[static_cast<std::size_t>(rep.output_coord())];
}

RationalMatrix average_matrix(const LinearRepresentation& rep) {
  const int t = rep.dimension();
  RationalMatrix avg(t, std::vector<mpq_class>(t, 0));
  for (const auto& a : rep.matrices()) {
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) avg[i][j] += static_cast<long>(a[i][j]);
    }
  }
  for (auto& row : avg) {
    for (auto& x : row) {
      x /= rep.base();
      x.canonicalize();
    }
  }
  return avg;
}

bool is_row_stochastic(const RationalMatrix& a) {
  for (const auto& row : a) {
    mpq_class s = 0;
    for (const auto& x : row) {
      if (x < 0) return false;
      s += x;
    }
    if (s != 1) return false;
  }
  return true;
}

std::vector<std::complex<double>> average_eigenvalues(const LinearRepresentation& rep) {
  const RationalMatrix avg = average_matrix(rep);
  const int t = rep.dimension();
  Eigen::MatrixXcd a(t, t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) a(i, j) = avg[i][j].get_d();
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, true);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  const double scale = std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
  std::vector<std::complex<double>> out;
  for (int i = 0; i < t; ++i) {
    const std::complex<double> lambda = solver.eigenvalues()(i);
    const Eigen::VectorXcd v = solver.eigenvectors().col(i);
    const double residual = (a * v - lambda * v).norm() / std::max(v.norm(), 1e-300);
    if (residual > 1e-10 * scale) {
      throw NumericError("eigenpair residual " + std::to_string(residual) + " exceeds 1e-10");
    }
    out.push_back(std::abs(lambda) < 1e-12 ? std::complex<double>(0.0, 0.0) : lambda);
  }
  return out;
}

PoleLattice pole_lattice(const LinearRepresentation& rep, long m_max, int l_max) {
  if (m_max < 0 || l_max < 0) throw DomainError("lattice truncation bounds must be non-negative");
  PoleLattice out;
  out.k = rep.base();
  out.m_max = m_max;
  out.l_max = l_max;
  out.charpoly = characteristic_polynomial(average_matrix(rep));
  mpq_class at_one = 0;
  for (const auto& c : out.charpoly) at_one += c;
  out.eigenvalue_one_certified = at_one == 0;

  for (const auto& lambda : average_eigenvalues(rep)) {
    bool merged = false;
    for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
      if (std::abs(out.eigenvalues[i] - lambda) < 1e-9) {
        ++out.multiplicities[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.eigenvalues.push_back(lambda);
      out.multiplicities.push_back(1);
    }
  }

  const double logk = std::log(static_cast<double>(rep.base()));
  const double spacing = 2.0 * std::numbers::pi / logk;
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    const std::complex<double> alpha = out.eigenvalues[i];
    if (alpha == std::complex<double>(0.0, 0.0)) {
      out.skipped.push_back(static_cast<int>(i));
      continue;
    }
    const std::complex<double> base = std::log(alpha) / logk + 1.0;
    for (int l = 0; l <= l_max; ++l) {
      for (long m = -m_max; m <= m_max; ++m) {
        out.points.push_back({base + std::complex<double>(-l, spacing * static_cast<double>(m)),
                              static_cast<int>(i), m, l});
      }
    }
  }
  return out;
}

std::vector<PolePoint> lattice_points_in(const LinearRepresentation& rep, double a, double b, double T) {
  const PoleLattice lat = pole_lattice(rep, 0, 0);
  const double logk = std::log(static_cast<double>(rep.base()));
  const double spacing = 2.0 * std::numbers::pi / logk;
  constexpr double eps = 1e-9;
  std::vector<PolePoint> out;
  for (const PolePoint& p0 : lat.points) {
    const double re0 = p0.s.real();
    const double im0 = p0.s.imag();
    const int l_lo = std::max(0, static_cast<int>(std::ceil(re0 - b - eps)));
    const int l_hi = static_cast<int>(std::floor(re0 - a + eps));
    const long m_lo = static_cast<long>(std::ceil((0.0 - im0) / spacing - eps));
    const long m_hi = static_cast<long>(std::floor((T - im0) / spacing + eps));
    for (int l = l_lo; l <= l_hi; ++l) {
      for (long m = m_lo; m <= m_hi; ++m) {
        out.push_back({p0.s + std::complex<double>(-l, spacing * static_cast<double>(m)), p0.alpha_index, m, l});
      }
    }
  }
  return out;
}

}  // namespace kscope
