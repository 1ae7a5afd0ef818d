#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "kscope/exact.hpp"
#include "kscope/seqgen.hpp"

namespace kscope {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct KernelLabel {
  int l = 0;
  std::int64_t r = 0;
  friend bool operator==(const KernelLabel&, const KernelLabel&) = default;
};

// U_{kn+r} = A_r U_n for n >= 1, 0 <= r < k; U_1..U_{k-1} are given.
class LinearRepresentation {
 public:
  // Throws DomainError on inconsistent shapes.
  LinearRepresentation(int k, std::vector<IntMatrix> matrices, std::vector<std::vector<std::int64_t>> initial,
                       int output_coord, std::vector<KernelLabel> labels = {}, std::int64_t verified_to = 0);

  int base() const noexcept { return k_; }
  int dimension() const noexcept { return dim_; }
  const std::vector<IntMatrix>& matrices() const noexcept { return matrices_; }
  const IntMatrix& matrix(int r) const { return matrices_[static_cast<std::size_t>(r)]; }
  // U_1..U_{k-1}
  const std::vector<std::vector<std::int64_t>>& initial() const noexcept { return initial_; }
  const std::vector<std::int64_t>& seed() const { return initial_.front(); }
  int output_coord() const noexcept { return output_; }
  const std::vector<KernelLabel>& labels() const noexcept { return labels_; }
  std::int64_t verified_to() const noexcept { return verified_to_; }

  // Every matrix has exactly one 1 per row and zeros elsewhere.
  bool is_row_selection() const;
  // Largest absolute row sum over all A_r.
  std::int64_t max_row_sum() const;

  // U_n by peeling base-k digits. Throws CapacityError on overflow.
  std::vector<std::int64_t> state(std::int64_t n) const;
  // U_1..U_N flattened row-major (index (n-1)*t + c). Throws CapacityError on overflow.
  std::vector<std::int64_t> states_upto(std::int64_t N) const;

 private:
  int k_;
  int dim_;
  std::vector<IntMatrix> matrices_;
  std::vector<std::vector<std::int64_t>> initial_;
  int output_;
  std::vector<KernelLabel> labels_;
  std::int64_t verified_to_;
};

// Requires a saturated kernel_profile(t, k, L, M); throws VerdictError otherwise
// and ConstructionError if the result disagrees with t anywhere in 1..t.size().
LinearRepresentation build_representation(const ValueTable& t, int k, int L, std::int64_t M);

// u(n) for n >= 1; extrapolates past verified_to().
std::int64_t eval(const LinearRepresentation& rep, std::int64_t n);

// (1/k) sum_r A_r, exact.
RationalMatrix average_matrix(const LinearRepresentation& rep);
bool is_row_stochastic(const RationalMatrix& a);

struct PolePoint {
  std::complex<double> s;
  int alpha_index = 0;
  long m = 0;
  int l = 0;
};

struct PoleLattice {
  int k = 2;
  std::vector<std::complex<double>> eigenvalues;  // distinct, within 1e-9
  std::vector<int> multiplicities;
  std::vector<int> skipped;                       // indices of alpha = 0
  std::vector<mpq_class> charpoly;                // det(xI - avg), lowest degree first
  bool eigenvalue_one_certified = false;          // charpoly(1) == 0 exactly
  long m_max = 0;
  int l_max = 0;
  std::vector<PolePoint> points;
};

// Eigenvalues of the average matrix with residual check 1e-10; NumericError on failure.
std::vector<std::complex<double>> average_eigenvalues(const LinearRepresentation& rep);

// s = log(alpha)/log(k) + 2 pi i m/log(k) - l + 1, |m| <= m_max, 0 <= l <= l_max.
PoleLattice pole_lattice(const LinearRepresentation& rep, long m_max, int l_max);

// Lattice points inside Re s in [a, b], Im s in [0, T].
std::vector<PolePoint> lattice_points_in(const LinearRepresentation& rep, double a, double b, double T);

}  // namespace kscope
