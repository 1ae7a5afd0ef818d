#include "kscope/christol.hpp"

#include <algorithm>
#include <deque>
#include <optional>

#include "kscope/errors.hpp"

namespace kscope {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

FpSeries series_from_table(const ValueTable& t, int p, std::int64_t N) {
  if (!is_prime(p) || p > 251) throw DomainError("p must be a prime below 256, got " + std::to_string(p));
  if (N < 1) throw DomainError("series length must be positive");
  if (N > t.size()) {
    throw CapacityError("series of length " + std::to_string(N) + " needs a table of that size; have " +
                        std::to_string(t.size()));
  }
  FpSeries s;
  s.p = p;
  s.reliable_len = N;
  s.coeffs.assign(static_cast<std::size_t>(N), 0);
  for (std::int64_t n = 1; n < N; ++n) {
    const std::int64_t v = t(n) % p;
    s.coeffs[static_cast<std::size_t>(n)] = static_cast<std::uint8_t>(v < 0 ? v + p : v);
  }
  return s;
}

FpSeries cartier_section(const FpSeries& s, int r) {
  if (r < 0 || r >= s.p) throw DomainError("section index must lie in [0, p)");
  const std::int64_t len = s.reliable_len > r ? (s.reliable_len - r + s.p - 1) / s.p : 0;
  if (len < kMinWindow) {
    throw CapacityError("section leaves " + std::to_string(len) + " reliable coefficients, below the window " +
                        std::to_string(kMinWindow));
  }
  FpSeries out;
  out.p = s.p;
  out.reliable_len = len;
  out.coeffs.resize(static_cast<std::size_t>(len));
  for (std::int64_t n = 0; n < len; ++n) {
    out.coeffs[static_cast<std::size_t>(n)] = s.coeffs[static_cast<std::size_t>(s.p * n + r)];
  }
  return out;
}

std::optional<bool> equal_on_window(const FpSeries& a, const FpSeries& b) {
  const std::int64_t w = std::min(a.reliable_len, b.reliable_len);
  if (w < kMinWindow) return std::nullopt;
  return std::equal(a.coeffs.begin(), a.coeffs.begin() + w, b.coeffs.begin());
}

OrbitReport orbit_explore(const FpSeries& s, int budget, bool reverse) {
  if (s.reliable_len < kMinWindow * s.p) {
    throw DomainError("orbit exploration needs at least " + std::to_string(kMinWindow * s.p) + " coefficients");
  }
  if (budget < 1) throw DomainError("budget must be positive");
  OrbitReport report;
  report.budget = budget;
  report.window = s.reliable_len;

  std::vector<FpSeries> orbit{s};
  std::deque<std::pair<std::size_t, int>> queue{{0, 0}};
  while (!queue.empty()) {
    const auto [index, depth] = queue.front();
    queue.pop_front();
    for (int i = 0; i < s.p; ++i) {
      const int r = reverse ? s.p - 1 - i : i;
      std::optional<FpSeries> child;
      try {
        child = cartier_section(orbit[index], r);
      } catch (const CapacityError&) {
        report.kind = OrbitReport::Kind::exhausted;
        report.size = static_cast<std::int64_t>(orbit.size());
        report.depth = depth + 1;
        return report;
      }
      bool known = false;
      for (const FpSeries& member : orbit) {
        if (*equal_on_window(*child, member)) {
          known = true;
          break;
        }
      }
      report.depth = std::max(report.depth, depth + 1);
      report.window = std::min(report.window, child->reliable_len);
      if (known) continue;
      orbit.push_back(std::move(*child));
      if (static_cast<std::int64_t>(orbit.size()) > budget) {
        report.kind = OrbitReport::Kind::growing;
        report.size = static_cast<std::int64_t>(orbit.size());
        return report;
      }
      queue.emplace_back(orbit.size() - 1, depth + 1);
    }
  }
  report.kind = OrbitReport::Kind::finite;
  report.size = static_cast<std::int64_t>(orbit.size());
  return report;
}

std::string AlgebraicityVerdict::describe() const {
  const std::string tail = " window=" + std::to_string(window);
  switch (kind) {
    case Kind::algebraic_evidence: return "algebraic_evidence(" + std::to_string(size) + ")" + tail;
    case Kind::transcendence_evidence:
      return "transcendence_evidence(" + std::to_string(depth) + "," + std::to_string(size) + ")" + tail;
    case Kind::inconclusive: return "inconclusive(" + std::to_string(depth) + ")" + tail;
  }
  return "inconclusive";
}

AlgebraicityVerdict algebraicity_verdict(const OrbitReport& report) {
  AlgebraicityVerdict v;
  v.size = report.size;
  v.depth = report.depth;
  v.window = report.window;
  switch (report.kind) {
    case OrbitReport::Kind::finite: v.kind = AlgebraicityVerdict::Kind::algebraic_evidence; break;
    case OrbitReport::Kind::growing: v.kind = AlgebraicityVerdict::Kind::transcendence_evidence; break;
    case OrbitReport::Kind::exhausted: v.kind = AlgebraicityVerdict::Kind::inconclusive; break;
  }
  return v;
}

}  // namespace kscope
