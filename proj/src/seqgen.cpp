#include "kscope/seqgen.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "kscope/errors.hpp"

namespace kscope {

namespace {

constexpr std::array<std::string_view, 21> kTagNames = {
    "lambda", "mu",      "abs_mu",   "phi",       "tau",           "tau_k",       "sigma_m",
    "omega",  "big_omega", "rho",    "r_half_rho", "q_m",          "chi_P",       "chi_PP",
    "nth_prime", "tau_of_square", "tau_squared", "const_one", "thue_morse_pm", "sum_binary_digits",
    "identity_n",
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const FunctionId& id) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw CapacityError("64-bit overflow while generating " + id.name());
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const FunctionId& id) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw CapacityError("64-bit overflow while generating " + id.name());
  }
  return out;
}

// Number of ordered k-tuples multiplying to p^a: C(a+k-1, k-1).
std::int64_t multichoose(int k, int a, const FunctionId& id) {
  std::int64_t c = 1;
  for (int i = 1; i <= a; ++i) {
    c = checked_mul(c, k - 1 + i, id) / i;
  }
  return c;
}

// 1 + p^m + p^{2m} + ... + p^{am}
std::int64_t divisor_power_sum(std::int64_t p, int a, int m, const FunctionId& id) {
  std::int64_t pm = 1;
  for (int i = 0; i < m; ++i) pm = checked_mul(pm, p, id);
  std::int64_t term = 1;
  std::int64_t sum = 1;
  for (int i = 0; i < a; ++i) {
    term = checked_mul(term, pm, id);
    sum = checked_add(sum, term, id);
  }
  return sum;
}

// For each n >= 2: the full power of spf(n) dividing n and its exponent.
struct SmallestPrimePower {
  std::vector<std::uint32_t> part;
  std::vector<std::uint8_t> exponent;
};

SmallestPrimePower split_smallest_prime_power(std::int64_t N, const FactorTable& ft) {
  SmallestPrimePower out;
  out.part.assign(static_cast<std::size_t>(N + 1), 1);
  out.exponent.assign(static_cast<std::size_t>(N + 1), 0);
  for (std::int64_t n = 2; n <= N; ++n) {
    const std::uint32_t p = ft.spf(n);
    const std::int64_t m = n / p;
    const auto un = static_cast<std::size_t>(n);
    const auto um = static_cast<std::size_t>(m);
    if (m % p == 0) {
      out.part[un] = out.part[um] * p;
      out.exponent[un] = static_cast<std::uint8_t>(out.exponent[um] + 1);
    } else {
      out.part[un] = p;
      out.exponent[un] = 1;
    }
  }
  return out;
}

}  // namespace

std::int64_t max_table_size() {
  if (const char* env = std::getenv("KERNELSCOPE_MAX_N")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v >= 2) return v;
  }
  return 10'000'000;
}

std::string_view tag_name(FnTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

std::optional<FnTag> tag_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<FnTag>(i);
  }
  return std::nullopt;
}

bool tag_takes_param(FnTag tag) {
  return tag == FnTag::tau_k || tag == FnTag::sigma_m || tag == FnTag::q_m;
}

FunctionId::FunctionId(FnTag tag, std::optional<int> param) : tag_(tag), param_(param) {
  if (!tag_takes_param(tag)) {
    param_.reset();
    return;
  }
  if (!param) throw DomainError(std::string(tag_name(tag)) + " requires a parameter");
  const int lo = tag == FnTag::tau_k ? 1 : tag == FnTag::sigma_m ? 0 : 2;
  if (*param < lo) {
    throw DomainError(std::string(tag_name(tag)) + " parameter must be >= " + std::to_string(lo));
  }
}

FunctionId FunctionId::reduced(std::int64_t m) const {
  FunctionId out = *this;
  out.modulus_ = m;
  return out;
}

std::string FunctionId::name() const {
  std::string s(tag_name(tag_));
  if (param_) s += "(" + std::to_string(*param_) + ")";
  if (modulus_) s += " mod " + std::to_string(*modulus_);
  return s;
}

FunctionId parse_function_id(std::string_view text, std::optional<int> param) {
  if (auto tag = tag_from_name(text)) return FunctionId(*tag, param);
  // shorthand: q_2, tau_3, sigma_1
  const auto us = text.rfind('_');
  if (us != std::string_view::npos && us + 1 < text.size()) {
    const std::string_view head = text.substr(0, us);
    const std::string tail(text.substr(us + 1));
    if (tail.find_first_not_of("0123456789") == std::string::npos) {
      const int value = std::stoi(tail);
      if (head == "q") return FunctionId(FnTag::q_m, value);
      if (head == "tau") return FunctionId(FnTag::tau_k, value);
      if (head == "sigma") return FunctionId(FnTag::sigma_m, value);
    }
  }
  throw DomainError("unknown function id '" + std::string(text) + "'");
}

FactorTable::FactorTable(std::int64_t N) : n_(N) {
  if (N < 2 || N > max_table_size()) {
    throw CapacityError("factor table bound " + std::to_string(N) + " outside [2, " +
                        std::to_string(max_table_size()) + "]");
  }
  spf_.assign(static_cast<std::size_t>(N + 1), 0);
  for (std::int64_t i = 2; i <= N; ++i) {
    if (spf_[static_cast<std::size_t>(i)] == 0) {
      spf_[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t si = spf_[static_cast<std::size_t>(i)];
    for (const std::uint32_t p : primes_) {
      if (p > si || static_cast<std::int64_t>(p) * i > N) break;
      spf_[static_cast<std::size_t>(p * i)] = p;
    }
  }
}

FactorTable build_factor_table(std::int64_t N) { return FactorTable(N); }

ValueTable::ValueTable(FunctionId id, std::vector<std::int64_t> values)
    : id_(std::move(id)), values_(std::move(values)) {
  if (values_.empty()) throw CapacityError("value table must hold at least one value");
}

std::int64_t ValueTable::at(std::int64_t n) const {
  if (n < 1 || n > size()) {
    throw CapacityError("index " + std::to_string(n) + " outside table 1.." + std::to_string(size()) +
                        " of " + id_.name());
  }
  return (*this)(n);
}

ValueTable generate(const FunctionId& id, std::int64_t N, const FactorTable& ft) {
  if (N < 1 || N > max_table_size()) {
    throw CapacityError("table bound " + std::to_string(N) + " outside [1, " +
                        std::to_string(max_table_size()) + "]");
  }
  std::vector<std::int64_t> f(static_cast<std::size_t>(N + 1), 0);
  const auto at = [&](std::int64_t n) -> std::int64_t& { return f[static_cast<std::size_t>(n)]; };

  switch (id.tag()) {
    case FnTag::const_one:
      for (std::int64_t n = 1; n <= N; ++n) at(n) = 1;
      break;
    case FnTag::identity_n:
      for (std::int64_t n = 1; n <= N; ++n) at(n) = n;
      break;
    case FnTag::sum_binary_digits:
      for (std::int64_t n = 1; n <= N; ++n) at(n) = std::popcount(static_cast<std::uint64_t>(n));
      break;
    case FnTag::thue_morse_pm:
      for (std::int64_t n = 1; n <= N; ++n) {
        at(n) = (std::popcount(static_cast<std::uint64_t>(n)) & 1) ? -1 : 1;
      }
      break;
    case FnTag::nth_prime: {
      const auto& primes = ft.primes();
      if (static_cast<std::int64_t>(primes.size()) < N) {
        throw RangeError("only " + std::to_string(primes.size()) + " primes up to " +
                         std::to_string(ft.bound()) + ", need " + std::to_string(N));
      }
      for (std::int64_t n = 1; n <= N; ++n) at(n) = primes[static_cast<std::size_t>(n - 1)];
      break;
    }
    default: {
      if (ft.bound() < N) {
        throw CapacityError("factor table bound " + std::to_string(ft.bound()) + " < N = " +
                            std::to_string(N));
      }
      const SmallestPrimePower split = split_smallest_prime_power(N, ft);
      const bool additive = id.tag() == FnTag::omega || id.tag() == FnTag::big_omega;
      at(1) = additive ? 0 : 1;
      if (id.tag() == FnTag::chi_P || id.tag() == FnTag::chi_PP) at(1) = 0;
      const int param = id.param().value_or(0);
      for (std::int64_t n = 2; n <= N; ++n) {
        const std::int64_t p = ft.spf(n);
        const int a = split.exponent[static_cast<std::size_t>(n)];
        const std::int64_t pp = split.part[static_cast<std::size_t>(n)];
        const std::int64_t rest = at(n / pp);
        std::int64_t& out = at(n);
        switch (id.tag()) {
          case FnTag::lambda: out = (a & 1) ? -rest : rest; break;
          case FnTag::mu: out = a >= 2 ? 0 : -rest; break;
          case FnTag::abs_mu: out = a >= 2 ? 0 : rest; break;
          case FnTag::phi: out = checked_mul(rest, pp - pp / p, id); break;
          case FnTag::tau: out = checked_mul(rest, a + 1, id); break;
          case FnTag::tau_k: out = checked_mul(rest, multichoose(param, a, id), id); break;
          case FnTag::sigma_m: out = checked_mul(rest, divisor_power_sum(p, a, param, id), id); break;
          case FnTag::omega: out = rest + 1; break;
          case FnTag::big_omega: out = rest + a; break;
          case FnTag::rho:
          case FnTag::r_half_rho: out = checked_mul(rest, 2, id); break;
          case FnTag::q_m: out = a >= param ? 0 : rest; break;
          case FnTag::chi_P: out = p == n ? 1 : 0; break;
          case FnTag::chi_PP: out = pp == n ? 1 : 0; break;
          case FnTag::tau_of_square: out = checked_mul(rest, 2 * a + 1, id); break;
          case FnTag::tau_squared: out = checked_mul(rest, checked_mul(a + 1, a + 1, id), id); break;
          default: break;
        }
      }
      if (id.tag() == FnTag::r_half_rho) {
        // 2 r(n) = rho(n); rho(1) = 1 is odd, so r(1) is set to 0 (1 is not a prime power).
        at(1) = 0;
        for (std::int64_t n = 2; n <= N; ++n) at(n) /= 2;
      }
    }
  }
  f.erase(f.begin());
  return ValueTable(id, std::move(f));
}

ValueTable generate(const FunctionId& id, std::int64_t N) {
  switch (id.tag()) {
    case FnTag::const_one:
    case FnTag::identity_n:
    case FnTag::sum_binary_digits:
    case FnTag::thue_morse_pm:
      return generate(id, N, FactorTable(2));
    case FnTag::nth_prime: {
      // p_N < N (ln N + ln ln N) for N >= 6
      const double n = static_cast<double>(std::max<std::int64_t>(N, 6));
      const double bound = n * (std::log(n) + std::log(std::log(n))) + 10;
      return generate(id, N, FactorTable(static_cast<std::int64_t>(bound)));
    }
    default:
      return generate(id, N, FactorTable(std::max<std::int64_t>(N, 2)));
  }
}

ValueTable reduce_mod(const ValueTable& t, std::int64_t m) {
  if (m < 2) throw DomainError("modulus must be >= 2, got " + std::to_string(m));
  std::vector<std::int64_t> out(t.values().begin(), t.values().end());
  for (auto& v : out) {
    v %= m;
    if (v < 0) v += m;
  }
  return ValueTable(t.id().reduced(m), std::move(out));
}

}  // namespace kscope
