#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kscope {

// Upper bound on table sizes. Defaults to 10^7; KERNELSCOPE_MAX_N overrides.
std::int64_t max_table_size();

enum class FnTag {
  lambda,
  mu,
  abs_mu,
  phi,
  tau,
  tau_k,
  sigma_m,
  omega,
  big_omega,
  rho,
  r_half_rho,
  q_m,
  chi_P,
  chi_PP,
  nth_prime,
  tau_of_square,
  tau_squared,
  const_one,
  thue_morse_pm,
  sum_binary_digits,
  identity_n,
};

std::string_view tag_name(FnTag tag);
std::optional<FnTag> tag_from_name(std::string_view name);
bool tag_takes_param(FnTag tag);

// An arithmetic function, possibly parameterized (tau_k, sigma_m, q_m) and
// possibly annotated as reduced modulo some m.
class FunctionId {
 public:
  // Throws DomainError when a parameterized tag lacks its parameter or the
  // parameter is below the allowed minimum (tau_k: k>=1, sigma_m: m>=0, q_m: m>=2).
  explicit FunctionId(FnTag tag, std::optional<int> param = std::nullopt);

  FnTag tag() const noexcept { return tag_; }
  std::optional<int> param() const noexcept { return param_; }
  std::optional<std::int64_t> modulus() const noexcept { return modulus_; }

  FunctionId reduced(std::int64_t m) const;
  // e.g. "lambda", "q_m(2)", "tau mod 2"
  std::string name() const;

  friend bool operator==(const FunctionId&, const FunctionId&) = default;

 private:
  FnTag tag_;
  std::optional<int> param_;
  std::optional<std::int64_t> modulus_;
};

// Parses "lambda", "q_m" + param, and the shorthand "q_2" / "tau_3" / "sigma_1".
FunctionId parse_function_id(std::string_view text, std::optional<int> param = std::nullopt);

class FactorTable {
 public:
  // Linear sieve over 2..N. Throws CapacityError unless 2 <= N <= max_table_size().
  explicit FactorTable(std::int64_t N);

  std::int64_t bound() const noexcept { return n_; }
  std::uint32_t spf(std::int64_t n) const { return spf_[static_cast<std::size_t>(n)]; }
  bool is_prime(std::int64_t n) const { return n >= 2 && spf_[static_cast<std::size_t>(n)] == n; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

 private:
  std::int64_t n_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

FactorTable build_factor_table(std::int64_t N);

// f(1..N), immutable. Indexing is 1-based: t(1) is the first value.
class ValueTable {
 public:
  ValueTable(FunctionId id, std::vector<std::int64_t> values);

  const FunctionId& id() const noexcept { return id_; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  std::int64_t operator()(std::int64_t n) const { return values_[static_cast<std::size_t>(n - 1)]; }
  std::int64_t at(std::int64_t n) const;
  // values()[i] is t(i+1)
  std::span<const std::int64_t> values() const noexcept { return values_; }

 private:
  FunctionId id_;
  std::vector<std::int64_t> values_;
};

// Throws CapacityError on overflow or an undersized factor table,
// RangeError when the N-th prime lies beyond ft.bound().
ValueTable generate(const FunctionId& id, std::int64_t N, const FactorTable& ft);
// Convenience: builds a factor table of the required size first.
ValueTable generate(const FunctionId& id, std::int64_t N);

// Entrywise least non-negative residue. Throws DomainError if m < 2.
ValueTable reduce_mod(const ValueTable& t, std::int64_t m);

}  // namespace kscope
