#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace derivkit {

/// Coefficient field: a prime field F_p (p < 2^31) or the rationals.
class Field {
 public:
  enum class Kind { prime, rationals };

  static Field prime(std::uint32_t p);
  static Field rationals() { return Field(Kind::rationals, 0); }
  static Field f2() { return prime(2); }

  /// Accepts "F2", "f2", "F_2", "fp:<p>", "F<p>", "q", "Q".
  static Field parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_prime() const { return kind_ == Kind::prime; }
  bool is_rational() const { return kind_ == Kind::rationals; }
  /// 0 for the rationals.
  std::uint32_t characteristic() const { return p_; }

  /// Canonical spelling, round-trips through parse(): "F2", "fp:5", "Q".
  std::string name() const;

  /// Reduced canonical representative of a value in this field.
  mpq_class reduce(const mpq_class& value) const;
  /// Parses "a", "-a", "a/b"; for F_p the value is reduced mod p.
  mpq_class parse_scalar(std::string_view text) const;
  std::string format_scalar(const mpq_class& value) const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Field(Kind kind, std::uint32_t p) : kind_(kind), p_(p) {}

  Kind kind_;
  std::uint32_t p_;
};

bool is_prime_number(std::uint64_t n);

}  // namespace derivkit
