#include "derivkit/field.hpp"

#include <cctype>
#include <charconv>

#include "derivkit/error.hpp"

namespace derivkit {

bool is_prime_number(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Field Field::prime(std::uint32_t p) {
  if (!is_prime_number(p) || p >= (1u << 31))
    throw InvalidInput("field characteristic " + std::to_string(p) +
                       " is not a prime below 2^31");
  return Field(Kind::prime, p);
}

namespace {

std::string lowered(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_')
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::uint32_t parse_characteristic(std::string_view digits, std::string_view original) {
  std::uint32_t p = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    throw InvalidInput("cannot parse field '" + std::string(original) + "'");
  return p;
}

}  // namespace

Field Field::parse(std::string_view text) {
  const std::string s = lowered(text);
  if (s == "q" || s == "rationals") return rationals();
  if (s.rfind("fp:", 0) == 0) return prime(parse_characteristic(std::string_view(s).substr(3), text));
  if (s.size() > 1 && s[0] == 'f') return prime(parse_characteristic(std::string_view(s).substr(1), text));
  throw InvalidInput("unknown field '" + std::string(text) + "' (expected F2, fp:<p> or Q)");
}

std::string Field::name() const {
  if (kind_ == Kind::rationals) return "Q";
  if (p_ == 2) return "F2";
  return "fp:" + std::to_string(p_);
}

mpq_class Field::reduce(const mpq_class& value) const {
  if (kind_ == Kind::rationals) {
    mpq_class v = value;
    v.canonicalize();
    return v;
  }
  mpz_class num = value.get_num();
  mpz_class den = value.get_den();
  const mpz_class p(p_);
  num %= p;
  if (num < 0) num += p;
  den %= p;
  if (den < 0) den += p;
  if (den == 0) throw InvalidInput("denominator divisible by the characteristic");
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
  mpz_class r = (num * inv) % p;
  return mpq_class(r);
}

mpq_class Field::parse_scalar(std::string_view text) const {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw InvalidInput("empty scalar");
  if (s[0] == '+') s.erase(0, 1);
  mpq_class value;
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      value = mpq_class(mpz_class(s, 10));
    } else {
      mpz_class num(s.substr(0, slash), 10);
      mpz_class den(s.substr(slash + 1), 10);
      if (den == 0) throw InvalidInput("zero denominator in scalar '" + s + "'");
      value = mpq_class(num, den);
    }
  } catch (const std::invalid_argument&) {
    throw InvalidInput("cannot parse scalar '" + std::string(text) + "'");
  }
  value.canonicalize();
  return reduce(value);
}

std::string Field::format_scalar(const mpq_class& value) const {
  const mpq_class v = reduce(value);
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

}  // namespace derivkit
