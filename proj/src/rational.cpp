#include "mv2h/rational.h"

#include <cctype>
#include <stdexcept>

namespace mv2h {

namespace {

bool isDigits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

mpz_class parseInteger(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (!isDigits(text)) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  mpz_class value(std::string(text), 10);
  return negative ? mpz_class(-value) : value;
}

}  // namespace

Rational makeRational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  // gmpxx has no portable int64_t constructor.
  Rational result(mpz_class(std::to_string(num), 10), mpz_class(std::to_string(den), 10));
  result.canonicalize();
  return result;
}

Rational parseRational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parseInteger(text.substr(0, slash), text);
    std::string_view den_text = text.substr(slash + 1);
    if (!isDigits(den_text)) {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    mpz_class den(std::string(den_text), 10);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational result(num, den);
    result.canonicalize();
    return result;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      int_part.remove_prefix(1);
    }
    if ((int_part.empty() && frac_part.empty()) ||
        (!int_part.empty() && !isDigits(int_part)) ||
        (!frac_part.empty() && !isDigits(frac_part))) {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
    mpz_class whole = int_part.empty() ? mpz_class(0) : mpz_class(std::string(int_part), 10);
    mpz_class frac = frac_part.empty() ? mpz_class(0) : mpz_class(std::string(frac_part), 10);
    mpz_class num = whole * scale + frac;
    if (negative) num = -num;
    Rational result(num, scale);
    result.canonicalize();
    return result;
  }

  return Rational(parseInteger(text, text));
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

std::string formatExact(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string formatDecimal(const Rational& value, int places) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));

  // round(|x| * 10^places) with halves going up, then restore the sign.
  Rational scaled = abs(value) * scale + Rational(1, 2);
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());

  mpz_class whole = rounded / scale;
  mpz_class frac = rounded % scale;
  std::string out = (value < 0 && rounded != 0) ? "-" : "";
  out += whole.get_str();
  if (places > 0) {
    std::string digits = frac.get_str();
    out += '.';
    out += std::string(static_cast<std::size_t>(places) - digits.size(), '0');
    out += digits;
  }
  return out;
}

double toDouble(const Rational& value) { return value.get_d(); }

}  // namespace mv2h
