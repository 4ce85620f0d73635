#include "labelflow/decimal_math.hpp"

#include <cctype>

namespace labelflow {

using boost::multiprecision::cpp_int;

namespace {

constexpr int kMaxExponent = 400;

cpp_int pow10(int n) {
  cpp_int r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

std::size_t digit_count(const cpp_int& v) { return v.str().size(); }

}  // namespace

std::optional<Rational> parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';

  cpp_int digits = 0;
  int fraction_digits = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    digits = digits * 10 + (text[i] - '0');
    any_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      digits = digits * 10 + (text[i] - '0');
      ++fraction_digits;
      any_digit = true;
    }
  }
  if (!any_digit) return std::nullopt;

  int exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
    bool exp_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exponent = exponent * 10 + (text[i] - '0');
      exp_digit = true;
      if (exponent > kMaxExponent) return std::nullopt;
    }
    if (!exp_digit) return std::nullopt;
    if (exp_negative) exponent = -exponent;
  }
  if (i != text.size()) return std::nullopt;

  int scale = exponent - fraction_digits;
  Rational value = scale >= 0 ? Rational(digits * pow10(scale)) : Rational(digits, pow10(-scale));
  return negative ? Rational(-value) : value;
}

std::string render_decimal(const Rational& value, int significant_digits) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  cpp_int num = boost::multiprecision::abs(boost::multiprecision::numerator(value));
  cpp_int den = boost::multiprecision::denominator(value);

  // Find e with 10^e <= num/den < 10^(e+1).
  int e = static_cast<int>(digit_count(num)) - static_cast<int>(digit_count(den));
  auto at_least = [&](int exp) {
    return exp >= 0 ? num >= den * pow10(exp) : num * pow10(-exp) >= den;
  };
  while (!at_least(e)) --e;
  while (at_least(e + 1)) ++e;

  const int shift = significant_digits - 1 - e;
  cpp_int scaled_num = shift >= 0 ? num * pow10(shift) : num;
  cpp_int scaled_den = shift >= 0 ? den : den * pow10(-shift);
  cpp_int mantissa = (2 * scaled_num + scaled_den) / (2 * scaled_den);
  if (mantissa == pow10(significant_digits)) {
    mantissa /= 10;
    ++e;
  }

  std::string digits = mantissa.str();  // exactly significant_digits long
  std::string out;
  const int n = static_cast<int>(digits.size());
  if (e >= n - 1) {
    out = digits + std::string(static_cast<std::size_t>(e - (n - 1)), '0');
  } else if (e >= 0) {
    out = digits.substr(0, static_cast<std::size_t>(e + 1)) + "." + digits.substr(static_cast<std::size_t>(e + 1));
  } else {
    out = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + digits;
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return negative ? "-" + out : out;
}

Rational apply(ArithmeticOp op, const Rational& a, const Rational& b) {
  switch (op) {
    case ArithmeticOp::add:
      return a + b;
    case ArithmeticOp::subtract:
      return a - b;
    case ArithmeticOp::multiply:
      return a * b;
    case ArithmeticOp::divide:
      if (b == 0) throw DivisionByZero("divisor is zero");
      return a / b;
  }
  throw std::logic_error("unhandled arithmetic op");
}

}  // namespace labelflow
