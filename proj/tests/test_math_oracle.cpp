#include <gtest/gtest.h>

#include <gmpxx.h>

#include <random>

#include "labelflow/decimal_math.hpp"
#include "labelflow/tool_registry.hpp"

using namespace labelflow;
using nlohmann::json;

namespace {

std::string random_operand(std::mt19937_64& rng) {
  std::string s;
  if (rng() % 2) s += '-';
  const int int_digits = 1 + static_cast<int>(rng() % 15);
  for (int i = 0; i < int_digits; ++i) s += static_cast<char>('0' + rng() % 10);
  if (rng() % 3) {
    s += '.';
    const int frac = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < frac; ++i) s += static_cast<char>('0' + rng() % 10);
  }
  if (rng() % 10 == 0) s = rng() % 2 ? "0" : "-0.0";
  return s;
}

mpq_class to_mpq(const std::string& s) {
  const bool negative = s[0] == '-';
  std::string digits = negative ? s.substr(1) : s;
  std::size_t dot = digits.find('.');
  std::size_t scale = 0;
  if (dot != std::string::npos) {
    scale = digits.size() - dot - 1;
    digits.erase(dot, 1);
  }
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
  mpq_class q(negative ? mpz_class(-num) : num, den);
  q.canonicalize();
  return q;
}

mpz_class pow10(long n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(n));
  return r;
}

// 12 significant digits, half away from zero, plain notation.
std::string render(const mpq_class& value) {
  if (value == 0) return "0";
  mpq_class a = abs(value);
  long e = 0;
  while (a >= mpq_class(pow10(e + 1))) ++e;
  while (e <= 0 && a < mpq_class(1) / mpq_class(pow10(-e))) --e;
  // Now 10^e <= a < 10^(e+1).
  const long shift = 11 - e;
  mpq_class scaled = a;
  if (shift >= 0) {
    scaled *= mpq_class(pow10(shift));
  } else {
    scaled /= mpq_class(pow10(-shift));
  }
  // floor(scaled + 1/2) rounds half away from zero on a non-negative value.
  const mpq_class half_up = scaled + mpq_class(1, 2);
  mpz_class m;
  mpz_fdiv_q(m.get_mpz_t(), half_up.get_num_mpz_t(), half_up.get_den_mpz_t());
  long exp = e;
  if (m == pow10(12)) {
    m /= 10;
    ++exp;
  }
  std::string digits = m.get_str();
  std::string out;
  const long n = static_cast<long>(digits.size());
  if (exp >= n - 1) {
    out = digits + std::string(static_cast<std::size_t>(exp - (n - 1)), '0');
  } else if (exp >= 0) {
    out = digits.substr(0, static_cast<std::size_t>(exp + 1)) + "." + digits.substr(static_cast<std::size_t>(exp + 1));
  } else {
    out = "0." + std::string(static_cast<std::size_t>(-exp - 1), '0') + digits;
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return value < 0 ? "-" + out : out;
}

}  // namespace

TEST(MathOracle, AgreesWithGmpOnRandomOperands) {
  const ToolRegistry registry = ToolRegistry::make_default();
  const Store store;
  const char* ops[] = {"add", "subtract", "multiply", "divide"};
  std::mt19937_64 rng(1234);
  int checked = 0, zero_divisions = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_operand(rng), b = random_operand(rng);
    const std::string op = ops[i % 4];
    const mpq_class qa = to_mpq(a), qb = to_mpq(b);
    if (op == "divide" && qb == 0) {
      EXPECT_THROW(registry.dispatch({"c", op, {{"a", a}, {"b", b}}}, store), DivisionByZero);
      ++zero_divisions;
      continue;
    }
    mpq_class expected = op == "add" ? mpq_class(qa + qb)
                         : op == "subtract" ? mpq_class(qa - qb)
                         : op == "multiply" ? mpq_class(qa * qb)
                                            : mpq_class(qa / qb);
    const ToolResult got = registry.dispatch({"c", op, {{"a", a}, {"b", b}}}, store);
    EXPECT_EQ(got.body, render(expected)) << a << " " << op << " " << b;
    ++checked;
  }
  EXPECT_EQ(checked + zero_divisions, 1000);
}

TEST(MathOracle, RendererSelfCheck) {
  EXPECT_EQ(render(mpq_class(1, 3)), "0.333333333333");
  EXPECT_EQ(render(mpq_class(5)), "5");
  EXPECT_EQ(render(mpq_class(-1, 2)), "-0.5");
  EXPECT_EQ(render(mpq_class(mpz_class("9999999999995"), mpz_class("1000000000000"))), "10");
  EXPECT_EQ(render(mpq_class(mpz_class("99999999999949"), mpz_class("10000000000000"))), "9.99999999999");
}
