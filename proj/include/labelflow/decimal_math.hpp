#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "labelflow/error.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(DivisionByZero);

using Rational = boost::multiprecision::cpp_rational;

enum class ArithmeticOp { add, subtract, multiply, divide };

// Exact value of a decimal literal such as "-12.5", "3" or "1.25e-3".
std::optional<Rational> parse_decimal(std::string_view text);

// Plain decimal text (never scientific notation) rounded half away from zero
// to at most `significant_digits` significant digits, trailing zeros dropped.
std::string render_decimal(const Rational& value, int significant_digits = 12);

Rational apply(ArithmeticOp op, const Rational& a, const Rational& b);

}  // namespace labelflow
