#pragma once

#include <string_view>

namespace ttsm {

/// Evaluates a small arithmetic expression: decimal numbers, + - * /,
/// unary minus, parentheses, the constant `pi` and `sqrt(...)`.
/// Example: "0.97+0.03*sqrt(2)", "2*pi/100". Throws InvalidArgument on
/// malformed input.
double evaluate_expression(std::string_view text);

}  // namespace ttsm
