#pragma once

#include <map>
#include <string>

namespace tsnsim {

/// Arithmetic over numbers and named variables: + - * / and parentheses,
/// unary minus, scientific notation. Scenario fields like "1000*U_h" or
/// "24/N" are written in this form and evaluated per sweep point.
double eval_expr(const std::string& text,
                 const std::map<std::string, double>& vars);

}  // namespace tsnsim
