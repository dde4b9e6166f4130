#ifndef QLS_EXPR_HPP
#define QLS_EXPR_HPP

#include <functional>
#include <string>

namespace qls {

// Compiles a small arithmetic expression over the single variable "s" into a
// callable. Grammar: + - * / ^ (right-assoc), unary minus, parentheses,
// numeric literals, and the functions sqrt, atan, sin, cos, exp.
// Used for user-supplied f(s), h(s) in JSON model descriptors.
std::function<double(double)> compile_expression(const std::string& text);

} // namespace qls

#endif
