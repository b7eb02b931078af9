#ifndef GOI_EXPR_PARSE_HPP
#define GOI_EXPR_PARSE_HPP

#include <string>

#include "goi/expr.hpp"

namespace goi {

// Grammar: + - * / ^ with usual precedence, parentheses, unary minus.
// Atoms: numbers, eps, i, pi, x|x1..x4, y|y1..y4, xi|xi1..xi4,
// xinorm (|xi|), xibracket (<xi>).
// Calls: pow(e,const), exp, log, sin, cos, sqrt, bump, smoothstep, posexp,
// floor, abs2 (squared modulus of a real pair is not supported; abs2(e)=e*e
// for real e).
// Throws errc::config with position info on any lexical/semantic error.
Expr parse_expr(const std::string& text, const Arity& ar);

} // namespace goi

#endif
