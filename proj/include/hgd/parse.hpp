#ifndef HGD_PARSE_HPP
#define HGD_PARSE_HPP

// Text grammar for operators:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' integer)?
//   atom   := number | name | 'd'name | '(' expr ')'
// Numbers are integers or decimals, converted exactly. Division is only
// allowed by derivation-free, nonzero expressions.

#include <string>
#include <string_view>
#include <vector>

#include "hgd/weyl.hpp"

namespace hgd {

struct Ideal {
  VarTablePtr vars;
  std::vector<DiffOperator> generators;
};

/// Parses one expression. `line` is only used in error messages.
DiffOperator parse_operator(std::string_view text, const VarTablePtr& vars, std::size_t line = 1);

/// Parses a derivation-free expression into a rational function.
RationalFunction parse_rational(std::string_view text, const VarTablePtr& vars, std::size_t line = 1);

/// "vars: a b c" followed by one operator per line. Blank lines and text
/// after '#' are ignored.
Ideal parse_ideal(std::string_view text);
Ideal read_ideal_file(const std::string& path);

/// Inverse of parse_ideal.
std::string format_ideal(const Ideal& ideal);

/// Parses a comma-separated list of (possibly non-monic) basis elements
/// such as "1, x*dx, y*dy".
std::vector<DiffOperator> parse_operator_list(std::string_view text, const VarTablePtr& vars);

}  // namespace hgd

#endif  // HGD_PARSE_HPP
