#pragma once

// Text form of expressions.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' exponent)?
//   exponent := integer | '(' ['-'] integer ['/' integer] ')'
//   atom   := number | 'i' | 'pi' | 't' | 'x'k | jet
//           | name | name ['{' int {',' int} '}'] '(' expr {',' expr} ')'
//           | builtin '(' expr {',' expr} ')' | '|' expr '|' | '(' expr ')'
//   jet    := ('psi' | 'psistar') ['_' ('t' | digit)+]
//
// Builtins: cos, sin, exp, ln (of the modulus), atan2, sgn, conj, inv(f, a)
// where f is a function of t and inv(f, a) solves f(s) = a. A fractional
// exponent is only accepted on |..| or a positive constant. Braces after a
// declared name give derivative orders per argument slot.

#include "linsym/expr.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace linsym {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos)
    {
    }
    std::size_t position;
};

class UnknownSymbolError : public ParseError {
  public:
    using ParseError::ParseError;
};

/// Declared function symbols, keyed by name.
class Declarations {
  public:
    void add(const FunctionSymbol& s);
    const FunctionSymbol* find(const std::string& name) const;
    const std::map<std::string, FunctionSymbol>& all() const { return table_; }

    /// JSON list of {"name", "arity", "codomain": "real"|"complex",
    /// optional "shape": "any"|"positive"|"increasing"|"nonzero",
    /// optional "range": [lo, hi]}.
    static Declarations from_json_text(std::string_view text);

  private:
    std::map<std::string, FunctionSymbol> table_;
};

struct ParseContext {
    int n = 2;
    const Declarations* decls = nullptr;
};

Expr parse(std::string_view text, const ParseContext& ctx);
std::string print(const Expr& e);
std::string print_var(const VarId& v);

} // namespace linsym
