#pragma once

// Shared helpers for the unit tests: random expressions and common symbols.

#include "linsym/eval.hpp"
#include "linsym/expr.hpp"

#include <random>
#include <vector>

namespace linsym::testing {

struct Palette {
    FunctionSymbol f = make_symbol("f", 1, Codomain::Real);
    FunctionSymbol g = make_symbol("g", 1, Codomain::Real);
    FunctionSymbol U = make_symbol("U", 2, Codomain::Complex);
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    FunctionSymbol b = make_symbol("b", 0, Codomain::Real);
};

inline const Palette& palette()
{
    static const Palette p;
    return p;
}

/// Random expression over t, x1, x2, a few symbols and optionally jets.
class RandomExpr {
  public:
    RandomExpr(Rng& rng, bool with_jets) : rng_(rng), jets_(with_jets) {}

    Expr make(int depth)
    {
        if (depth <= 0)
            return leaf();
        switch (pick(0, 8)) {
        case 0:
        case 1:
            return make(depth - 1) + make(depth - 1);
        case 2:
        case 3:
            return make(depth - 1) * make(depth - 1);
        case 4:
            return pow_int(make(depth - 1), pick(2, 3));
        case 5:
            return cos(real_arg(depth - 1));
        case 6:
            return exp(Rational(1, 2) * sin(real_arg(depth - 1)));
        case 7:
            return pow_abs(1 + real_arg(depth - 1) * real_arg(depth - 1), Rational(pick(-3, 3), 2));
        default:
            return conj(make(depth - 1));
        }
    }

    Expr real_arg(int depth)
    {
        if (depth <= 0)
            return real_leaf();
        switch (pick(0, 2)) {
        case 0:
            return real_arg(depth - 1) + real_arg(depth - 1);
        case 1:
            return real_arg(depth - 1) * real_arg(depth - 1);
        default:
            return sin(real_arg(depth - 1));
        }
    }

  private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Expr real_leaf()
    {
        const Palette& P = palette();
        switch (pick(0, 5)) {
        case 0:
            return var_t();
        case 1:
            return var_x(1);
        case 2:
            return var_x(2);
        case 3:
            return func(P.f, {var_t()});
        case 4:
            return func(P.b, {});
        default:
            return constant(pick(-3, 3), pick(1, 4));
        }
    }

    Expr leaf()
    {
        const Palette& P = palette();
        int top = jets_ ? 8 : 6;
        switch (pick(0, top)) {
        case 0:
        case 1:
            return real_leaf();
        case 2:
            return func(P.U, {var_x(1), var_x(2)});
        case 3:
            return func(P.W, {var_t(), var_x(1), var_x(2)});
        case 4:
            return func(P.g, {var_t() * var_x(1)});
        case 5:
            return constant(CRational(Rational(pick(-2, 2)), Rational(pick(-2, 2), 3)));
        case 6:
            return func(P.f, {var_x(2)});
        case 7:
            return jet({0, pick(0, 1), pick(0, 1)}, pick(0, 1) == 1);
        default:
            return psi();
        }
    }

    Rng& rng_;
    bool jets_;
};

/// Random real function of t built from t, f(t), g(t), constants and
/// elementary functions.
inline Expr random_t_function(Rng& rng, int depth)
{
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const Palette& P = palette();
    if (depth <= 0) {
        switch (pick(0, 4)) {
        case 0:
            return var_t();
        case 1:
            return func(P.f, {var_t()});
        case 2:
            return func(P.g, {var_t()});
        case 3:
            return func(P.b, {});
        default:
            return constant(pick(-3, 3), pick(1, 3));
        }
    }
    switch (pick(0, 4)) {
    case 0:
        return random_t_function(rng, depth - 1) + random_t_function(rng, depth - 1);
    case 1:
        return random_t_function(rng, depth - 1) * random_t_function(rng, depth - 1);
    case 2:
        return sin(random_t_function(rng, depth - 1));
    case 3:
        return exp(Rational(1, 3) * cos(random_t_function(rng, depth - 1)));
    default:
        return random_t_function(rng, depth - 1);
    }
}

} // namespace linsym::testing
