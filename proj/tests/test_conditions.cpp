#include "doctest.h"
#include "support.hpp"

#include "linsym/conditions.hpp"
#include "linsym/parse.hpp"

using namespace linsym;
using linsym::testing::palette;
using linsym::testing::random_t_function;

namespace {

Expr omega1() { return var_x(1) * cos(var_t()) + var_x(2) * sin(var_t()); }
Expr omega2() { return -var_x(1) * sin(var_t()) + var_x(2) * cos(var_t()); }
Expr r2() { return pow_int(var_x(1), 2) + pow_int(var_x(2), 2); }

bool zero(const Expr& e, Rng& rng, int points = 60)
{
    ZeroTestOptions opt;
    opt.bindings = 2;
    opt.points = points;
    return test_zero(e, opt, rng).zero;
}

std::vector<GeneratorCoeffs> free_algebra()
{
    const int n = 2;
    Expr t = var_t();
    return {gen_M(n),
            gen_I(n),
            gen_P({constant(1), constant(0)}),
            gen_P({t, constant(0)}),
            gen_P({constant(0), constant(1)}),
            gen_P({constant(0), t}),
            gen_J(n, 1, 2),
            gen_D(n, constant(1)),
            gen_D(n, t),
            gen_D(n, t * t) - gen_I(n, t)};
}

struct Pair {
    Potential V;
    GeneratorCoeffs g;
};

/// Potentials with a known symmetry.
Pair symmetric_pair(Rng& rng, int k)
{
    const auto& P = palette();
    FunctionSymbol U2 = P.U;
    FunctionSymbol U1 = make_symbol("U1", 1, Codomain::Complex);
    Expr t = var_t();
    auto rnd = [&]() { return constant(std::uniform_int_distribution<int>(-4, 4)(rng), 3); };
    switch (k % 7) {
    case 0:
        return {{2, func(U2, {var_x(1), var_x(2)})}, rnd() * gen_D(2, constant(1)) + gen_M(2, rnd())};
    case 1:
        return {{2, func(U2, {omega1(), omega2()})}, gen_D(2, constant(1)) + gen_J(2, 1, 2)};
    case 2: {
        // V = U(t, x2) + i f''(t) x1 with P(1,0) - f'(t) I.
        Expr f = func(P.f, {t});
        Expr V = func(U2, {t, var_x(2)}) + imag_unit() * diff_t(f, 2) * var_x(1);
        return {{2, V}, gen_P({constant(1), constant(0)}) - gen_I(2, diff_t(f))};
    }
    case 3:
        return {{2, func(U1, {atan2(var_x(2), var_x(1))}) * pow_int(r2(), -1)},
                gen_D(2, t * t) - gen_I(2, t)};
    case 4: {
        // Free equation with a random element of its algebra.
        GeneratorCoeffs g = GeneratorCoeffs::zero(2);
        for (const auto& b : free_algebra())
            g = g + rnd() * b;
        return {{2, constant(0)}, g};
    }
    case 5:
        return {{2, func(P.W, {t, var_x(1), var_x(2)})}, rnd() * gen_M(2) + rnd() * gen_I(2)};
    default: {
        // Harmonic potential: V = x1^2/4 * f''/f type with P(f, 0).
        Expr f = func(make_symbol("h", 1, Codomain::Real, Shape::Positive), {t});
        Expr V = Rational(1, 4) * diff_t(f, 2) / f * pow_int(var_x(1), 2) + func(U1, {var_x(2)});
        return {{2, V}, gen_P({f, constant(0)})};
    }
    }
}

GeneratorCoeffs random_generator(Rng& rng)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(2);
    g.tau = random_t_function(rng, 1);
    g.chi = {random_t_function(rng, 1), random_t_function(rng, 1)};
    g.sigma = random_t_function(rng, 1);
    g.rho = random_t_function(rng, 1);
    if (std::uniform_int_distribution<int>(0, 1)(rng))
        g = g + gen_J(2, 1, 2, constant(1, 2));
    return g;
}

} // namespace

TEST_CASE("classifying residual examples")
{
    Rng rng(1);
    Potential zero_v{2, constant(0)};
    CHECK(zero(classifying_residual(zero_v, gen_D(2, constant(1))), rng));

    FunctionSymbol U = make_symbol("U", 0, Codomain::Complex);
    Potential c7{2, func(U, {}) * pow_int(r2(), -1)};
    CHECK(zero(classifying_residual(c7, gen_D(2, var_t())), rng));

    Potential tx{2, var_t() * var_x(1)};
    Expr r = classifying_residual(tx, gen_D(2, constant(1)));
    CHECK(structurally_equal(r, var_x(1)));
    CHECK_FALSE(zero(r, rng));

    CHECK_THROWS_AS(classifying_residual({3, constant(0)}, gen_D(2, constant(1))),
                    std::invalid_argument);
}

TEST_CASE("eta0 residual examples")
{
    Rng rng(2);
    Potential v0{2, constant(0)};
    CHECK(zero(eta0_residual(v0, constant(1)), rng));
    CHECK(zero(eta0_residual(v0, var_x(1)), rng));
    Expr wave = exp(imag_unit() * var_x(1) - imag_unit() * var_t());
    CHECK(zero(eta0_residual(v0, wave), rng));
    Expr wrong = exp(imag_unit() * var_x(1) + imag_unit() * var_t());
    CHECK_FALSE(zero(eta0_residual(v0, wrong), rng));
}

TEST_CASE("prolonged residual examples")
{
    Rng rng(3);
    VectorField dt = VectorField::zero(2);
    dt.xi_t = constant(1);
    Expr r = prolonged_residual({2, constant(0)}, dt);
    CHECK(zero(r, rng));

    VectorField d1 = VectorField::zero(2);
    d1.xi[0] = constant(1);
    r = prolonged_residual({2, var_x(1)}, d1);
    CHECK_FALSE(zero(r, rng));
    CHECK(zero(r - psi(), rng));
    for (const VarId& v : jets(r))
        CHECK(v.t_order() == 0);
}

TEST_CASE("time jets are eliminated on solutions")
{
    Rng rng(4);
    Potential V{2, func(palette().W, {var_t(), var_x(1), var_x(2)})};
    Expr e = jet({2, 1}) + conj(jet({1, 0, 1})) * jet({1});
    Expr r = eliminate_time_jets(V, e);
    for (const VarId& v : jets(r))
        CHECK(v.t_order() == 0);
    // psi_t1 = D_1(i psi_aa + i V psi).
    Expr want = imag_unit() * (jet({0, 3}) + jet({0, 1, 2}) + diff(V.expr, VarId::x(1)) * psi() +
                               V.expr * jet({0, 1}));
    CHECK(zero(eliminate_time_jets(V, jet({1, 1})) - want, rng));
}

TEST_CASE("property: prolonged residual matches classifying residual")
{
    Rng rng(5);
    int pairs = 0, rejected = 0;
    for (int k = 0; k < 56; ++k) {
        Pair p;
        if (k % 4 == 3) {
            p = {{2, func(palette().W, {var_t(), var_x(1), var_x(2)}) + var_t() * r2()},
                 random_generator(rng)};
        } else {
            p = symmetric_pair(rng, k);
        }
        Expr cls = classifying_residual(p.V, p.g);
        Expr pro = prolonged_residual(p.V, expand(p.g));
        bool cz = zero(cls, rng, 40);
        bool pz = zero(pro, rng, 40);
        CHECK_MESSAGE(cz == pz, k);
        CHECK(cz == (k % 4 != 3));
        if (!cz)
            ++rejected;
        // Exact relation between the two formulations.
        CHECK(zero(pro - cls * psi(), rng, 20));
        ++pairs;
    }
    CHECK(pairs >= 50);
    CHECK(rejected >= 10);
}

TEST_CASE("property: solution shifts enter through eta0 only")
{
    Rng rng(6);
    for (int k = 0; k < 8; ++k) {
        GeneratorCoeffs g = random_generator(rng);
        g.eta0 = func(palette().W, {var_t(), var_x(1), var_x(2)}) + var_x(1) * var_x(2);
        Potential V{2, func(palette().U, {var_t(), var_x(1)})};
        Expr pro = prolonged_residual(V, expand(g));
        Expr want = classifying_residual(V, g) * psi() + eta0_residual(V, *g.eta0);
        CHECK(zero(pro - want, rng, 20));
    }
}

TEST_CASE("invariant integers")
{
    Rng rng(7);
    SurrogateBinding b;
    auto free = free_algebra();
    InvariantTuple t19 = invariants(free, b, rng);
    CHECK(t19 == InvariantTuple{2, 4, 1, 3, 2});
    CHECK(t19.dim() == 10);

    CHECK(invariants({gen_M(2), gen_I(2)}, b, rng) == InvariantTuple{2, 0, 0, 0, 0});

    FunctionSymbol beta = make_constant_symbol("beta", 0.2, 2.0);
    std::vector<GeneratorCoeffs> c3{gen_M(2), gen_I(2), gen_D(2, constant(1)),
                                    gen_D(2, var_t()) + gen_J(2, 1, 2, func(beta, {}))};
    CHECK(invariants(c3, b, rng) == InvariantTuple{2, 0, 0, 2, 0});

    // D(t^2) without the I-term still closes (the I-term is central) but
    // D(1) with P(t,0) does not close without P(1,0).
    std::vector<GeneratorCoeffs> open{gen_M(2), gen_I(2), gen_D(2, constant(1)),
                                      gen_P({var_t(), constant(0)})};
    CHECK_THROWS_AS(invariants(open, b, rng), InvariantError);
    CHECK_THROWS_AS(invariants({gen_M(2), gen_D(2, constant(1))}, b, rng), InvariantError);
    // Dependent generators do not inflate the count.
    std::vector<GeneratorCoeffs> dup = free;
    dup.push_back(free[2] + free[7]);
    CHECK(invariants(dup, b, rng) == InvariantTuple{2, 4, 1, 3, 2});
}

TEST_CASE("tuple restrictions")
{
    CHECK_FALSE(tuple_restriction_violation({2, 4, 1, 3, 2}));
    CHECK(tuple_restriction_violation({2, 1, 1, 0, 1}));
    CHECK(tuple_restriction_violation({2, 2, 0, 2, 1}));
    CHECK_FALSE(tuple_restriction_violation({2, 0, 0, 2, 0}));
    CHECK(tuple_restriction_violation({2, 5, 0, 0, 2}));
}

TEST_CASE("kernel algebra")
{
    Rng rng(8);
    KernelReport rep = kernel_check(4, rng);
    for (const auto& l : rep.lines)
        MESSAGE(l);
    CHECK(rep.ok);
    Potential vt{2, var_t()};
    CHECK_FALSE(zero(classifying_residual(vt, gen_D(2, constant(1))), rng));
}
