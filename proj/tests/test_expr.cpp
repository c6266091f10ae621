#include "doctest.h"
#include "support.hpp"

#include "linsym/eval.hpp"
#include "linsym/expr.hpp"
#include "linsym/parse.hpp"

#include <cmath>

using namespace linsym;
using linsym::testing::palette;
using linsym::testing::RandomExpr;

namespace {

Declarations decls()
{
    Declarations d;
    d.add(palette().f);
    d.add(palette().g);
    d.add(palette().U);
    d.add(palette().b);
    d.add(make_symbol("V", 1, Codomain::Complex));
    return d;
}

Expr P(const std::string& s)
{
    static const Declarations d = decls();
    return parse(s, ParseContext{2, &d});
}

Expr omega1() { return var_x(1) * cos(var_t()) + var_x(2) * sin(var_t()); }
Expr omega2() { return -var_x(1) * sin(var_t()) + var_x(2) * cos(var_t()); }

SamplePoint point(double t, std::vector<double> x)
{
    SamplePoint p;
    p.t = t;
    p.x = std::move(x);
    return p;
}

} // namespace

TEST_CASE("parse builds the expected trees")
{
    Expr e = P("x1^2 + x2^2");
    REQUIRE(e->kind == Kind::Sum);
    REQUIRE(e->args.size() == 2);
    CHECK(e->args[0]->kind == Kind::IntPow);
    CHECK(e->args[0]->int_exp == 2);
    CHECK(structurally_equal(e->args[0]->args[0], var_x(1)));
    CHECK(structurally_equal(e->args[1]->args[0], var_x(2)));

    Declarations d;
    d.add(make_symbol("U", 1, Codomain::Complex));
    d.add(make_symbol("b", 0, Codomain::Real));
    Expr c9 = parse("U(x2) + i*b*x1", ParseContext{2, &d});
    REQUIRE(c9->kind == Kind::Sum);
    CHECK(c9->args[0]->kind == Kind::Func);
    CHECK(c9->args[1]->kind == Kind::Product);
    CHECK_FALSE(c9->real);

    Expr c = P("conj(psi)");
    REQUIRE(c->kind == Kind::Conj);
    CHECK(structurally_equal(c->args[0], psi()));
    CHECK(structurally_equal(conj(c), psi()));
}

TEST_CASE("parse errors carry positions")
{
    try {
        P("x1 + * 2");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.position == 5);
    }
    CHECK_THROWS_AS(P("h(t)"), UnknownSymbolError);
    CHECK_THROWS_AS(P("x3"), ParseError);
    CHECK_THROWS_AS(P("t^(1/2)"), ParseError);
    CHECK_THROWS_AS(P("|psi|"), ParseError);
    CHECK_NOTHROW(P("|t|^(1/2)"));
}

TEST_CASE("jet names")
{
    CHECK(structurally_equal(P("psi_t1"), jet({1, 1})));
    CHECK(structurally_equal(P("psi_12"), jet({0, 1, 1})));
    CHECK(structurally_equal(P("psistar_22"), jet({0, 0, 2}, true)));
    CHECK(print(jet({2, 0, 1}, true)) == "psistar_tt2");
}

TEST_CASE("diff examples")
{
    Expr d = diff(P("x1^2"), VarId::x(1));
    CHECK(structurally_equal(d, constant(2) * var_x(1)));

    // Chain rule through a two-argument symbol.
    FunctionSymbol U = palette().U;
    Expr u = func(U, {omega1(), omega2()});
    Expr got = diff(u, VarId::t());
    Expr want = func(U, {omega1(), omega2()}, {1, 0}) * omega2() +
                func(U, {omega1(), omega2()}, {0, 1}) *
                    (-var_x(1) * cos(var_t()) - var_x(2) * sin(var_t()));
    Rng rng(1);
    CHECK(is_zero(got - want, rng));
}

TEST_CASE("derivative of an absolute power matches finite differences")
{
    FunctionSymbol T = make_symbol("T", 1, Codomain::Real);
    Expr Tt = func(T, {var_t()}, {1});
    Expr e = pow_abs(Tt, Rational(1, 2));
    Expr d = diff(e, VarId::t());
    Expr spec = Rational(1, 2) * pow_abs(Tt, Rational(-1, 2)) * sign(Tt) * func(T, {var_t()}, {2});
    Rng rng(2);
    CHECK(is_zero(d - spec, rng));
    for (int b = 0; b < 5; ++b) {
        SurrogateBinding bind;
        bind.bind_missing({e}, rng);
        for (int k = 0; k < 20; ++k) {
            double t0 = std::uniform_real_distribution<double>(0.3, 1.7)(rng);
            auto at = [&](double t) { return eval(e, bind, point(t, {0, 0})); };
            EvalResult r = evaluate(d, bind, point(t0, {0, 0}));
            if (r.unsafe)
                continue;
            double h = 1e-5;
            Complex fd = (at(t0 + h) - at(t0 - h)) / (2 * h);
            CHECK(std::abs(fd - r.value) <= 1e-6 * (1 + std::abs(r.value)));
        }
    }
}

TEST_CASE("total derivatives")
{
    CHECK(structurally_equal(total_derivative(psi(), 1), jet({0, 1})));
    CHECK(structurally_equal(total_derivative(var_x(1) * psi(), 0), var_x(1) * jet({1})));
    CHECK(structurally_equal(total_derivative(conj(jet({0, 1})), 2), jet({0, 1, 1}, true)));
    // D_t of x1*psi_1*conj(psi) by the product rule.
    Expr e = var_x(1) * jet({0, 1}) * conj(psi());
    Expr want = var_x(1) * jet({1, 1}) * conj(psi()) + var_x(1) * jet({0, 1}) * jet({1}, true);
    Rng rng(3);
    CHECK(is_zero(total_derivative(e, 0) - want, rng));
}

TEST_CASE("evaluation examples")
{
    SurrogateBinding b;
    CHECK(std::abs(eval(omega1(), b, point(0.0, {3, 5})) - Complex(3)) < 1e-15);

    FunctionSymbol f = make_symbol("fc", 1, Codomain::Real);
    Surrogate s;
    s.arity = 1;
    s.waves.push_back({Complex(1.0), {2.0}, 0.0});
    b.bind("fc", s);
    Expr d = diff(func(f, {var_t()}), VarId::t());
    CHECK(std::abs(eval(d, b, point(0.0, {0, 0}))) < 1e-15);
    CHECK(std::abs(eval(d, b, point(0.3, {0, 0})) - Complex(-2 * std::sin(0.6))) < 1e-14);
    CHECK(std::abs(eval(func(f, {var_t()}, {3}), b, point(0.3, {0, 0})) -
                   Complex(8 * std::sin(0.6))) < 1e-13);

    CHECK_THROWS_AS(eval(func(palette().g, {var_t()}), b, point(0.3, {0, 0})), UnboundSymbol);
}

TEST_CASE("inverse function nodes")
{
    Expr T = var_t() * var_t() * var_t() + var_t();
    Expr inv = inverse(T, var_t());
    SurrogateBinding b;
    double s = eval(inv, b, point(1.0, {})).real();
    CHECK(std::abs(s * s * s + s - 1.0) < 1e-12);
    Rng rng(4);
    // d/dt T^{-1}(t) = 1/T'(T^{-1}(t)).
    Expr d = diff(inv, VarId::t());
    Expr want = pow_int(3 * inv * inv + 1, -1);
    CHECK(is_zero(d - want, rng));
    CHECK(is_zero(subst_t(T, inv) - var_t(), rng));

    // Roots that land exactly on the initial bracket ends.
    Expr round = inverse(T, T);
    for (double t : {0.3, 1.7})
        CHECK(eval(round, b, point(t, {})).real() == doctest::Approx(t));
}

TEST_CASE("is_zero examples")
{
    Rng rng(5);
    CHECK(is_zero(P("cos(t)^2 + sin(t)^2 - 1"), rng));
    Declarations d;
    d.add(make_symbol("U", 2, Codomain::Complex));
    Expr V = parse("U(x1, x2)", ParseContext{2, &d});
    CHECK(is_zero(var_x(1) * diff(V, VarId::t()), rng));
    CHECK_FALSE(is_zero(P("t*x1"), rng));
    ZeroTestResult r = test_zero(P("t*x1"), ZeroTestOptions{}, rng);
    REQUIRE(r.witness);
    CHECK(r.witness->x.size() == 2);
}

TEST_CASE("property: mixed partials commute")
{
    Rng rng(11);
    RandomExpr gen(rng, true);
    std::vector<VarId> vars{VarId::t(), VarId::x(1), VarId::x(2), VarId::jet({}),
                            VarId::jet({}, true), VarId::jet({0, 1})};
    for (int k = 0; k < 30; ++k) {
        Expr e = gen.make(3);
        const VarId& u = vars[k % vars.size()];
        const VarId& v = vars[(k / vars.size() + k + 1) % vars.size()];
        Expr a = diff(diff(e, u), v);
        Expr b = diff(diff(e, v), u);
        ZeroTestOptions opt;
        opt.bindings = 2;
        opt.points = 20;
        CHECK_MESSAGE(test_zero(a - b, opt, rng).zero, print(e));
    }
}

TEST_CASE("property: evaluator agrees with the differentiator")
{
    Rng rng(12);
    RandomExpr gen(rng, true);
    int checked = 0;
    for (int k = 0; k < 40; ++k) {
        Expr e = gen.make(3);
        Expr d = diff(e, VarId::t());
        SurrogateBinding b;
        b.bind_missing({e}, rng);
        for (int j = 0; j < 5; ++j) {
            SamplePoint p = draw_point(2, {e}, SampleDomain{}, rng);
            EvalResult r = evaluate(d, b, p);
            if (r.unsafe)
                continue;
            double h = 1e-5;
            SamplePoint lo = p, hi = p;
            lo.t -= h;
            hi.t += h;
            Complex fd = (eval(e, b, hi) - eval(e, b, lo)) / (2 * h);
            double scale = 1 + std::abs(r.value) + evaluate(e, b, p).scale;
            CHECK_MESSAGE(std::abs(fd - r.value) <= 1e-6 * scale, print(e));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("property: conjugation and realness")
{
    Rng rng(13);
    RandomExpr gen(rng, true);
    for (int k = 0; k < 40; ++k) {
        Expr e = gen.make(3);
        SurrogateBinding b;
        b.bind_missing({e}, rng);
        SamplePoint p = draw_point(2, {e}, SampleDomain{}, rng);
        EvalResult r = evaluate(e, b, p);
        if (r.unsafe)
            continue;
        Complex c = eval(conj(e), b, p);
        CHECK(std::abs(c - std::conj(r.value)) <= 1e-12 * (1 + r.scale));
        if (e->real)
            CHECK(std::abs(r.value.imag()) <= 1e-12 * (1 + r.scale));
        CHECK(structurally_equal(conj(conj(e)), e));
    }
}

TEST_CASE("property: print/parse round trip")
{
    Rng rng(14);
    RandomExpr gen(rng, true);
    Declarations d;
    d.add(palette().f);
    d.add(palette().g);
    d.add(palette().U);
    d.add(palette().W);
    d.add(palette().b);
    for (int k = 0; k < 200; ++k) {
        Expr e = gen.make(4);
        if (k % 3 == 0)
            e = diff(e, VarId::x(1));
        std::string s = print(e);
        Expr back = parse(s, ParseContext{2, &d});
        CHECK_MESSAGE(structurally_equal(back, e), s);
        CHECK(print(back) == s);
    }
    Expr inv = inverse(4 * var_t(), var_t());
    CHECK(structurally_equal(P(print(inv)), inv));
    Expr ip = P("(1/2 + (-3)*i)*x1 + 0.25");
    CHECK(print(ip) == "(1/4) + ((1/2) + (-3)*i)*x1");
}
