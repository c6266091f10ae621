#include "doctest.h"

#include "linsym/equiv.hpp"
#include "linsym/fixtures.hpp"
#include "linsym/json_io.hpp"

using namespace linsym;

namespace {

bool zero(const Expr& e, Rng& rng)
{
    ZeroTestOptions opt;
    opt.bindings = 2;
    opt.points = 40;
    return test_zero(e, opt, rng).zero;
}

bool zero(const std::vector<Expr>& es, Rng& rng)
{
    ZeroTestOptions opt;
    opt.bindings = 2;
    opt.points = 40;
    return test_zero(es, opt, rng).zero;
}

Expr r2() { return pow_int(var_x(1), 2) + pow_int(var_x(2), 2); }

void report(const PropertyReport& r)
{
    for (const auto& f : r.failures)
        MESSAGE(f);
}

} // namespace

TEST_CASE("action on potentials: examples")
{
    Rng rng(21);
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    Potential V{2, func(W, {var_t(), var_x(1), var_x(2)})};
    CHECK(zero(act_on_potential(V, EquivTransformation::identity(2)).expr - V.expr, rng));

    FunctionSymbol s = make_constant_symbol("s", -2, 2);
    Potential shifted = act_on_potential({2, constant(0)}, elem_M(2, func(s, {}) * var_t()));
    CHECK(zero(shifted.expr - func(s, {}), rng));

    FunctionSymbol U = make_symbol("U", 0, Codomain::Complex);
    Potential c7{2, func(U, {}) * pow_int(r2(), -1)};
    Potential scaled = act_on_potential(c7, elem_D(2, 4 * var_t()));
    CHECK(zero(scaled.expr - c7.expr, rng));

    // Wigner reflection: t~ = -t maps V to V* at -t.
    Potential wig = act_on_potential(V, elem_D(2, -var_t()));
    CHECK(zero(wig.expr - conj(subst_t(V.expr, -var_t())), rng));

    // Rotation by O: V(x) -> V(O^T x~).
    auto O = rotation2(constant(3, 5), constant(4, 5));
    Potential rot = act_on_potential(V, elem_J(O));
    Expr back = func(W, {var_t(), Rational(3, 5) * var_x(1) + Rational(4, 5) * var_x(2),
                         Rational(-4, 5) * var_x(1) + Rational(3, 5) * var_x(2)});
    CHECK(zero(rot.expr - back, rng));

    CHECK_THROWS_AS(act_on_potential({3, constant(0)}, EquivTransformation::identity(2)), std::invalid_argument);
}

TEST_CASE("composition and inversion: examples")
{
    Rng rng(22);
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    Potential V{2, func(W, {var_t(), var_x(1), var_x(2)})};
    Expr t = var_t();

    EquivTransformation s1 = elem_M(2, Rational(1, 2) * t), s2 = elem_M(2, Rational(3, 2) * t);
    EquivTransformation s12 = compose_maps(s1, s2);
    CHECK(zero(s12.Sigma - 2 * t, rng));
    CHECK(zero(act_on_potential({2, constant(0)}, s12).expr - constant(2), rng));

    EquivTransformation inv = invert_map(s1);
    CHECK(zero(inv.Sigma + Rational(1, 2) * t, rng));

    EquivTransformation sc = elem_D(2, 4 * t);
    EquivTransformation sci = invert_map(sc);
    CHECK(zero(sci.T - t / 4, rng));
    CHECK(zero(act_on_potential(act_on_potential(V, sc), sci).expr - V.expr, rng));

    EquivTransformation id = invert_map(EquivTransformation::identity(2));
    CHECK(zero(std::vector<Expr>{id.T - t, id.X[0], id.X[1], id.Sigma, id.Upsilon}, rng));

    AdmissibleTransformation a = make_admissible(V, sc);
    AdmissibleTransformation back = compose(a, invert(a), rng);
    CHECK(zero(back.target.expr - V.expr, rng));
    CHECK_THROWS_AS(compose(a, a, rng), NotComposable);
}

TEST_CASE("transformation validation and JSON")
{
    Declarations d;
    ParseContext ctx{2, &d};
    EquivTransformation tr = transformation_from_json_text(
        R"j({"T": "2*t", "O": [["3/5", "-4/5"], ["4/5", "3/5"]], "X": ["t", 0], "Sigma": "t^2"})j", ctx);
    CHECK(structurally_equal(tr.T, 2 * var_t()));
    CHECK_THROWS_AS(transformation_from_json_text(R"j({"O": [[1, 1], [0, 1]]})j", ctx), SchemaError);
    CHECK_THROWS_AS(transformation_from_json_text(R"j({"T": "x1"})j", ctx), SchemaError);
    CHECK_THROWS_AS(transformation_from_json_text(R"j({"Q": 1})j", ctx), SchemaError);
    CHECK_THROWS_AS(transformation_from_json_text("[1]", ctx), SchemaError);

    Rng rng(23);
    SurrogateBinding b;
    CHECK(sign_is_constant(elem_D(2, -3 * var_t()), b, rng));
    CHECK_FALSE(sign_is_constant(elem_D(2, pow_int(var_t() - 1, 2)), b, rng));
}

TEST_CASE("pushforward: listed examples")
{
    Rng rng(24);
    FunctionSymbol f = make_symbol("f", 1, Codomain::Real);
    FunctionSymbol g = make_symbol("g", 1, Codomain::Real);
    Expr tau = func(f, {var_t()}), ups = func(g, {var_t()});
    GeneratorCoeffs img = pushforward(gen_D(2, tau), elem_I(2, ups));
    GeneratorCoeffs want = gen_D(2, tau) + gen_I(2, tau * diff_t(ups));
    CHECK(zero((expand(img) - expand(want)).components(), rng));

    auto O = rotation2(constant(3, 5), constant(4, 5));
    std::vector<Expr> chi{tau, ups};
    GeneratorCoeffs pj = pushforward(gen_P(chi), elem_J(O));
    GeneratorCoeffs pw = gen_P({Rational(3, 5) * tau - Rational(4, 5) * ups, Rational(4, 5) * tau + Rational(3, 5) * ups});
    CHECK(zero((expand(pj) - expand(pw)).components(), rng));

    EquivTransformation both = elem_M(2, var_t());
    both.Upsilon = var_t();
    CHECK_THROWS_AS(pushforward(gen_M(2), both), std::invalid_argument);
}

TEST_CASE("property: closed-form pushforwards match the definition")
{
    Rng rng(25);
    PropertyReport r = check_pushforward_formulas(25, rng);
    report(r);
    CHECK(r.ok);
    CHECK(r.fixtures >= 25);
}

TEST_CASE("property: groupoid laws")
{
    Rng rng(26);
    PropertyReport r = check_groupoid_laws(20, rng);
    report(r);
    CHECK(r.ok);
    CHECK(r.fixtures >= 20);
    CHECK(r.rejected == r.fixtures);
}

TEST_CASE("property: pushforward equivariance")
{
    Rng rng(27);
    PropertyReport r = check_equivariance(24, rng);
    report(r);
    CHECK(r.ok);
    CHECK(r.fixtures >= 20);
}

TEST_CASE("equivalence algebra generators")
{
    Rng rng(28);
    PropertyReport r = check_equivalence_algebra(rng);
    report(r);
    CHECK(r.ok);
    CHECK(r.fixtures == 5);

    // The D coefficient without the n-factor in the i tau_tt term fails.
    EquivGenerator d;
    d.kind = EquivGenerator::Kind::D;
    d.param = pow_int(var_t(), 3);
    CHECK(equiv_generator_check(d, rng).ok);
    EquivGenerator m;
    m.kind = EquivGenerator::Kind::M;
    m.param = var_t();
    EquivGenerator i = m;
    i.kind = EquivGenerator::Kind::I;
    Expr v = func(make_symbol("V", 0, Codomain::Complex), {});
    CHECK(structurally_equal(m.v_coefficient(v), constant(1)));
    CHECK(structurally_equal(i.v_coefficient(v), -imag_unit()));
}

TEST_CASE("real subclass")
{
    Rng rng(29);
    PropertyReport r = check_real_subclass(10, rng);
    report(r);
    CHECK(r.ok);
    CHECK(r.rejected == 10);

    CHECK(is_real_admissible(EquivTransformation::identity(2), 2, rng));
    EquivTransformation sq = elem_D(2, var_t() * var_t());
    sq.Upsilon = Rational(-1, 2) * ln(var_t());
    CHECK(is_real_admissible(sq, 2, rng));
    sq.Upsilon = -ln(var_t());
    CHECK_FALSE(is_real_admissible(sq, 2, rng));
    EquivTransformation bad = elem_I(2, var_t());
    CHECK_FALSE(is_real_admissible(bad, 2, rng));
}

TEST_CASE("reduction to the free equation")
{
    Rng rng(30);
    CHECK(is_free_reducible({2, constant(0)}, rng) == Tristate::True);
    CHECK(is_free_reducible({2, Rational(1, 4) * r2()}, rng) == Tristate::True);
    FunctionSymbol f = make_symbol("f", 1, Codomain::Real);
    Expr t = var_t();
    Expr general = func(f, {t}) * r2() + t * var_x(1) + sin(t) + imag_unit() * func(f, {t});
    CHECK(is_free_reducible({2, general}, rng) == Tristate::True);
    CHECK(is_free_reducible({2, pow_int(var_x(2), -2)}, rng) == Tristate::False);
    CHECK(is_free_reducible({2, pow_int(var_x(1), 2)}, rng) == Tristate::False);
    CHECK(is_free_reducible({2, imag_unit() * var_x(1)}, rng) == Tristate::False);
    FunctionSymbol U = make_symbol("U", 2, Codomain::Complex);
    CHECK(is_free_reducible({2, func(U, {var_x(1), var_x(2)})}, rng) == Tristate::Unknown);
}

TEST_CASE("generalized shift and reduction fixtures")
{
    Rng rng(31);
    LemmaReport r = lemma_fixtures(rng);
    for (const auto& l : r.lines)
        MESSAGE(l);
    CHECK(r.ok);
}

TEST_CASE("shared oracles: brackets, prolongation and dimension facts")
{
    Rng rng(32);
    PropertyReport b = check_bracket_oracle(8, 3, rng);
    report(b);
    CHECK(b.ok);
    PropertyReport p = check_prolongation_oracle(12, rng);
    report(p);
    CHECK(p.ok);
    CHECK(p.rejected == 3);
    CHECK(p.worst < 1e-8);
    PropertyReport d = check_dimension_facts(rng);
    report(d);
    CHECK(d.ok);
    CHECK(d.fixtures == 20);
}
