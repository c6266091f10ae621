#include "linsym/fixtures.hpp"

#include <sstream>

namespace linsym {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rational small_coeff(Rng& rng)
{
    int p = pick(rng, 1, 4) * (pick(rng, 0, 1) ? 1 : -1);
    return Rational(p, 2);
}

const FunctionSymbol& f1()
{
    static const FunctionSymbol s = make_symbol("f1", 1, Codomain::Real);
    return s;
}

const FunctionSymbol& f2()
{
    static const FunctionSymbol s = make_symbol("f2", 1, Codomain::Real);
    return s;
}

ZeroTestOptions one_binding(int points = 40)
{
    ZeroTestOptions opt;
    opt.bindings = 1;
    opt.points = points;
    return opt;
}

bool vanishes(const Expr& e, Rng& rng, PropertyReport& rep, int points = 40)
{
    ZeroTestResult z = test_zero(e, one_binding(points), rng);
    rep.worst = std::max(rep.worst, z.max_normalized);
    return z.zero;
}

bool vanishes(const std::vector<Expr>& es, Rng& rng, PropertyReport& rep, int points = 40)
{
    ZeroTestResult z = test_zero(es, one_binding(points), rng);
    rep.worst = std::max(rep.worst, z.max_normalized);
    return z.zero;
}

std::string describe(const EquivTransformation& tr)
{
    std::ostringstream os;
    os << "{T=" << print(tr.T) << ", O=[";
    for (std::size_t a = 0; a < tr.O.size(); ++a)
        for (std::size_t b = 0; b < tr.O.size(); ++b)
            os << (a + b ? ", " : "") << print(tr.O[a][b]);
    os << "], X=(";
    for (std::size_t a = 0; a < tr.X.size(); ++a)
        os << (a ? ", " : "") << print(tr.X[a]);
    os << "), Sigma=" << print(tr.Sigma) << ", Upsilon=" << print(tr.Upsilon) << "}";
    return os.str();
}

} // namespace

Expr random_time_function(Rng& rng)
{
    Expr t = var_t();
    const Expr atoms[] = {constant(1), t, t * t, sin(t), func(f1(), {t}), func(f2(), {t})};
    std::vector<Expr> terms;
    int k = pick(rng, 1, 3);
    for (int j = 0; j < k; ++j)
        terms.push_back(small_coeff(rng) * atoms[pick(rng, 0, 5)]);
    return sum(std::move(terms));
}

Expr random_time_map(Rng& rng, bool allow_reversal)
{
    Expr t = var_t();
    Expr T;
    switch (pick(rng, 0, 3)) {
    case 0: {
        const Rational slopes[] = {Rational(1, 2), Rational(2), Rational(3)};
        T = slopes[pick(rng, 0, 2)] * t + Rational(pick(rng, -1, 1), 2);
        break;
    }
    case 1:
        T = t + Rational(1, 4) * sin(t);
        break;
    case 2:
        T = Rational(1, 3) * pow_int(t, 3) + t;
        break;
    default:
        T = func(make_symbol("Tg", 1, Codomain::Real, Shape::Increasing), {t});
        break;
    }
    if (allow_reversal && pick(rng, 0, 3) == 0)
        T = -T;
    return T;
}

std::vector<std::vector<Expr>> random_orthogonal2(Rng& rng)
{
    auto c = [](long long p, long long q) { return constant(p, q); };
    switch (pick(rng, 0, 4)) {
    case 0:
        return rotation2(c(3, 5), c(4, 5));
    case 1:
        return rotation2(c(-5, 13), c(12, 13));
    case 2:
        return {{c(1, 1), c(0, 1)}, {c(0, 1), c(-1, 1)}};
    case 3:
        return {{c(0, 1), c(1, 1)}, {c(1, 1), c(0, 1)}};
    default:
        return rotation2(c(0, 1), c(1, 1));
    }
}

EquivTransformation random_transformation(Rng& rng, bool allow_reversal)
{
    EquivTransformation tr = EquivTransformation::identity(2);
    tr.T = random_time_map(rng, allow_reversal);
    if (pick(rng, 0, 2))
        tr.O = random_orthogonal2(rng);
    tr.X = {random_time_function(rng), random_time_function(rng)};
    tr.Sigma = random_time_function(rng);
    tr.Upsilon = random_time_function(rng);
    return tr;
}

EquivTransformation random_elementary(Rng& rng, int kind)
{
    if (kind < 0)
        kind = pick(rng, 0, 4);
    switch (kind) {
    case 0:
        return elem_D(2, random_time_map(rng, true));
    case 1:
        return elem_J(random_orthogonal2(rng));
    case 2:
        return elem_P({random_time_function(rng), random_time_function(rng)});
    case 3:
        return elem_M(2, random_time_function(rng));
    default:
        return elem_I(2, random_time_function(rng));
    }
}

GeneratorCoeffs random_generator_coeffs(Rng& rng)
{
    GeneratorCoeffs g = gen_D(2, random_time_function(rng)) +
                        gen_P({random_time_function(rng), random_time_function(rng)}) +
                        gen_M(2, random_time_function(rng)) + gen_I(2, random_time_function(rng));
    if (pick(rng, 0, 1))
        g = g + gen_J(2, 1, 2, constant(small_coeff(rng)));
    return g;
}

// ---------------------------------------------------------------------------

namespace {

void groupoid_laws_once(const Potential& V, const EquivTransformation& a, const EquivTransformation& b,
                        const EquivTransformation& c, const std::string& where, Rng& rng, PropertyReport& rep)
{
    const Expr t = var_t();
    const auto id = EquivTransformation::identity(2);
    Expr Va = act_on_potential(V, a).expr;
    if (!vanishes(act_on_potential(V, compose_maps(a, id)).expr - Va, rng, rep) ||
        !vanishes(act_on_potential(V, compose_maps(id, a)).expr - Va, rng, rep))
        rep.fail("identity law" + where);
    if (!vanishes(act_on_potential(V, compose_maps(a, b)).expr - act_on_potential({2, Va}, b).expr, rng, rep))
        rep.fail("functoriality" + where);
    if (!vanishes(act_on_potential({2, Va}, invert_map(a)).expr - V.expr, rng, rep) ||
        !vanishes(act_on_potential(V, compose_maps(a, invert_map(a))).expr - V.expr, rng, rep))
        rep.fail("inverse law" + where);
    EquivTransformation ai = compose_maps(a, invert_map(a));
    std::vector<Expr> params{ai.T - t, ai.X[0], ai.X[1], ai.Sigma, ai.Upsilon};
    if (!vanishes(params, rng, rep))
        rep.fail("inverse parameters" + where);
    if (!vanishes(act_on_potential(V, compose_maps(compose_maps(a, b), c)).expr -
                      act_on_potential(V, compose_maps(a, compose_maps(b, c))).expr,
                  rng, rep))
        rep.fail("associativity" + where);

    // Admissible-level composition and its precondition.
    AdmissibleTransformation ta = make_admissible(V, a);
    AdmissibleTransformation tb = make_admissible(ta.target, b);
    AdmissibleTransformation tab = compose(ta, tb, rng);
    if (!vanishes(act_on_potential(tab.source, tab.map).expr - tab.target.expr, rng, rep))
        rep.fail("admissible composition" + where);
    try {
        compose(tb, ta, rng);
        rep.fail("non-composable pair accepted" + where);
    } catch (const NotComposable&) {
        ++rep.rejected;
    }
}

} // namespace

PropertyReport check_groupoid_laws(int pairs, Rng& rng)
{
    PropertyReport rep;
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    Expr t = var_t();
    Potential V{2, func(W, {t, var_x(1), var_x(2)}) + imag_unit() * func(f1(), {t}) * var_x(1) * var_x(2)};
    for (int k = 0; k < pairs; ++k) {
        EquivTransformation a = random_transformation(rng), b = random_transformation(rng),
                            c = random_transformation(rng);
        ++rep.fixtures;
        const std::string where = " for a=" + describe(a) + ", b=" + describe(b) + ", c=" + describe(c);
        try {
            groupoid_laws_once(V, a, b, c, where, rng, rep);
        } catch (const SamplingError& e) {
            rep.fail(std::string("sampling: ") + e.what() + where);
        }
    }
    return rep;
}

PropertyReport check_bracket_oracle(int pairs, int triples, Rng& rng)
{
    PropertyReport rep;
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    auto field = [&](bool with_eta0) {
        GeneratorCoeffs g = random_generator_coeffs(rng);
        if (with_eta0)
            g.eta0 = func(W, {var_t(), var_x(1), var_x(2)}) * var_x(1) +
                     imag_unit() * func(f1(), {var_t()}) * pow_int(var_x(2), 2);
        return g;
    };
    auto is_zero_field = [&](const VectorField& v, int points) { return vanishes(v.components(), rng, rep, points); };
    for (int k = 0; k < pairs; ++k) {
        GeneratorCoeffs a = field(k % 3 == 0), b = field(k % 4 == 1);
        ++rep.fixtures;
        if (!is_zero_field(expand(bracket_structural(a, b)) - bracket_generic(expand(a), expand(b)), 30))
            rep.fail("bracket of " + field_to_json_text(a) + " and " + field_to_json_text(b));
    }
    for (int k = 0; k < triples; ++k) {
        GeneratorCoeffs a = field(false), b = field(false), c = field(false);
        ++rep.fixtures;
        GeneratorCoeffs ab = bracket_structural(a, b);
        if (!is_zero_field(expand(ab + bracket_structural(b, a)), 20))
            rep.fail("antisymmetry for " + field_to_json_text(a) + " and " + field_to_json_text(b));
        GeneratorCoeffs jac = bracket_structural(a, bracket_structural(b, c)) +
                              bracket_structural(b, bracket_structural(c, a)) + bracket_structural(c, ab);
        if (!is_zero_field(expand(jac), 20))
            rep.fail("Jacobi identity for triple " + std::to_string(k));
    }
    return rep;
}

PropertyReport check_prolongation_oracle(int pairs, Rng& rng)
{
    PropertyReport rep;
    const CaseTable& table = CaseTable::builtin();
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    const Expr r2 = pow_int(var_x(1), 2) + pow_int(var_x(2), 2);
    for (int k = 0; k < pairs; ++k) {
        const bool negative = k % 4 == 3;
        Potential V;
        GeneratorCoeffs g;
        std::string what;
        if (negative) {
            V = {2, func(W, {var_t(), var_x(1), var_x(2)}) + var_t() * r2};
            g = random_generator_coeffs(rng);
            what = "non-symmetry " + field_to_json_text(g);
        } else {
            // Symmetries from the table: case k mod 20, a random generator.
            const CaseEntry& c = table.at(k % 20);
            CaseInstance inst = instantiate(table, c, 0);
            const int gi = pick(rng, 0, static_cast<int>(inst.generators.size()) - 1);
            V = inst.potential;
            g = inst.generators[gi];
            what = "case " + std::to_string(c.id) + " generator " + inst.labels[gi];
        }
        ++rep.fixtures;
        // The worst residual is tracked over the symmetries only.
        PropertyReport scratch;
        PropertyReport& sink = negative ? scratch : rep;
        const bool classifying = vanishes(classifying_residual(V, g), rng, sink, 30);
        const bool prolonged = vanishes(prolonged_residual(V, expand(g)), rng, sink, 30);
        if (classifying != prolonged)
            rep.fail("formulations disagree for " + what);
        else if (classifying == negative)
            rep.fail(std::string(negative ? "accepted " : "rejected ") + what);
        else if (negative)
            ++rep.rejected;
    }
    return rep;
}

PropertyReport check_dimension_facts(Rng& rng)
{
    PropertyReport rep;
    const CaseTable& table = CaseTable::builtin();
    const int n = table.n();
    for (const CaseEntry& c : table.cases()) {
        ++rep.fixtures;
        const std::string where = "case " + std::to_string(c.id);
        CaseInstance inst = instantiate(table, c, 0);
        SurrogateBinding binding;
        InvariantTuple t;
        try {
            t = invariants(inst.generators, binding, rng);
        } catch (const InvariantError& e) {
            rep.fail(where + ": " + e.what());
            continue;
        }
        if (auto bad = tuple_restriction_violation(t))
            rep.fail(where + " tuple " + t.str() + ": " + *bad);
        if (t.k2 == 1 && t.r0 == 1)
            rep.fail(where + " has k2 = r0 = 1");
        if (t.k3 == 2 && (t.k2 != 0 || t.r0 != 0))
            rep.fail(where + " has k3 = 2 with k2 or r0 nonzero");
        if (t.k0 + t.k1 > 6)
            rep.fail(where + " has a (P, M, I)-block of dimension " + std::to_string(t.k0 + t.k1));
        if (c.id == 19 && t.dim() != n * (n + 3) / 2 + 5)
            rep.fail("case 19 has dimension " + std::to_string(t.dim()));
    }
    return rep;
}

PropertyReport check_pushforward_formulas(int fixtures, Rng& rng)
{
    PropertyReport rep;
    for (int k = 0; k < fixtures; ++k) {
        GeneratorCoeffs g = random_generator_coeffs(rng);
        EquivTransformation e = random_elementary(rng, k % 5);
        ++rep.fixtures;
        VectorField d = expand(pushforward(g, e)) - pushforward_field(expand(g), e);
        if (!vanishes(d.components(), rng, rep, 30))
            rep.fail("pushforward of " + field_to_json_text(g) + " by " + describe(e));
    }
    return rep;
}

PropertyReport check_equivariance(int fixtures, Rng& rng)
{
    PropertyReport rep;
    const CaseTable& table = CaseTable::builtin();
    const int ids[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 17, 19};
    const int nid = sizeof(ids) / sizeof(ids[0]);
    for (int k = 0; k < fixtures; ++k) {
        const CaseEntry& c = table.at(ids[k % nid]);
        CaseInstance inst = instantiate(table, c, 0);
        const int gi = 2 + (k / nid) % (static_cast<int>(inst.generators.size()) - 2);
        const GeneratorCoeffs& g = inst.generators[gi];
        EquivTransformation e = random_elementary(rng, k % 5);
        ++rep.fixtures;
        const std::string where =
            "case " + std::to_string(c.id) + " generator " + inst.labels[gi] + " under " + describe(e);
        if (!vanishes(classifying_residual(inst.potential, g), rng, rep, 20)) {
            rep.fail("fixture is not a symmetry: " + where);
            continue;
        }
        Potential Vt = act_on_potential(inst.potential, e);
        if (!vanishes(classifying_residual(Vt, pushforward(g, e)), rng, rep, 30))
            rep.fail("image is not a symmetry: " + where);
    }
    return rep;
}

PropertyReport check_real_subclass(int fixtures, Rng& rng)
{
    PropertyReport rep;
    FunctionSymbol Wr = make_symbol("Wr", 3, Codomain::Real);
    Expr t = var_t();
    for (int k = 0; k < fixtures; ++k) {
        Expr V = func(Wr, {t, var_x(1), var_x(2)});
        if (k % 2)
            V = V + func(f1(), {t}) * pow_int(var_x(1), 2) + pow_int(1 + pow_int(var_x(2), 2), -1);
        EquivTransformation tr = random_transformation(rng);
        tr.Upsilon = Rational(-1, 2) * ln(diff_t(tr.T)) + small_coeff(rng);
        ++rep.fixtures;
        const std::string where = " for " + describe(tr);
        if (!is_real_admissible(tr, 2, rng))
            rep.fail("Upsilon = -(n/4) ln|T_t| not recognized as real-admissible" + where);
        if (!vanishes(imag_part(act_on_potential({2, V}, tr).expr), rng, rep))
            rep.fail("imaginary part of the image does not vanish" + where);
        // A deliberate violation must be detected.
        EquivTransformation bad = tr;
        bad.Upsilon = tr.Upsilon + t;
        bool detected = !is_real_admissible(bad, 2, rng);
        ZeroTestResult z = test_zero(imag_part(act_on_potential({2, V}, bad).expr), one_binding(), rng);
        if (detected && !z.zero)
            ++rep.rejected;
        else
            rep.fail("non-admissible Upsilon not detected" + where);
    }
    return rep;
}

PropertyReport check_equivalence_algebra(Rng& rng)
{
    PropertyReport rep;
    std::vector<EquivGenerator> gens;
    EquivGenerator d;
    d.kind = EquivGenerator::Kind::D;
    d.param = random_time_function(rng) + var_t() * var_t() * var_t();
    gens.push_back(d);
    EquivGenerator j;
    j.kind = EquivGenerator::Kind::J;
    gens.push_back(j);
    EquivGenerator p;
    p.kind = EquivGenerator::Kind::P;
    p.chi = {random_time_function(rng), random_time_function(rng) + sin(var_t())};
    gens.push_back(p);
    EquivGenerator m;
    m.kind = EquivGenerator::Kind::M;
    m.param = random_time_function(rng) + var_t() * var_t();
    gens.push_back(m);
    EquivGenerator i;
    i.kind = EquivGenerator::Kind::I;
    i.param = random_time_function(rng) + sin(var_t());
    gens.push_back(i);
    for (const auto& g : gens) {
        ++rep.fixtures;
        GeneratorCheck c = equiv_generator_check(g, rng);
        rep.worst = std::max(rep.worst, c.worst);
        if (!c.ok)
            rep.fail(c.detail);
    }
    return rep;
}

} // namespace linsym
