#include "linsym/equiv.hpp"

#include "linsym/json_io.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace linsym {

namespace {

Expr half(const Expr& e) { return e * Rational(1, 2); }

Expr x_squared(int n)
{
    std::vector<Expr> terms;
    for (int a = 1; a <= n; ++a)
        terms.push_back(pow_int(var_x(a), 2));
    return sum(std::move(terms));
}

Expr dot(const std::vector<Expr>& u, const std::vector<Expr>& v)
{
    std::vector<Expr> terms;
    for (std::size_t a = 0; a < u.size(); ++a)
        terms.push_back(u[a] * v[a]);
    return sum(std::move(terms));
}

std::vector<Expr> d_t(const std::vector<Expr>& v, int k = 1)
{
    std::vector<Expr> out;
    for (const auto& e : v)
        out.push_back(diff_t(e, k));
    return out;
}

std::vector<Expr> scale(const Expr& c, const std::vector<Expr>& v)
{
    std::vector<Expr> out;
    for (const auto& e : v)
        out.push_back(c * e);
    return out;
}

std::vector<Expr> add(const std::vector<Expr>& u, const std::vector<Expr>& v)
{
    std::vector<Expr> out;
    for (std::size_t a = 0; a < u.size(); ++a)
        out.push_back(u[a] + v[a]);
    return out;
}

using Matrix = std::vector<std::vector<Expr>>;

std::vector<Expr> mat_vec(const Matrix& m, const std::vector<Expr>& v)
{
    std::vector<Expr> out;
    for (const auto& row : m)
        out.push_back(dot(row, v));
    return out;
}

Matrix transpose(const Matrix& m)
{
    const std::size_t n = m.size();
    Matrix r(n, std::vector<Expr>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            r[a][b] = m[b][a];
    return r;
}

Matrix mat_mul(const Matrix& p, const Matrix& q)
{
    const std::size_t n = p.size();
    Matrix r(n, std::vector<Expr>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            std::vector<Expr> terms;
            for (std::size_t c = 0; c < n; ++c)
                terms.push_back(p[a][c] * q[c][b]);
            r[a][b] = sum(std::move(terms));
        }
    return r;
}

std::vector<Expr> x_vector(int n)
{
    std::vector<Expr> v;
    for (int a = 1; a <= n; ++a)
        v.push_back(var_x(a));
    return v;
}

std::vector<Expr> subst_t_all(const std::vector<Expr>& v, const Expr& s)
{
    std::vector<Expr> out;
    for (const auto& e : v)
        out.push_back(subst_t(e, s));
    return out;
}

bool is_identity_matrix(const Matrix& O)
{
    for (std::size_t a = 0; a < O.size(); ++a)
        for (std::size_t b = 0; b < O.size(); ++b) {
            const Expr& e = O[a][b];
            if (!is_const(e) || !(e->value == CRational(Rational(a == b ? 1 : 0))))
                return false;
        }
    return true;
}

bool all_zero(const std::vector<Expr>& v)
{
    for (const auto& e : v)
        if (!is_const_zero(e))
            return false;
    return true;
}

/// T^-1 as an expression in t; closed form when T is affine.
Expr inverse_of(const Expr& T)
{
    if (structurally_equal(T, var_t()))
        return var_t();
    Expr Tt = diff_t(T);
    if (is_const(Tt) && !is_const_zero(Tt) && is_const_zero(diff_t(Tt)))
        return (var_t() - subst_t(T, constant(0))) / Tt;
    return inverse(T, var_t());
}

/// |T_t|^p.
Expr abs_tt(const EquivTransformation& tr, const Rational& p) { return pow_abs(diff_t(tr.T), p); }

/// Exponent of the psi factor in source variables.
Expr phase(const EquivTransformation& tr)
{
    const int n = tr.n;
    Expr i = imag_unit();
    Expr Ttt = diff_t(tr.T, 2);
    Expr quad = i * Rational(1, 8) * Ttt * abs_tt(tr, -1) * x_squared(n);
    Expr lin = half(i) * epsilon(tr) * abs_tt(tr, Rational(-1, 2)) *
               dot(d_t(tr.X), mat_vec(tr.O, x_vector(n)));
    return quad + lin + i * tr.Sigma + tr.Upsilon;
}

/// e^ with eps: (1 + eps)/2 e + (1 - eps)/2 conj(e).
Expr hat(const Expr& e, const Expr& eps)
{
    if (is_const(eps)) {
        if (eps->value == CRational(Rational(1)))
            return e;
        return conj(e);
    }
    return half(1 + eps) * e + half(1 - eps) * conj(e);
}

std::map<VarId, Expr> x_to_target(const EquivTransformation& tr)
{
    // x = |T_t|^(-1/2) O^T (x~ - X), still in the source time.
    std::map<VarId, Expr> m;
    std::vector<Expr> shifted;
    for (int a = 0; a < tr.n; ++a)
        shifted.push_back(var_x(a + 1) - tr.X[a]);
    std::vector<Expr> back = mat_vec(transpose(tr.O), shifted);
    Expr s = abs_tt(tr, Rational(-1, 2));
    for (int a = 0; a < tr.n; ++a)
        m[VarId::x(a + 1)] = s * back[a];
    return m;
}

/// Sigma of the elementary shift: the group is parametrized by
/// Sigma = X.X_t / 4 + Sigma-bar, and P(X) has Sigma-bar = 0.
Expr shift_sigma(const std::vector<Expr>& X) { return Rational(1, 4) * dot(X, d_t(X)); }

std::string elementary_kind(const EquivTransformation& tr)
{
    std::vector<std::string> kinds;
    if (!structurally_equal(tr.T, var_t()))
        kinds.push_back("D");
    if (!is_identity_matrix(tr.O))
        kinds.push_back("J");
    const bool shift = !all_zero(tr.X);
    if (shift)
        kinds.push_back("P");
    if (shift ? !structurally_equal(tr.Sigma, shift_sigma(tr.X)) : !is_const_zero(tr.Sigma))
        kinds.push_back("M");
    if (!is_const_zero(tr.Upsilon))
        kinds.push_back("I");
    if (kinds.size() > 1)
        throw std::invalid_argument("transformation is not elementary");
    return kinds.empty() ? "" : kinds.front();
}

ZeroTestOptions quick_options(int n)
{
    ZeroTestOptions opt;
    opt.n = n;
    opt.bindings = 2;
    opt.points = 30;
    return opt;
}

} // namespace

// ---------------------------------------------------------------------------
// Construction

EquivTransformation EquivTransformation::identity(int n)
{
    EquivTransformation tr;
    tr.n = n;
    tr.T = var_t();
    tr.O.assign(n, std::vector<Expr>(n, constant(0)));
    for (int a = 0; a < n; ++a)
        tr.O[a][a] = constant(1);
    tr.X.assign(n, constant(0));
    tr.Sigma = constant(0);
    tr.Upsilon = constant(0);
    return tr;
}

EquivTransformation elem_D(int n, const Expr& T)
{
    auto tr = EquivTransformation::identity(n);
    tr.T = T;
    return tr;
}

EquivTransformation elem_J(const std::vector<std::vector<Expr>>& O)
{
    auto tr = EquivTransformation::identity(static_cast<int>(O.size()));
    tr.O = O;
    return tr;
}

EquivTransformation elem_P(const std::vector<Expr>& X)
{
    auto tr = EquivTransformation::identity(static_cast<int>(X.size()));
    tr.X = X;
    tr.Sigma = shift_sigma(X);
    return tr;
}

EquivTransformation elem_M(int n, const Expr& Sigma)
{
    auto tr = EquivTransformation::identity(n);
    tr.Sigma = Sigma;
    return tr;
}

EquivTransformation elem_I(int n, const Expr& Upsilon)
{
    auto tr = EquivTransformation::identity(n);
    tr.Upsilon = Upsilon;
    return tr;
}

std::vector<std::vector<Expr>> rotation2(const Expr& c, const Expr& s) { return {{c, -s}, {s, c}}; }

void validate(const EquivTransformation& tr)
{
    const int n = tr.n;
    if (n < 1 || static_cast<int>(tr.O.size()) != n || static_cast<int>(tr.X.size()) != n)
        throw std::invalid_argument("transformation parameters do not match n");
    auto t_only = [](const Expr& e, const char* what) {
        if (depends_on_x(e) || !jets(e).empty())
            throw std::invalid_argument(std::string(what) + " must depend on t only");
    };
    t_only(tr.T, "T");
    t_only(tr.Sigma, "Sigma");
    t_only(tr.Upsilon, "Upsilon");
    for (const auto& e : tr.X)
        t_only(e, "X");
    if (!is_real(tr.T) || !is_real(tr.Sigma) || !is_real(tr.Upsilon))
        throw std::invalid_argument("T, Sigma and Upsilon must be real");
    bool exact = true;
    for (const auto& row : tr.O) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("O must be n x n");
        for (const auto& e : row) {
            if (!variables(e).empty() || !symbols(e).empty())
                throw std::invalid_argument("O must be constant");
            exact = exact && is_const(e) && e->value.is_real();
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (exact) {
                CRational s;
                for (int c = 0; c < n; ++c)
                    s = s + tr.O[a][c]->value * tr.O[b][c]->value;
                if (!(s == CRational(Rational(a == b ? 1 : 0))))
                    throw std::invalid_argument("O is not orthogonal");
            } else {
                SurrogateBinding none;
                SamplePoint p;
                p.x.assign(n, 0.0);
                Complex s = 0.0;
                for (int c = 0; c < n; ++c)
                    s += eval(tr.O[a][c], none, p) * eval(tr.O[b][c], none, p);
                if (std::abs(s - (a == b ? 1.0 : 0.0)) > 1e-12)
                    throw std::invalid_argument("O is not orthogonal");
            }
        }
}

bool sign_is_constant(const EquivTransformation& tr, SurrogateBinding& b, Rng& rng, int points)
{
    Expr Tt = diff_t(tr.T);
    b.bind_missing({Tt}, rng);
    SampleDomain dom;
    int sign = 0;
    for (int k = 0; k < points; ++k) {
        SamplePoint p = draw_point(tr.n, {Tt}, dom, rng);
        double v = eval(Tt, b, p).real();
        int s = v > 0 ? 1 : v < 0 ? -1 : 0;
        if (s == 0 || (sign != 0 && s != sign))
            return false;
        sign = s;
    }
    return true;
}

Expr epsilon(const EquivTransformation& tr) { return sign(diff_t(tr.T)); }

// ---------------------------------------------------------------------------
// Action on potentials

Expr target_potential_in_source(const Expr& V, const EquivTransformation& tr)
{
    const int n = tr.n;
    Expr i = imag_unit();
    Expr eps = epsilon(tr);
    Expr Tt = diff_t(tr.T), Ttt = diff_t(tr.T, 2), Tttt = diff_t(tr.T, 3);
    std::vector<Expr> Xt = d_t(tr.X);

    Expr t1 = hat(V, eps) * abs_tt(tr, -1);
    Expr t2 = eps * (2 * Tttt * Tt - 3 * pow_int(Ttt, 2)) * pow_int(Tt, -3) * Rational(1, 16) * x_squared(n);
    std::vector<Expr> w;
    for (const auto& e : Xt)
        w.push_back(diff_t(e / Tt));
    Expr t3 = half(eps) * abs_tt(tr, Rational(-1, 2)) * dot(w, mat_vec(tr.O, x_vector(n)));
    Expr t4 = (diff_t(tr.Sigma) - i * diff_t(tr.Upsilon)) / Tt;
    Expr t5 = -(dot(Xt, Xt) + i * constant(n) * Ttt) * pow_int(Tt, -2) * Rational(1, 4);
    return t1 + t2 + t3 + t4 + t5;
}

Expr to_target_variables(const Expr& e, const EquivTransformation& tr)
{
    Expr r = subst(e, x_to_target(tr));
    return subst_t(r, inverse_of(tr.T));
}

Potential act_on_potential(const Potential& V, const EquivTransformation& tr)
{
    if (V.n != tr.n)
        throw std::invalid_argument("potential and transformation dimensions differ");
    return {tr.n, to_target_variables(target_potential_in_source(V.expr, tr), tr)};
}

// ---------------------------------------------------------------------------
// Groupoid operations

EquivTransformation compose_maps(const EquivTransformation& f, const EquivTransformation& s)
{
    if (f.n != s.n)
        throw std::invalid_argument("dimensions differ");
    const int n = f.n;
    EquivTransformation r;
    r.n = n;
    r.T = subst_t(s.T, f.T);
    r.O = mat_mul(s.O, f.O);
    Expr sTt = diff_t(s.T);
    std::vector<Expr> OX = mat_vec(s.O, f.X);
    r.X = add(scale(subst_t(pow_abs(sTt, Rational(1, 2)), f.T), OX), subst_t_all(s.X, f.T));
    Expr eps2 = subst_t(sign(sTt), f.T);
    Expr quad = subst_t(diff_t(s.T, 2) * pow_abs(sTt, -1), f.T) * Rational(1, 8) * dot(f.X, f.X);
    Expr lin = half(eps2) * dot(subst_t_all(scale(pow_abs(sTt, Rational(-1, 2)), d_t(s.X)), f.T), OX);
    r.Sigma = quad + lin + subst_t(s.Sigma, f.T) + eps2 * f.Sigma;
    r.Upsilon = subst_t(s.Upsilon, f.T) + f.Upsilon;
    return r;
}

EquivTransformation invert_map(const EquivTransformation& tr)
{
    const int n = tr.n;
    Expr S = inverse_of(tr.T);
    Expr Tt = diff_t(tr.T), eps = epsilon(tr);
    std::vector<Expr> OtX = mat_vec(transpose(tr.O), tr.X);
    // Inverse parameters as functions of the source time t, then t -> S.
    std::vector<Expr> Y = scale(-abs_tt(tr, Rational(-1, 2)), OtX);
    Expr quad = Rational(-1, 8) * eps * diff_t(tr.T, 2) * pow_int(Tt, -2) * dot(tr.X, tr.X);
    Expr lin = half(eps) * abs_tt(tr, Rational(1, 2)) / Tt * dot(d_t(Y), OtX);
    Expr R = quad + lin + eps * tr.Sigma;

    EquivTransformation r;
    r.n = n;
    r.T = S;
    r.O = transpose(tr.O);
    r.X = subst_t_all(Y, S);
    r.Sigma = subst_t(-R, S);
    r.Upsilon = subst_t(-tr.Upsilon, S);
    return r;
}

AdmissibleTransformation make_admissible(const Potential& V, const EquivTransformation& tr)
{
    return {V, tr, act_on_potential(V, tr)};
}

AdmissibleTransformation compose(const AdmissibleTransformation& t1, const AdmissibleTransformation& t2,
                                 Rng& rng)
{
    ZeroTestResult z = test_zero(t1.target.expr - t2.source.expr, quick_options(t1.target.n), rng);
    if (!z.zero)
        throw NotComposable("target of the first transformation differs from the source of the second");
    return {t1.source, compose_maps(t1.map, t2.map), t2.target};
}

AdmissibleTransformation invert(const AdmissibleTransformation& t)
{
    return {t.target, invert_map(t.map), t.source};
}

// ---------------------------------------------------------------------------
// Pushforwards

GeneratorCoeffs pushforward(const GeneratorCoeffs& g, const EquivTransformation& e)
{
    if (g.n != e.n)
        throw std::invalid_argument("dimensions differ");
    if (g.eta0)
        throw std::invalid_argument("solution shifts are not transported");
    const int n = g.n;
    const std::string kind = elementary_kind(e);
    GeneratorCoeffs r = g;
    if (kind == "D") {
        Expr S = inverse_of(e.T);
        Expr Tt = diff_t(e.T);
        r.tau = subst_t(Tt * g.tau, S);
        r.chi = subst_t_all(scale(pow_abs(Tt, Rational(1, 2)), g.chi), S);
        r.sigma = subst_t(epsilon(e) * g.sigma, S);
        r.rho = subst_t(g.rho, S);
    } else if (kind == "J") {
        r.chi = mat_vec(e.O, g.chi);
        r.kappa = mat_mul(mat_mul(e.O, g.kappa), transpose(e.O));
    } else if (kind == "P") {
        const auto& X = e.X;
        std::vector<Expr> Xt = d_t(X), Xtt = d_t(X, 2);
        Expr tau_t = diff_t(g.tau), tau_tt = diff_t(g.tau, 2);
        std::vector<Expr> kX = mat_vec(transpose(g.kappa), X);
        r.chi = add(add(g.chi, add(scale(g.tau, Xt), scale(-half(tau_t), X))), scale(constant(-1), kX));
        Expr from_d = Rational(1, 8) * tau_tt * dot(X, X) - Rational(1, 4) * tau_t * dot(X, Xt) -
                      Rational(1, 4) * g.tau * (dot(X, Xtt) - dot(Xt, Xt));
        std::vector<Expr> rot;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                rot.push_back(g.kappa[a][b] * X[a] * Xt[b]);
        Expr from_j = -half(sum(rot));
        Expr from_p = half(dot(g.chi, Xt) - dot(d_t(g.chi), X));
        r.sigma = g.sigma + from_d + from_j + from_p;
    } else if (kind == "M") {
        r.sigma = g.sigma + g.tau * diff_t(e.Sigma);
    } else if (kind == "I") {
        r.rho = g.rho + g.tau * diff_t(e.Upsilon);
    }
    return r;
}

VectorField pushforward_field(const VectorField& q, const EquivTransformation& tr)
{
    const int n = tr.n;
    Expr eps = epsilon(tr);
    std::vector<Expr> xt = add(scale(abs_tt(tr, Rational(1, 2)), mat_vec(tr.O, x_vector(n))), tr.X);
    Expr ph = phase(tr);
    Expr Psi = exp(ph) * hat(psi(), eps);

    VectorField src = VectorField::zero(n);
    src.xi_t = apply(q, tr.T);
    for (int a = 0; a < n; ++a)
        src.xi[a] = apply(q, xt[a]);
    src.eta = apply(q, Psi);

    // psi in terms of psi~: psi^ = exp(-phase) psi~.
    std::map<VarId, Expr> xmap = x_to_target(tr);
    Expr back = subst(hat(exp(-ph) * psi(), eps), xmap);
    std::map<VarId, Expr> m = xmap;
    m[VarId::jet({})] = back;
    m[VarId::jet({}, true)] = conj(back);
    Expr S = inverse_of(tr.T);
    auto to_target = [&](const Expr& e) { return subst_t(subst(e, m), S); };

    VectorField r = VectorField::zero(n);
    r.xi_t = to_target(src.xi_t);
    for (int a = 0; a < n; ++a)
        r.xi[a] = to_target(src.xi[a]);
    r.eta = to_target(src.eta);
    r.eta_star = conj(r.eta);
    return r;
}

// ---------------------------------------------------------------------------
// Equivalence algebra

std::string EquivGenerator::name() const
{
    switch (kind) {
    case Kind::D:
        return "D^(" + print(param) + ")";
    case Kind::J:
        return "J^_" + std::to_string(a) + std::to_string(b);
    case Kind::P: {
        std::string s = "P^(";
        for (std::size_t k = 0; k < chi.size(); ++k)
            s += (k ? ", " : "") + print(chi[k]);
        return s + ")";
    }
    case Kind::M:
        return "M^(" + print(param) + ")";
    case Kind::I:
        return "I^(" + print(param) + ")";
    }
    return "?";
}

Expr EquivGenerator::v_coefficient(const Expr& v) const
{
    Expr i = imag_unit();
    switch (kind) {
    case Kind::D:
        return -(diff_t(param) * v - Rational(1, 8) * diff_t(param, 3) * x_squared(n) +
                 i * Rational(n, 4) * diff_t(param, 2));
    case Kind::J:
        return constant(0);
    case Kind::P:
        return half(dot(d_t(chi, 2), x_vector(n)));
    case Kind::M:
        return diff_t(param);
    case Kind::I:
        return -i * diff_t(param);
    }
    return constant(0);
}

GeneratorCoeffs EquivGenerator::projection() const
{
    switch (kind) {
    case Kind::D:
        return gen_D(n, param);
    case Kind::J:
        return gen_J(n, a, b);
    case Kind::P:
        return gen_P(chi);
    case Kind::M:
        return gen_M(n, param);
    case Kind::I:
        return gen_I(n, param);
    }
    return GeneratorCoeffs::zero(n);
}

EquivTransformation EquivGenerator::family(const Rational& delta) const
{
    Expr d = constant(CRational(delta));
    switch (kind) {
    case Kind::D:
        return elem_D(n, var_t() + d * param);
    case Kind::J: {
        auto tr = EquivTransformation::identity(n);
        tr.O[a - 1][a - 1] = cos(d);
        tr.O[b - 1][b - 1] = cos(d);
        tr.O[b - 1][a - 1] = sin(d);
        tr.O[a - 1][b - 1] = -sin(d);
        return tr;
    }
    case Kind::P: {
        return elem_P(scale(d, chi));
    }
    case Kind::M:
        return elem_M(n, d * param);
    case Kind::I:
        return elem_I(n, d * param);
    }
    return EquivTransformation::identity(n);
}

GeneratorCheck equiv_generator_check(const EquivGenerator& gen, Rng& rng, int points, double tol)
{
    const int n = gen.n;
    const Rational h(1, 100000);
    Expr v = func(make_symbol("V", 0, Codomain::Complex), {});

    auto components = [&](const EquivTransformation& tr) {
        std::vector<Expr> c{tr.T};
        std::vector<Expr> xt = add(scale(abs_tt(tr, Rational(1, 2)), mat_vec(tr.O, x_vector(n))), tr.X);
        c.insert(c.end(), xt.begin(), xt.end());
        c.push_back(exp(phase(tr)) * psi());
        c.push_back(target_potential_in_source(v, tr));
        return c;
    };
    std::vector<Expr> plus = components(gen.family(h));
    std::vector<Expr> minus = components(gen.family(-h));
    VectorField q = expand(gen.projection());
    std::vector<Expr> exact{q.xi_t};
    exact.insert(exact.end(), q.xi.begin(), q.xi.end());
    exact.push_back(q.eta);
    exact.push_back(gen.v_coefficient(v));

    std::vector<Expr> all = plus;
    all.insert(all.end(), minus.begin(), minus.end());
    all.insert(all.end(), exact.begin(), exact.end());
    SurrogateBinding b;
    b.bind_missing(all, rng);
    SampleDomain dom;
    const char* names[] = {"t", "x", "psi", "V"};

    GeneratorCheck out;
    int done = 0;
    for (int attempt = 0; done < points && attempt < points * 20; ++attempt) {
        SamplePoint p = draw_point(n, all, dom, rng);
        bool unsafe = false;
        std::vector<Complex> fd, ex;
        for (std::size_t k = 0; k < exact.size(); ++k) {
            EvalResult ep = evaluate(plus[k], b, p), em = evaluate(minus[k], b, p);
            EvalResult ee = evaluate(exact[k], b, p);
            unsafe = unsafe || ep.unsafe || em.unsafe || ee.unsafe;
            fd.push_back((ep.value - em.value) / (2.0 * 1e-5));
            ex.push_back(ee.value);
        }
        if (unsafe)
            continue;
        ++done;
        for (std::size_t k = 0; k < exact.size(); ++k) {
            double dev = std::abs(fd[k] - ex[k]) / (1.0 + std::abs(ex[k]));
            if (dev > out.worst)
                out.worst = dev;
            if (dev > tol && out.ok) {
                out.ok = false;
                std::ostringstream os;
                std::size_t slot = k == 0 ? 0 : k <= static_cast<std::size_t>(n) ? 1 : k == exact.size() - 2 ? 2 : 3;
                os << gen.name() << ": component " << names[slot] << " at t=" << p.t
                   << " finite difference " << fd[k] << " closed form " << ex[k];
                out.detail = os.str();
            }
        }
    }
    if (done < points) {
        out.ok = false;
        out.detail = gen.name() + ": no safe sample points";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Real subclass and reducibility

bool is_real_admissible(const EquivTransformation& tr, int n, Rng& rng)
{
    Expr e = diff_t(tr.Upsilon) + constant(n) * diff_t(tr.T, 2) / (4 * diff_t(tr.T));
    return test_zero(e, quick_options(tr.n), rng).zero;
}

std::string to_string(Tristate s)
{
    return s == Tristate::True ? "true" : s == Tristate::False ? "false" : "unknown";
}

namespace {

bool has_function_of_x(const Expr& e)
{
    if (e->kind == Kind::Func)
        for (const auto& a : e->args)
            if (depends_on_x(a))
                return true;
    for (const auto& a : e->args)
        if (has_function_of_x(a))
            return true;
    return false;
}

} // namespace

Tristate is_free_reducible(const Potential& V, Rng& rng)
{
    if (has_function_of_x(V.expr))
        return Tristate::Unknown;
    const int n = V.n;
    std::vector<Expr> conds;
    for (int a = 1; a <= n; ++a) {
        Expr Va = diff(V.expr, VarId::x(a));
        conds.push_back(imag_part(Va));
        for (int b = a; b <= n; ++b) {
            Expr Vab = diff(Va, VarId::x(b));
            conds.push_back(a == b ? Vab - diff(diff(V.expr, VarId::x(1)), VarId::x(1)) : Vab);
            for (int c = b; c <= n; ++c)
                conds.push_back(diff(Vab, VarId::x(c)));
        }
    }
    ZeroTestOptions opt = quick_options(n);
    return test_zero(conds, opt, rng).zero ? Tristate::True : Tristate::False;
}

// ---------------------------------------------------------------------------
// JSON

EquivTransformation transformation_from_json_text(const std::string& text, const ParseContext& ctx)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& ex) {
        throw SchemaError(std::string("transformation spec: ") + ex.what());
    }
    if (!j.is_object())
        throw SchemaError("transformation spec must be an object");
    const int n = ctx.n;
    auto tr = EquivTransformation::identity(n);
    for (const auto& [key, val] : j.items()) {
        if (key == "T")
            tr.T = expr_from_json(val, ctx);
        else if (key == "Sigma")
            tr.Sigma = expr_from_json(val, ctx);
        else if (key == "Upsilon")
            tr.Upsilon = expr_from_json(val, ctx);
        else if (key == "Lambda")
            tr.Lambda = expr_from_json(val, ctx);
        else if (key == "X") {
            if (!val.is_array() || static_cast<int>(val.size()) != n)
                throw SchemaError("X must list n expressions");
            for (int a = 0; a < n; ++a)
                tr.X[a] = expr_from_json(val[a], ctx);
        } else if (key == "O") {
            if (!val.is_array() || static_cast<int>(val.size()) != n)
                throw SchemaError("O must be an n x n list");
            for (int a = 0; a < n; ++a) {
                if (!val[a].is_array() || static_cast<int>(val[a].size()) != n)
                    throw SchemaError("O must be an n x n list");
                for (int b = 0; b < n; ++b)
                    tr.O[a][b] = expr_from_json(val[a][b], ctx);
            }
        } else {
            throw SchemaError("unknown key in transformation spec: " + key);
        }
    }
    try {
        validate(tr);
    } catch (const std::invalid_argument& ex) {
        throw SchemaError(ex.what());
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Lemma fixtures

LemmaReport lemma_fixtures(Rng& rng, int draws)
{
    LemmaReport rep;
    const int n = 2;
    Expr t = var_t();
    ZeroTestOptions opt;
    opt.n = n;
    opt.bindings = draws;
    opt.points = 40;
    auto zero = [&](const Expr& e) { return test_zero(e, opt, rng).zero; };
    auto line = [&](bool ok, const std::string& s) {
        rep.ok = rep.ok && ok;
        rep.lines.push_back((ok ? "ok   " : "FAIL ") + s);
    };

    // Second shift: V = U(t, x2) - i rho1_t x1 with rho1 = R', rho2 = t R' - R.
    FunctionSymbol U = make_symbol("U", 2, Codomain::Complex);
    FunctionSymbol R = make_symbol("R", 1, Codomain::Real);
    Expr r = func(R, {t});
    Expr rho1 = diff_t(r);
    Potential V{n, func(U, {t, var_x(2)}) - imag_unit() * diff_t(rho1) * var_x(1)};
    GeneratorCoeffs g1 = gen_P({constant(1), constant(0)}) + gen_I(n, rho1);
    GeneratorCoeffs g2 = gen_P({t, constant(0)}) + gen_I(n, t * rho1 - r);
    line(zero(classifying_residual(V, g1)), "second shift: P(1,0) + rho1 I is a symmetry");
    line(zero(classifying_residual(V, g2)), "second shift: P(t,0) + (int t rho1_t) I is a symmetry");
    Potential V1{n, func(U, {t, var_x(2)}) - imag_unit() * var_x(1)};
    line(zero(classifying_residual(V1, gen_P({t, constant(0)}) + gen_I(n, t * t * Rational(1, 2)))),
         "second shift: rho1 = t gives P(t,0) + t^2/2 I");

    // Reduction of P(chi) + sigma M + rho I with chi = h (cos th, sin th).
    FunctionSymbol H = make_symbol("h", 1, Codomain::Real, Shape::Positive);
    FunctionSymbol Th = make_symbol("th", 1, Codomain::Real, Shape::Increasing);
    FunctionSymbol F = make_symbol("F", 1, Codomain::Real);
    Expr h = func(H, {t}), th = func(Th, {t});
    GeneratorCoeffs g = gen_P({h * cos(th), h * sin(th)}) +
                        gen_M(n, Rational(-1, 2) * func(F, {th}, {1}) * diff_t(th) * h * h) +
                        gen_I(n, r);
    EquivTransformation e1 = elem_D(n, th);
    GeneratorCoeffs s1 = pushforward(g, e1);
    VectorField diff1 = pushforward_field(expand(g), e1) - expand(s1);
    line(test_zero(diff1.components(), opt, rng).zero, "reduction: closed-form D-pushforward matches the definition");
    line(zero(s1.chi[0] * sin(t) - s1.chi[1] * cos(t)), "reduction: after D_*(th) chi is parallel to (cos t, sin t)");
    EquivTransformation e2 = elem_P(scale(func(F, {t}), s1.chi));
    GeneratorCoeffs s2 = pushforward(s1, e2);
    VectorField diff2 = pushforward_field(expand(s1), e2) - expand(s2);
    line(test_zero(diff2.components(), opt, rng).zero, "reduction: closed-form P-pushforward matches the definition");
    line(zero(s2.sigma), "reduction: sigma vanishes after P_*(F chi~)");
    line(zero(s2.tau) && zero(s2.chi[0] * sin(t) - s2.chi[1] * cos(t)),
         "reduction: image is P(h~ cos t, h~ sin t) + rho~ I");
    line(!zero(s2.chi[0] * cos(t) + s2.chi[1] * sin(t)), "reduction: h~ is nonzero");

    GeneratorCoeffs plain = gen_P({cos(t), sin(t)});
    GeneratorCoeffs same = pushforward(plain, EquivTransformation::identity(n));
    VectorField d0 = expand(same) - expand(plain);
    line(test_zero(d0.components(), opt, rng).zero, "reduction: P(cos t, sin t) is fixed by the identity");
    return rep;
}

} // namespace linsym
