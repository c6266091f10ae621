#include "linsym/conditions.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace linsym {

namespace {

Expr x_squared(int n)
{
    std::vector<Expr> terms;
    for (int a = 1; a <= n; ++a)
        terms.push_back(pow_int(var_x(a), 2));
    return sum(std::move(terms));
}

void check_dims(const Potential& V, int n)
{
    if (V.n != n)
        throw std::invalid_argument("dimension of potential and generator differ");
    if (!jets(V.expr).empty())
        throw std::invalid_argument("potential must not contain jets");
}

std::vector<int> lowered_t(const VarId& j)
{
    std::vector<int> a = j.alpha;
    a[0] -= 1;
    return a;
}

Expr jet_expr(const VarId& v) { return var(v); }

} // namespace

Expr classifying_residual(const Potential& V, const GeneratorCoeffs& g)
{
    check_dims(V, g.n);
    const int n = g.n;
    VectorField f = expand(g);
    std::vector<Expr> terms;
    terms.push_back(g.tau * diff(V.expr, VarId::t()));
    for (int a = 1; a <= n; ++a)
        terms.push_back(f.xi[a - 1] * diff(V.expr, VarId::x(a)));
    terms.push_back(diff_t(g.tau) * V.expr);
    terms.push_back(-Rational(1, 8) * diff_t(g.tau, 3) * x_squared(n));
    for (int a = 1; a <= n; ++a)
        terms.push_back(-Rational(1, 2) * diff_t(g.chi[a - 1], 2) * var_x(a));
    terms.push_back(-diff_t(g.sigma));
    terms.push_back(imag_unit() * diff_t(g.rho));
    terms.push_back(imag_unit() * Rational(n, 4) * diff_t(g.tau, 2));
    return sum(std::move(terms));
}

Expr eta0_residual(const Potential& V, const Expr& eta0)
{
    std::vector<Expr> terms{imag_unit() * diff(eta0, VarId::t())};
    for (int a = 1; a <= V.n; ++a)
        terms.push_back(diff(diff(eta0, VarId::x(a)), VarId::x(a)));
    terms.push_back(V.expr * eta0);
    return sum(std::move(terms));
}

Expr eliminate_time_jets(const Potential& V, const Expr& e)
{
    const int n = V.n;
    // psi_t on solutions.
    std::vector<Expr> rhs_terms;
    for (int a = 1; a <= n; ++a) {
        std::vector<int> alpha(n + 1, 0);
        alpha[a] = 2;
        rhs_terms.push_back(imag_unit() * jet(alpha));
    }
    rhs_terms.push_back(imag_unit() * V.expr * psi());
    const Expr psi_t = sum(std::move(rhs_terms));

    std::map<VarId, Expr> memo;
    std::function<Expr(const VarId&)> reduce = [&](const VarId& j) -> Expr {
        if (j.t_order() == 0)
            return jet_expr(j);
        auto it = memo.find(j);
        if (it != memo.end())
            return it->second;
        Expr out;
        if (j.conjugated) {
            out = conj(reduce(j.flipped()));
        } else {
            std::vector<int> beta = lowered_t(j);
            beta.resize(n + 1, 0);
            Expr r = psi_t;
            for (int d = 0; d <= n; ++d)
                for (int k = 0; k < beta[d]; ++k)
                    r = total_derivative(r, d);
            std::map<VarId, Expr> inner;
            for (const VarId& v : jets(r)) {
                if (v.t_order() == 0)
                    continue;
                inner[v] = reduce(v);
                inner[v.flipped()] = reduce(v.flipped());
            }
            out = inner.empty() ? r : subst(r, inner);
        }
        memo[j] = out;
        return out;
    };

    std::map<VarId, Expr> repl;
    for (const VarId& v : jets(e)) {
        if (v.t_order() == 0)
            continue;
        repl[v] = reduce(v);
        repl[v.flipped()] = reduce(v.flipped());
    }
    return repl.empty() ? e : subst(e, repl);
}

Expr prolonged_residual(const Potential& V, const VectorField& f)
{
    check_dims(V, f.n);
    const int n = f.n;
    auto J = [&](std::vector<int> alpha) { return jet(std::move(alpha)); };
    auto unit = [&](int d) {
        std::vector<int> a(n + 1, 0);
        a[d] += 1;
        return a;
    };
    auto add = [](std::vector<int> a, int d) {
        a[d] += 1;
        return a;
    };

    // Characteristic W = eta - tau psi_t - xi^a psi_a.
    std::vector<Expr> w{f.eta, -(f.xi_t * J(unit(0)))};
    for (int a = 1; a <= n; ++a)
        w.push_back(-(f.xi[a - 1] * J(unit(a))));
    Expr W = sum(std::move(w));

    std::vector<Expr> eta_t{total_derivative(W, 0), f.xi_t * J(add(unit(0), 0))};
    for (int a = 1; a <= n; ++a)
        eta_t.push_back(f.xi[a - 1] * J(add(unit(0), a)));

    std::vector<Expr> lap;
    for (int a = 1; a <= n; ++a) {
        lap.push_back(total_derivative(total_derivative(W, a), a));
        lap.push_back(f.xi_t * J(add(add(unit(0), a), a)));
        for (int b = 1; b <= n; ++b)
            lap.push_back(f.xi[b - 1] * J(add(add(unit(b), a), a)));
    }

    std::vector<Expr> v_action{f.xi_t * diff(V.expr, VarId::t())};
    for (int a = 1; a <= n; ++a)
        v_action.push_back(f.xi[a - 1] * diff(V.expr, VarId::x(a)));

    Expr r = imag_unit() * sum(std::move(eta_t)) + sum(std::move(lap)) +
             sum(std::move(v_action)) * psi() + V.expr * f.eta;
    return eliminate_time_jets(V, r);
}

// ---------------------------------------------------------------------------
// Invariant integers

std::string InvariantTuple::str() const
{
    std::ostringstream s;
    s << "(" << k0 << "," << k1 << "," << k2 << "," << k3 << "," << r0 << ")";
    return s.str();
}

bool operator==(const InvariantTuple& a, const InvariantTuple& b)
{
    return a.k0 == b.k0 && a.k1 == b.k1 && a.k2 == b.k2 && a.k3 == b.k3 && a.r0 == b.r0;
}

std::optional<std::string> tuple_restriction_violation(const InvariantTuple& t)
{
    if (t.k2 == 1 && t.r0 == 1)
        return "k2 = r0 = 1";
    if (t.k3 == 2 && !(t.k2 == 0 && t.r0 == 0))
        return "k3 = 2 with (k2, r0) != (0, 0)";
    if (t.dim() > 10)
        return "dimension exceeds 10";
    if (t.k0 + t.k1 > 6)
        return "(P, M, I)-part exceeds 6";
    if (t.k2 > 1)
        return "k2 exceeds 1";
    return std::nullopt;
}

namespace {

struct Layout {
    int m = 0;     // sample times
    int kappa = 0; // strict upper entries
    int n = 0;
    int tau_end() const { return m; }
    int kappa_end() const { return m + kappa; }
    int chi_end() const { return m + kappa + n * m; }
    int total() const { return m + kappa + n * m + 2 * m; }
};

Eigen::VectorXd flatten(const CoeffSample& s)
{
    std::vector<double> v;
    v.insert(v.end(), s.tau.begin(), s.tau.end());
    v.insert(v.end(), s.kappa.begin(), s.kappa.end());
    v.insert(v.end(), s.chi.begin(), s.chi.end());
    v.insert(v.end(), s.sigma_rho.begin(), s.sigma_rho.end());
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int rank_of(const Eigen::MatrixXd& m, double tol)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0))
            ++r;
    return r;
}

/// Relative least-squares residual of v against the columns of a.
double span_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& v)
{
    double scale = std::max(1.0, std::max(v.norm(), a.colwise().norm().maxCoeff()));
    if (a.cols() == 0)
        return v.norm() / scale;
    Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(v);
    return (a * c - v).norm() / scale;
}

} // namespace

SpanReport analyze_span(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                        const InvariantOptions& opt)
{
    SpanReport rep;
    if (gs.empty())
        return rep;
    const int n = gs.front().n;
    const auto k = static_cast<Eigen::Index>(gs.size());
    std::vector<Expr> all;
    for (const auto& g : gs) {
        if (g.n != n)
            throw std::invalid_argument("generators of different dimension");
        all.push_back(g.tau);
        all.push_back(g.sigma);
        all.push_back(g.rho);
        all.insert(all.end(), g.chi.begin(), g.chi.end());
        for (const auto& row : g.kappa)
            all.insert(all.end(), row.begin(), row.end());
    }
    b.bind_missing(all, rng);

    Layout lay;
    lay.n = n;
    lay.m = opt.times > 0 ? opt.times : static_cast<int>(2 * (k + 2));
    lay.kappa = n * (n - 1) / 2;
    std::uniform_real_distribution<double> ut(0.3, 1.7);
    std::vector<double> ts;
    for (int i = 0; i < lay.m; ++i)
        ts.push_back(ut(rng));

    Eigen::MatrixXd a(lay.total(), k);
    for (Eigen::Index i = 0; i < k; ++i)
        a.col(i) = flatten(sample_coeffs(gs[i], b, ts));

    auto block = [&](int end) -> Eigen::MatrixXd { return a.topRows(end).transpose(); };
    const int d = rank_of(a.transpose(), opt.rank_tol);
    const int r_tkc = rank_of(block(lay.chi_end()), opt.rank_tol);
    const int r_tk = rank_of(block(lay.kappa_end()), opt.rank_tol);
    const int r_t = rank_of(block(lay.tau_end()), opt.rank_tol);
    rep.dim = d;
    rep.tuple.k0 = d - r_tkc;
    rep.tuple.k1 = d - r_tk - rep.tuple.k0;
    rep.tuple.k2 = d - r_t - rep.tuple.k1 - rep.tuple.k0;
    rep.tuple.k3 = r_t;
    rep.tuple.r0 = rank_of_chi_block(gs, b, rng, opt.rank_tol);

    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j) {
            GeneratorCoeffs br = bracket_structural(gs[i], gs[j]);
            double r = span_residual(a, flatten(sample_coeffs(br, b, ts)));
            if (r > rep.worst_closure)
                rep.worst_closure = r;
            if (r > opt.closure_tol && rep.closed) {
                rep.closed = false;
                rep.closure_witness = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            }
        }
    return rep;
}

InvariantTuple invariants(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                          const InvariantOptions& opt)
{
    if (gs.empty())
        throw InvariantError("empty span lacks M and I");
    SpanReport rep = analyze_span(gs, b, rng, opt);
    if (!rep.closed)
        throw InvariantError("span not closed under brackets at generators " + rep.closure_witness);
    // Membership of M and I.
    const int n = gs.front().n;
    std::vector<GeneratorCoeffs> with_m = gs, with_i = gs;
    with_m.push_back(gen_M(n));
    with_i.push_back(gen_I(n));
    if (analyze_span(with_m, b, rng, opt).dim != rep.dim)
        throw InvariantError("span does not contain M");
    if (analyze_span(with_i, b, rng, opt).dim != rep.dim)
        throw InvariantError("span does not contain I");
    return rep.tuple;
}

// ---------------------------------------------------------------------------
// Kernel

KernelReport kernel_check(int potentials, Rng& rng)
{
    KernelReport rep;
    const int n = 2;
    FunctionSymbol W = make_symbol("W", 3, Codomain::Complex);
    FunctionSymbol f = make_symbol("f", 1, Codomain::Real);
    std::vector<Potential> vs;
    for (int k = 0; k < potentials; ++k) {
        Expr base = func(W, {var_t(), var_x(1), var_x(2)});
        if (k % 2 == 1)
            base = base + imag_unit() * func(f, {var_t()}) * var_x(1) * var_x(2);
        vs.push_back({n, base});
    }
    struct Named {
        std::string name;
        GeneratorCoeffs g;
        bool kernel;
    };
    std::vector<Named> list{{"M", gen_M(n), true},
                            {"I", gen_I(n), true},
                            {"D(1)", gen_D(n, constant(1)), false},
                            {"D(t)", gen_D(n, var_t()), false},
                            {"D(t^2)", gen_D(n, pow_int(var_t(), 2)), false},
                            {"J", gen_J(n, 1, 2), false},
                            {"P(1,0)", gen_P({constant(1), constant(0)}), false},
                            {"P(t,0)", gen_P({var_t(), constant(0)}), false},
                            {"P(0,1)", gen_P({constant(0), constant(1)}), false},
                            {"tM", gen_M(n, var_t()), false},
                            {"tI", gen_I(n, var_t()), false}};
    ZeroTestOptions opt;
    opt.bindings = 1;
    opt.points = 50;
    for (const auto& item : list) {
        int zero_count = 0;
        for (const auto& V : vs)
            if (test_zero(classifying_residual(V, item.g), opt, rng).zero)
                ++zero_count;
        bool ok = item.kernel ? zero_count == potentials : zero_count < potentials;
        rep.ok = rep.ok && ok;
        rep.lines.push_back(item.name + ": invariant for " + std::to_string(zero_count) + "/" +
                            std::to_string(potentials) + " random potentials" +
                            (ok ? "" : "  <-- unexpected"));
    }
    return rep;
}

} // namespace linsym
