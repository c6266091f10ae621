#include "linsym/fields.hpp"

#include "linsym/json_io.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace linsym {

namespace {

Expr half(const Expr& e) { return Rational(1, 2) * e; }

Expr dot(const std::vector<Expr>& a, const std::vector<Expr>& b)
{
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < a.size(); ++i)
        terms.push_back(a[i] * b[i]);
    return sum(std::move(terms));
}

Expr x_squared(int n)
{
    std::vector<Expr> terms;
    for (int a = 1; a <= n; ++a)
        terms.push_back(pow_int(var_x(a), 2));
    return sum(std::move(terms));
}

std::vector<Expr> x_vector(int n)
{
    std::vector<Expr> x;
    for (int a = 1; a <= n; ++a)
        x.push_back(var_x(a));
    return x;
}

std::vector<Expr> diff_t_all(const std::vector<Expr>& v, int k = 1)
{
    std::vector<Expr> out;
    for (const Expr& e : v)
        out.push_back(diff_t(e, k));
    return out;
}

/// kappa applied to a vector: (kappa v)_a = sum_b kappa_ab v_b.
std::vector<Expr> kappa_times(const std::vector<std::vector<Expr>>& k, const std::vector<Expr>& v)
{
    std::vector<Expr> out;
    for (const auto& row : k)
        out.push_back(dot(row, v));
    return out;
}

/// Rotation part of the x-coefficients: d_c gets sum_a kappa_ac x_a.
std::vector<Expr> rotation_xi(const std::vector<std::vector<Expr>>& k, int n)
{
    std::vector<Expr> out;
    for (int c = 0; c < n; ++c) {
        std::vector<Expr> terms;
        for (int a = 0; a < n; ++a)
            terms.push_back(k[a][c] * var_x(a + 1));
        out.push_back(sum(std::move(terms)));
    }
    return out;
}

void same_dim(const GeneratorCoeffs& a, const GeneratorCoeffs& b)
{
    if (a.n != b.n)
        throw std::invalid_argument("generators of different dimension");
}

/// Action of the non-Z part of g on a Z coefficient zeta.
Expr z_action(const GeneratorCoeffs& g, const Expr& zeta)
{
    const int n = g.n;
    std::vector<Expr> grad;
    for (int a = 1; a <= n; ++a)
        grad.push_back(diff(zeta, VarId::x(a)));
    std::vector<Expr> xi = rotation_xi(g.kappa, n);
    Expr tau_t = diff_t(g.tau);
    for (int a = 0; a < n; ++a)
        xi[a] = xi[a] + half(tau_t) * var_x(a + 1) + g.chi[a];
    Expr i = imag_unit();
    Expr mult = i * Rational(1, 8) * diff_t(g.tau, 2) * x_squared(n) +
                i * half(dot(diff_t_all(g.chi), x_vector(n))) + g.rho + i * g.sigma;
    return g.tau * diff(zeta, VarId::t()) + dot(xi, grad) - mult * zeta;
}

} // namespace

GeneratorCoeffs GeneratorCoeffs::zero(int n)
{
    if (n < 1)
        throw std::invalid_argument("dimension must be positive");
    GeneratorCoeffs g;
    g.n = n;
    g.tau = constant(0);
    g.kappa.assign(n, std::vector<Expr>(n, constant(0)));
    g.chi.assign(n, constant(0));
    g.sigma = constant(0);
    g.rho = constant(0);
    return g;
}

GeneratorCoeffs gen_D(int n, const Expr& tau)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    g.tau = tau;
    return g;
}

GeneratorCoeffs gen_J(int n, int a, int b, const Expr& coeff)
{
    if (a < 1 || b > n || a >= b)
        throw std::invalid_argument("J_ab needs 1 <= a < b <= n");
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    g.kappa[a - 1][b - 1] = coeff;
    g.kappa[b - 1][a - 1] = -coeff;
    return g;
}

GeneratorCoeffs gen_P(std::vector<Expr> chi)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(static_cast<int>(chi.size()));
    g.chi = std::move(chi);
    return g;
}

GeneratorCoeffs gen_M(int n, const Expr& sigma)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    g.sigma = sigma;
    return g;
}

GeneratorCoeffs gen_I(int n, const Expr& rho)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    g.rho = rho;
    return g;
}

GeneratorCoeffs gen_Z(int n, const Expr& eta0)
{
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    g.eta0 = eta0;
    return g;
}

GeneratorCoeffs operator+(const GeneratorCoeffs& a, const GeneratorCoeffs& b)
{
    same_dim(a, b);
    GeneratorCoeffs g = GeneratorCoeffs::zero(a.n);
    g.tau = a.tau + b.tau;
    for (int i = 0; i < a.n; ++i) {
        g.chi[i] = a.chi[i] + b.chi[i];
        for (int j = 0; j < a.n; ++j)
            g.kappa[i][j] = a.kappa[i][j] + b.kappa[i][j];
    }
    g.sigma = a.sigma + b.sigma;
    g.rho = a.rho + b.rho;
    if (a.eta0 && b.eta0)
        g.eta0 = *a.eta0 + *b.eta0;
    else if (a.eta0)
        g.eta0 = a.eta0;
    else
        g.eta0 = b.eta0;
    return g;
}

GeneratorCoeffs operator*(const Expr& c, const GeneratorCoeffs& g)
{
    GeneratorCoeffs r = g;
    r.tau = c * g.tau;
    for (int i = 0; i < g.n; ++i) {
        r.chi[i] = c * g.chi[i];
        for (int j = 0; j < g.n; ++j)
            r.kappa[i][j] = c * g.kappa[i][j];
    }
    r.sigma = c * g.sigma;
    r.rho = c * g.rho;
    if (g.eta0)
        r.eta0 = c * *g.eta0;
    return r;
}

GeneratorCoeffs operator-(const GeneratorCoeffs& a, const GeneratorCoeffs& b)
{
    return a + constant(-1) * b;
}

void validate(const GeneratorCoeffs& g)
{
    const auto n = static_cast<std::size_t>(g.n);
    if (g.chi.size() != n || g.kappa.size() != n)
        throw std::invalid_argument("coefficient sizes disagree with n");
    auto t_only = [](const Expr& e, const char* what) {
        if (depends_on_x(e) || !jets(e).empty())
            throw std::invalid_argument(std::string(what) + " must depend on t only");
    };
    t_only(g.tau, "tau");
    t_only(g.sigma, "sigma");
    t_only(g.rho, "rho");
    for (const Expr& c : g.chi)
        t_only(c, "chi");
    for (std::size_t a = 0; a < n; ++a) {
        if (g.kappa[a].size() != n)
            throw std::invalid_argument("kappa must be n x n");
        for (std::size_t b = 0; b < n; ++b) {
            const Expr& k = g.kappa[a][b];
            if (!variables(k).empty())
                throw std::invalid_argument("kappa entries must be constants");
            if (!structurally_equal(k, -g.kappa[b][a]))
                throw std::invalid_argument("kappa must be skew-symmetric");
        }
    }
    if (g.eta0 && !jets(*g.eta0).empty())
        throw std::invalid_argument("eta0 must not depend on jets");
}

VectorField VectorField::zero(int n)
{
    VectorField f;
    f.n = n;
    f.xi_t = constant(0);
    f.xi.assign(n, constant(0));
    f.eta = constant(0);
    f.eta_star = constant(0);
    return f;
}

std::vector<Expr> VectorField::components() const
{
    std::vector<Expr> out{xi_t};
    out.insert(out.end(), xi.begin(), xi.end());
    out.push_back(eta);
    out.push_back(eta_star);
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b)
{
    if (a.n != b.n)
        throw std::invalid_argument("vector fields of different dimension");
    VectorField f = VectorField::zero(a.n);
    f.xi_t = a.xi_t - b.xi_t;
    for (int i = 0; i < a.n; ++i)
        f.xi[i] = a.xi[i] - b.xi[i];
    f.eta = a.eta - b.eta;
    f.eta_star = a.eta_star - b.eta_star;
    return f;
}

VectorField expand(const GeneratorCoeffs& g)
{
    const int n = g.n;
    VectorField f = VectorField::zero(n);
    f.xi_t = g.tau;
    Expr tau_t = diff_t(g.tau);
    std::vector<Expr> rot = rotation_xi(g.kappa, n);
    for (int a = 0; a < n; ++a)
        f.xi[a] = half(tau_t) * var_x(a + 1) + rot[a] + g.chi[a];
    Expr i = imag_unit();
    Expr mult = i * Rational(1, 8) * diff_t(g.tau, 2) * x_squared(n) +
                i * half(dot(diff_t_all(g.chi), x_vector(n))) + g.rho + i * g.sigma;
    f.eta = mult * psi();
    if (g.eta0)
        f.eta = f.eta + *g.eta0;
    f.eta_star = conj(f.eta);
    return f;
}

Expr apply(const VectorField& q, const Expr& f)
{
    std::vector<Expr> terms{q.xi_t * diff(f, VarId::t())};
    for (int a = 1; a <= q.n; ++a)
        terms.push_back(q.xi[a - 1] * diff(f, VarId::x(a)));
    terms.push_back(q.eta * diff(f, VarId::jet({})));
    terms.push_back(q.eta_star * diff(f, VarId::jet({}, true)));
    return sum(std::move(terms));
}

VectorField bracket_generic(const VectorField& f1, const VectorField& f2)
{
    if (f1.n != f2.n)
        throw std::invalid_argument("vector fields of different dimension");
    VectorField r = VectorField::zero(f1.n);
    r.xi_t = apply(f1, f2.xi_t) - apply(f2, f1.xi_t);
    for (int a = 0; a < f1.n; ++a)
        r.xi[a] = apply(f1, f2.xi[a]) - apply(f2, f1.xi[a]);
    r.eta = apply(f1, f2.eta) - apply(f2, f1.eta);
    r.eta_star = apply(f1, f2.eta_star) - apply(f2, f1.eta_star);
    return r;
}

GeneratorCoeffs bracket_structural(const GeneratorCoeffs& g1, const GeneratorCoeffs& g2)
{
    same_dim(g1, g2);
    const int n = g1.n;
    GeneratorCoeffs r = GeneratorCoeffs::zero(n);
    Expr t1 = g1.tau, t2 = g2.tau;
    Expr t1t = diff_t(t1), t2t = diff_t(t2);
    r.tau = t1 * t2t - t2 * t1t;

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<Expr> terms;
            for (int c = 0; c < n; ++c) {
                terms.push_back(g1.kappa[a][c] * g2.kappa[c][b]);
                terms.push_back(-(g2.kappa[a][c] * g1.kappa[c][b]));
            }
            r.kappa[a][b] = sum(std::move(terms));
        }

    std::vector<Expr> k1c2 = kappa_times(g1.kappa, g2.chi);
    std::vector<Expr> k2c1 = kappa_times(g2.kappa, g1.chi);
    std::vector<Expr> c1t = diff_t_all(g1.chi), c2t = diff_t_all(g2.chi);
    for (int a = 0; a < n; ++a)
        r.chi[a] = t1 * c2t[a] - half(t1t) * g2.chi[a] - (t2 * c1t[a] - half(t2t) * g1.chi[a]) +
                   k1c2[a] - k2c1[a];

    r.sigma = t1 * diff_t(g2.sigma) - t2 * diff_t(g1.sigma) +
              half(dot(g1.chi, c2t) - dot(g2.chi, c1t));
    r.rho = t1 * diff_t(g2.rho) - t2 * diff_t(g1.rho);

    if (g1.eta0 || g2.eta0) {
        Expr z = constant(0);
        if (g2.eta0)
            z = z + z_action(g1, *g2.eta0);
        if (g1.eta0)
            z = z - z_action(g2, *g1.eta0);
        r.eta0 = z;
    }
    return r;
}

CoeffSample sample_coeffs(const GeneratorCoeffs& g, const SurrogateBinding& b,
                          const std::vector<double>& ts)
{
    CoeffSample s;
    SamplePoint p;
    p.x.assign(g.n, 0.0);
    auto at = [&](const Expr& e, double t) {
        p.t = t;
        return eval(e, b, p).real();
    };
    for (double t : ts)
        s.tau.push_back(at(g.tau, t));
    for (int a = 0; a < g.n; ++a)
        for (int c = a + 1; c < g.n; ++c)
            s.kappa.push_back(at(g.kappa[a][c], ts.front()));
    for (int a = 0; a < g.n; ++a)
        for (double t : ts)
            s.chi.push_back(at(g.chi[a], t));
    for (double t : ts)
        s.sigma_rho.push_back(at(g.sigma, t));
    for (double t : ts)
        s.sigma_rho.push_back(at(g.rho, t));
    return s;
}

int numeric_rank(const std::vector<std::vector<double>>& rows, double rel_tol)
{
    if (rows.empty() || rows.front().empty())
        return 0;
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0))
            ++r;
    return r;
}

int rank_of_chi_block(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                      double rel_tol)
{
    if (gs.empty())
        return 0;
    const int n = gs.front().n;
    const auto k = static_cast<Eigen::Index>(gs.size());
    std::vector<Expr> all;
    for (const auto& g : gs) {
        all.push_back(g.tau);
        all.push_back(g.sigma);
        all.push_back(g.rho);
        all.insert(all.end(), g.chi.begin(), g.chi.end());
        for (const auto& row : g.kappa)
            all.insert(all.end(), row.begin(), row.end());
    }
    b.bind_missing(all, rng);
    std::uniform_real_distribution<double> ut(0.3, 1.7);
    std::vector<double> ts;
    for (Eigen::Index i = 0; i < 2 * k + 4; ++i)
        ts.push_back(ut(rng));

    std::vector<CoeffSample> samples;
    for (const auto& g : gs)
        samples.push_back(sample_coeffs(g, b, ts));
    const auto cols = static_cast<Eigen::Index>(samples.front().tau.size() + samples.front().kappa.size());
    // Combinations c with sum c_i (tau_i, kappa_i) = 0 span the left null space.
    Eigen::MatrixXd a(cols, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::Index r = 0;
        for (double v : samples[i].tau)
            a(r++, i) = v;
        for (double v : samples[i].kappa)
            a(r++, i) = v;
    }
    Eigen::MatrixXd null;
    if (a.norm() == 0.0) {
        null = Eigen::MatrixXd::Identity(k, k);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0))
                ++rank;
        null = svd.matrixV().rightCols(k - rank);
    }
    if (null.cols() == 0)
        return 0;

    int best = 0;
    SamplePoint p;
    p.x.assign(n, 0.0);
    for (int trial = 0; trial < 3; ++trial) {
        p.t = ut(rng);
        Eigen::MatrixXd chi(n, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (int c = 0; c < n; ++c)
                chi(c, i) = eval(gs[i].chi[c], b, p).real();
        Eigen::MatrixXd m = chi * null;
        std::vector<std::vector<double>> rows(n, std::vector<double>(m.cols()));
        for (int c = 0; c < n; ++c)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                rows[c][j] = m(c, j);
        // Scale relative to the raw chi values so that cancellation counts as zero.
        double scale = chi.norm();
        if (m.norm() <= rel_tol * (1.0 + scale))
            continue;
        best = std::max(best, numeric_rank(rows, rel_tol));
    }
    return best;
}

// ---------------------------------------------------------------------------
// JSON

Expr expr_from_json(const Json& j, const ParseContext& ctx)
{
    if (j.is_null())
        return constant(0);
    if (j.is_number_integer())
        return constant(j.get<long long>());
    if (j.is_number())
        return parse(j.dump(), ctx);
    if (j.is_string())
        return parse(j.get<std::string>(), ctx);
    throw SchemaError("expected an expression string or number, got " + j.dump());
}

Json expr_to_json(const Expr& e) { return print(e); }

GeneratorCoeffs field_from_json(const Json& j, const ParseContext& ctx)
{
    if (!j.is_object())
        throw SchemaError("field spec must be an object");
    const int n = ctx.n;
    GeneratorCoeffs g = GeneratorCoeffs::zero(n);
    if (j.contains("tau"))
        g.tau = expr_from_json(j["tau"], ctx);
    if (j.contains("kappa") && !j["kappa"].is_null()) {
        const Json& k = j["kappa"];
        if (!k.is_array() || k.size() != static_cast<std::size_t>(n))
            throw SchemaError("kappa must be an n x n list");
        for (int a = 0; a < n; ++a) {
            if (!k[a].is_array() || k[a].size() != static_cast<std::size_t>(n))
                throw SchemaError("kappa must be an n x n list");
            for (int b = 0; b < n; ++b)
                g.kappa[a][b] = expr_from_json(k[a][b], ctx);
        }
    }
    if (j.contains("J") && !j["J"].is_null()) {
        // Shorthand for the coefficient of J_12.
        if (n < 2)
            throw SchemaError("J needs n >= 2");
        Expr c = expr_from_json(j["J"], ctx);
        g.kappa[0][1] = g.kappa[0][1] + c;
        g.kappa[1][0] = g.kappa[1][0] - c;
    }
    if (j.contains("chi") && !j["chi"].is_null()) {
        const Json& c = j["chi"];
        if (!c.is_array() || c.size() != static_cast<std::size_t>(n))
            throw SchemaError("chi must be a list of n expressions");
        for (int a = 0; a < n; ++a)
            g.chi[a] = expr_from_json(c[a], ctx);
    }
    if (j.contains("sigma"))
        g.sigma = expr_from_json(j["sigma"], ctx);
    if (j.contains("rho"))
        g.rho = expr_from_json(j["rho"], ctx);
    if (j.contains("eta0") && !j["eta0"].is_null())
        g.eta0 = expr_from_json(j["eta0"], ctx);
    try {
        validate(g);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return g;
}

Json field_to_json(const GeneratorCoeffs& g)
{
    Json j;
    j["tau"] = expr_to_json(g.tau);
    Json k = Json::array();
    for (const auto& row : g.kappa) {
        Json r = Json::array();
        for (const Expr& e : row)
            r.push_back(expr_to_json(e));
        k.push_back(r);
    }
    j["kappa"] = k;
    Json c = Json::array();
    for (const Expr& e : g.chi)
        c.push_back(expr_to_json(e));
    j["chi"] = c;
    j["sigma"] = expr_to_json(g.sigma);
    j["rho"] = expr_to_json(g.rho);
    j["eta0"] = g.eta0 ? expr_to_json(*g.eta0) : Json();
    return j;
}

Declarations declarations_from_json(const Json& j) { return Declarations::from_json_text(j.dump()); }

GeneratorCoeffs field_from_json_text(const std::string& text, const ParseContext& ctx)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(e.what());
    }
    return field_from_json(j, ctx);
}

std::string field_to_json_text(const GeneratorCoeffs& g) { return field_to_json(g).dump(2); }

} // namespace linsym
