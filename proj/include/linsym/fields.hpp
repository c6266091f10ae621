#pragma once

// Lie-symmetry vector fields of linear Schroedinger equations in canonical
// form D(tau) + sum kappa_ab J_ab + P(chi) + sigma M + rho I + Z(eta0), and
// general first-order operators on (t, x, psi, psi*).

#include "linsym/eval.hpp"
#include "linsym/expr.hpp"
#include "linsym/parse.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linsym {

/// Canonical coefficients. tau, chi, sigma, rho are real functions of t;
/// kappa is a constant skew-symmetric matrix, stored in full, where kappa[a][b]
/// multiplies J_ab = x_a d_b - x_b d_a (indices 0-based here).
struct GeneratorCoeffs {
    int n = 2;
    Expr tau;
    std::vector<std::vector<Expr>> kappa;
    std::vector<Expr> chi;
    Expr sigma;
    Expr rho;
    std::optional<Expr> eta0;

    static GeneratorCoeffs zero(int n);
};

GeneratorCoeffs gen_D(int n, const Expr& tau);
/// J_ab with 1-based a < b, times `coeff`.
GeneratorCoeffs gen_J(int n, int a, int b, const Expr& coeff = constant(1));
GeneratorCoeffs gen_P(std::vector<Expr> chi);
GeneratorCoeffs gen_M(int n, const Expr& sigma = constant(1));
GeneratorCoeffs gen_I(int n, const Expr& rho = constant(1));
GeneratorCoeffs gen_Z(int n, const Expr& eta0);

GeneratorCoeffs operator+(const GeneratorCoeffs& a, const GeneratorCoeffs& b);
GeneratorCoeffs operator-(const GeneratorCoeffs& a, const GeneratorCoeffs& b);
GeneratorCoeffs operator*(const Expr& c, const GeneratorCoeffs& g);

/// Throws std::invalid_argument if a real coefficient depends on x or jets,
/// kappa is not skew or sizes disagree with n.
void validate(const GeneratorCoeffs& g);

/// Q = xi_t d_t + xi^a d_a + eta d_psi + eta_star d_psi*.
struct VectorField {
    int n = 2;
    Expr xi_t;
    std::vector<Expr> xi;
    Expr eta;
    Expr eta_star;

    static VectorField zero(int n);
    /// All coefficient expressions in a fixed order (t, x_1..x_n, psi, psi*).
    std::vector<Expr> components() const;
};

VectorField operator-(const VectorField& a, const VectorField& b);

VectorField expand(const GeneratorCoeffs& g);
/// Q(F): the derivation applied to a function of (t, x, psi, psi*).
Expr apply(const VectorField& q, const Expr& f);
GeneratorCoeffs bracket_structural(const GeneratorCoeffs& g1, const GeneratorCoeffs& g2);
VectorField bracket_generic(const VectorField& f1, const VectorField& f2);

/// Real samples of the canonical coefficients of a generator at the times
/// `ts`: tau(ts), kappa_{a<b}, chi^1(ts), .., chi^n(ts), sigma(ts), rho(ts).
struct CoeffSample {
    std::vector<double> tau;
    std::vector<double> kappa;
    std::vector<double> chi;
    std::vector<double> sigma_rho;
};

CoeffSample sample_coeffs(const GeneratorCoeffs& g, const SurrogateBinding& b,
                          const std::vector<double>& ts);

/// Numeric rank with singular values below rel_tol * max treated as zero.
/// Rows are the vectors.
int numeric_rank(const std::vector<std::vector<double>>& rows, double rel_tol = 1e-8);

/// Pointwise rank of the chi tuples over the part of the span with zero tau
/// and kappa. Symbols are bound from `b`, missing ones drawn from `rng`.
int rank_of_chi_block(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                      double rel_tol = 1e-8);

/// Field spec in JSON:
/// {"tau": e, "kappa": [[e,..],..], "chi": [e,..], "sigma": e, "rho": e, "eta0": e|null}
/// where e is an expression string or a number; absent entries are zero.
/// "J": e adds e * J_12.
GeneratorCoeffs field_from_json_text(const std::string& text, const ParseContext& ctx);
std::string field_to_json_text(const GeneratorCoeffs& g);

} // namespace linsym
