#pragma once

// Point transformations between equations of the class, their action on
// potentials and generators, and the equivalence algebra.
//
// A transformation with parameters (T, O, X, Sigma, Upsilon) maps
//   t~ = T(t),  x~ = |T_t|^(1/2) O x + X(t),
//   psi~ = exp(i/8 T_tt/|T_t| |x|^2 + i/2 eps X_t . O x / |T_t|^(1/2) + i Sigma + Upsilon) psi^
// where eps = sgn T_t and psi^ is psi for eps = 1 and psi* for eps = -1.

#include "linsym/conditions.hpp"
#include "linsym/eval.hpp"
#include "linsym/expr.hpp"
#include "linsym/fields.hpp"
#include "linsym/parse.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linsym {

struct EquivTransformation {
    int n = 2;
    Expr T;                             ///< function of t
    std::vector<std::vector<Expr>> O;   ///< constant orthogonal matrix
    std::vector<Expr> X;                ///< functions of t
    Expr Sigma;                         ///< real function of t
    Expr Upsilon;                       ///< real function of t
    std::optional<Expr> Lambda;         ///< solution of the source equation; carried, not applied

    static EquivTransformation identity(int n);
};

/// Elementary transformations: all parameters trivial except one.
EquivTransformation elem_D(int n, const Expr& T);
EquivTransformation elem_J(const std::vector<std::vector<Expr>>& O);
EquivTransformation elem_P(const std::vector<Expr>& X);
EquivTransformation elem_M(int n, const Expr& Sigma);
EquivTransformation elem_I(int n, const Expr& Upsilon);

/// Rotation matrix with the given cosine and sine (n = 2).
std::vector<std::vector<Expr>> rotation2(const Expr& c, const Expr& s);

/// Structural checks: sizes, parameters depend on t only, O constant and
/// orthogonal (exactly for rational entries, else to 1e-12). Throws
/// std::invalid_argument.
void validate(const EquivTransformation& tr);

/// Checks that T_t keeps one sign over the sample points of the domain.
bool sign_is_constant(const EquivTransformation& tr, SurrogateBinding& b, Rng& rng, int points = 50);

/// eps = sgn T_t as an expression.
Expr epsilon(const EquivTransformation& tr);

/// Target potential written in the source variables (t, x).
Expr target_potential_in_source(const Expr& V, const EquivTransformation& tr);

/// Target potential in the target variables.
Potential act_on_potential(const Potential& V, const EquivTransformation& tr);

/// Source variables in terms of target ones: t = T^-1(t~) and
/// x = |T_t|^(-1/2) O^T (x~ - X) evaluated at t = T^-1(t~).
Expr to_target_variables(const Expr& e, const EquivTransformation& tr);

/// Apply `first`, then `second`.
EquivTransformation compose_maps(const EquivTransformation& first, const EquivTransformation& second);
EquivTransformation invert_map(const EquivTransformation& tr);

struct AdmissibleTransformation {
    Potential source;
    EquivTransformation map;
    Potential target;
};

AdmissibleTransformation make_admissible(const Potential& V, const EquivTransformation& tr);

class NotComposable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Throws NotComposable if t1.target and t2.source differ numerically.
AdmissibleTransformation compose(const AdmissibleTransformation& t1, const AdmissibleTransformation& t2,
                                 Rng& rng);
AdmissibleTransformation invert(const AdmissibleTransformation& t);

/// Pushforward of a canonical generator by an elementary transformation in
/// closed form. Throws std::invalid_argument for a non-elementary one.
GeneratorCoeffs pushforward(const GeneratorCoeffs& g, const EquivTransformation& elementary);

/// Pushforward of an arbitrary vector field on (t, x, psi, psi*) computed
/// from the definition Q(T) d_t~ + Q(X^a) d_a~ + Q(Psi) d_psi~ + c.c.
VectorField pushforward_field(const VectorField& q, const EquivTransformation& tr);

/// Generators of the equivalence algebra.
struct EquivGenerator {
    enum class Kind { D, J, P, M, I };
    Kind kind = Kind::M;
    int n = 2;
    Expr param;              ///< tau, sigma or rho
    std::vector<Expr> chi;   ///< for P
    int a = 1, b = 2;        ///< for J (1-based)

    std::string name() const;
    /// Closed-form d_V coefficient in (t, x) with V the value `v`.
    Expr v_coefficient(const Expr& v) const;
    /// Projection to the space of variables.
    GeneratorCoeffs projection() const;
    /// One-parameter family of transformations generated by this element.
    EquivTransformation family(const Rational& delta) const;
};

struct GeneratorCheck {
    bool ok = true;
    double worst = 0.0; ///< worst relative deviation over the components
    std::string detail;
};

/// Central finite differences (step 1e-5) of the family against the closed
/// form of every component (t, x, psi and V), relative tolerance `tol`.
GeneratorCheck equiv_generator_check(const EquivGenerator& gen, Rng& rng, int points = 40,
                                     double tol = 1e-4);

/// Upsilon_t + n T_tt / (4 T_t) vanishes.
bool is_real_admissible(const EquivTransformation& tr, int n, Rng& rng);

enum class Tristate { False, True, Unknown };
std::string to_string(Tristate s);

/// Whether V = rho(t)|x|^2 + rho_a(t) x_a + rho0(t) + i rho1(t). Unknown if
/// an arbitrary function of x occurs.
Tristate is_free_reducible(const Potential& V, Rng& rng);

/// Transformation spec in JSON:
/// {"T": e, "O": [[e,..],..], "X": [e,..], "Sigma": e, "Upsilon": e};
/// absent entries are trivial.
EquivTransformation transformation_from_json_text(const std::string& text, const ParseContext& ctx);

struct LemmaReport {
    bool ok = true;
    std::vector<std::string> lines;
};

/// Numeric fixtures for the second-shift lemma and the reduction of
/// P(chi) + sigma M + rho I to P(h cos t, h sin t) + rho I.
LemmaReport lemma_fixtures(Rng& rng, int draws = 5);

} // namespace linsym
