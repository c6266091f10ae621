#pragma once

// Randomized property checks for the equivalence module, shared by the unit
// tests and the acceptance binary.

#include "linsym/cases.hpp"
#include "linsym/equiv.hpp"

#include <string>
#include <vector>

namespace linsym {

/// Real function of t: small rational combinations of 1, t, t^2, sin t and
/// the arbitrary functions f1, f2.
Expr random_time_function(Rng& rng);

/// T with T_t of fixed sign on the whole line; `allow_reversal` admits T_t < 0.
Expr random_time_map(Rng& rng, bool allow_reversal);

/// Rational orthogonal 2 x 2 matrix (rotations and reflections).
std::vector<std::vector<Expr>> random_orthogonal2(Rng& rng);

EquivTransformation random_transformation(Rng& rng, bool allow_reversal = true);

/// One of D, J, P, M, I with random parameters; `kind` in 0..4 or -1 for random.
EquivTransformation random_elementary(Rng& rng, int kind = -1);

GeneratorCoeffs random_generator_coeffs(Rng& rng);

struct PropertyReport {
    bool ok = true;
    int fixtures = 0;
    int rejected = 0; ///< deliberate negatives that were correctly rejected
    double worst = 0.0;
    std::vector<std::string> failures;

    void fail(const std::string& s)
    {
        ok = false;
        failures.push_back(s);
    }
};

/// Structural bracket against the generic commutator on `pairs` random
/// pairs (some with eta0), antisymmetry and the Jacobi identity on `triples`.
PropertyReport check_bracket_oracle(int pairs, int triples, Rng& rng);

/// For `pairs` (V, g) pairs, the second-prolongation residual vanishes iff
/// the classifying residual does. Every fourth pair is a deliberate
/// non-symmetry; `rejected` counts those rejected by both formulations.
PropertyReport check_prolongation_oracle(int pairs, Rng& rng);

/// Invariant tuples of every table case satisfy the restrictions, the
/// (P, M, I)-block has dimension at most 6 and the free equation reaches
/// the bound n(n + 3)/2 + 5 = 10.
PropertyReport check_dimension_facts(Rng& rng);

/// Identity, inverse, associativity and functoriality of the action on
/// potentials for `pairs` random transformation pairs.
PropertyReport check_groupoid_laws(int pairs, Rng& rng);

/// Closed-form pushforwards against the definition for every elementary kind.
PropertyReport check_pushforward_formulas(int fixtures, Rng& rng);

/// Symmetries of table entries stay symmetries of the transformed potential.
PropertyReport check_equivariance(int fixtures, Rng& rng);

/// Real potentials stay real under real-admissible transformations; also
/// checks that a non-admissible Upsilon is detected.
PropertyReport check_real_subclass(int fixtures, Rng& rng);

/// The five generator families of the equivalence algebra.
PropertyReport check_equivalence_algebra(Rng& rng);

} // namespace linsym
