#pragma once

// Determining equations of Lie symmetries for i psi_t + psi_aa + V psi = 0,
// invariant integers of symmetry algebras, and the kernel check.

#include "linsym/eval.hpp"
#include "linsym/expr.hpp"
#include "linsym/fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linsym {

/// A potential V(t, x_1..x_n); must not contain jets.
struct Potential {
    int n = 2;
    Expr expr;
};

/// Left-hand side of the classifying condition; zero iff the canonical part
/// of g is a symmetry of V. eta0 is ignored.
Expr classifying_residual(const Potential& V, const GeneratorCoeffs& g);

/// i eta0_t + eta0_aa + V eta0.
Expr eta0_residual(const Potential& V, const Expr& eta0);

/// Invariance condition of the equation under the second prolongation of f,
/// restricted to solutions: every jet with a t-derivative is eliminated.
Expr prolonged_residual(const Potential& V, const VectorField& f);

/// Replaces jets containing t-derivatives using psi_t = i psi_aa + i V psi
/// and its conjugate.
Expr eliminate_time_jets(const Potential& V, const Expr& e);

struct InvariantTuple {
    int k0 = 0;
    int k1 = 0;
    int k2 = 0;
    int k3 = 0;
    int r0 = 0;

    int dim() const { return k0 + k1 + k2 + k3; }
    std::string str() const;
};

bool operator==(const InvariantTuple& a, const InvariantTuple& b);

/// The restrictions on invariant tuples at n = 2: (k2, r0) != (1, 1),
/// k3 != 2 unless k2 = r0 = 0, dim <= 10 and k0 + k1 <= 6.
/// Returns a description of the first violated restriction.
std::optional<std::string> tuple_restriction_violation(const InvariantTuple& t);

class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct InvariantOptions {
    double rank_tol = 1e-8;
    double closure_tol = 1e-8;
    int times = 0; ///< sample times; 0 picks 2 * (generators + 2)
};

struct SpanReport {
    InvariantTuple tuple;
    int dim = 0;
    bool closed = true;
    double worst_closure = 0.0;
    std::string closure_witness; ///< pair of generator indices failing closure
};

/// Samples the coefficients of the span of gs (with symbols bound from `b`)
/// and returns ranks, closure status and invariant integers.
SpanReport analyze_span(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                        const InvariantOptions& opt = {});

/// As analyze_span, but throws InvariantError if the span is not closed
/// under brackets or lacks M or I.
InvariantTuple invariants(const std::vector<GeneratorCoeffs>& gs, SurrogateBinding& b, Rng& rng,
                          const InvariantOptions& opt = {});

struct KernelReport {
    bool ok = true;
    std::vector<std::string> lines;
};

/// M and I must leave every random potential invariant; D(1), D(t), J,
/// P(1,0), P(t,0) and Z(1) must each fail for some of them.
KernelReport kernel_check(int potentials, Rng& rng);

} // namespace linsym
