#pragma once

// Numeric evaluation with closed-form surrogates, and randomized identity
// testing built on it.

#include "linsym/expr.hpp"

#include <complex>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace linsym {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Smooth test function with exact derivatives of every order:
/// c0 + slope*z_0 + sum_k c_k cos(<a_k, z> + b_k).
struct Surrogate {
    int arity = 0;
    Complex c0;
    double slope = 0.0;
    struct Wave {
        Complex c;
        std::vector<double> a;
        double b = 0.0;
    };
    std::vector<Wave> waves;

    Complex eval(const std::vector<double>& z, const std::vector<int>& deriv) const;
};

/// Draws a surrogate respecting the arity, codomain and shape of the symbol.
Surrogate draw_surrogate(const SymbolInfo& s, Rng& rng);

/// Thrown when an expression mentions a symbol with no surrogate.
class UnboundSymbol : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SurrogateBinding {
  public:
    /// Draws surrogates for every symbol of `exprs` not yet bound, in name order.
    void bind_missing(const std::vector<Expr>& exprs, Rng& rng);
    void bind(const std::string& name, Surrogate s) { table_[name] = std::move(s); }
    bool contains(const std::string& name) const { return table_.count(name) != 0; }
    const Surrogate& at(const std::string& name) const;

  private:
    std::map<std::string, Surrogate> table_;
};

struct SampleDomain {
    double t_lo = 0.3;
    double t_hi = 1.7;
    double x_lo = -2.0;
    double x_hi = 2.0;
};

struct SamplePoint {
    double t = 0.0;
    std::vector<double> x;
    /// Values of unconjugated jets; conjugated jets read the complex conjugate.
    std::map<std::vector<int>, Complex> jets;

    Complex jet(const VarId& v) const;
};

/// Draws t, x uniformly in the domain and every jet of `exprs` in the unit disc.
SamplePoint draw_point(int n, const std::vector<Expr>& exprs, const SampleDomain& dom, Rng& rng);

struct EvalResult {
    Complex value;
    /// Largest modulus over all visited subterms (scale for normalization).
    double scale = 0.0;
    /// A singular or non-finite intermediate value was met.
    bool unsafe = false;
};

EvalResult evaluate(const Expr& e, const SurrogateBinding& b, const SamplePoint& p);
Complex eval(const Expr& e, const SurrogateBinding& b, const SamplePoint& p);

struct ZeroTestOptions {
    int n = 2;
    int bindings = 5;
    int points = 100;
    double tol = 1e-8;
    int retries = 50;
    SampleDomain domain;
};

struct Witness {
    int binding = 0;
    int component = 0;
    double t = 0.0;
    std::vector<double> x;
    Complex value;
    double normalized = 0.0;
};

struct ZeroTestResult {
    bool zero = true;
    double max_normalized = 0.0;
    int rejected = 0;
    std::optional<Witness> witness;
};

/// Thrown when no safe sample point is found within the retry budget.
class SamplingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Tests all components for vanishing at `opt.points` points drawn for a
/// fixed binding. Unbound symbols are drawn from `rng`.
ZeroTestResult test_zero_with(const std::vector<Expr>& components, SurrogateBinding& binding,
                              const ZeroTestOptions& opt, Rng& rng);

/// Fresh bindings per trial; `opt.bindings` trials of `opt.points` points.
ZeroTestResult test_zero(const std::vector<Expr>& components, const ZeroTestOptions& opt, Rng& rng);
ZeroTestResult test_zero(const Expr& e, const ZeroTestOptions& opt, Rng& rng);

bool is_zero(const Expr& e, const ZeroTestOptions& opt, Rng& rng);
bool is_zero(const Expr& e, Rng& rng);

} // namespace linsym
