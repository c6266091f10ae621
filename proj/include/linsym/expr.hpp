#pragma once

// Immutable expression DAG over t, x_a, jet variables and function symbols.
//
// Nodes are built only through the smart constructors below, which apply a
// small fixed set of normalizations (flattening, constant folding, removal of
// neutral elements, Conj(Conj(e)) = e). There is no general simplifier:
// identities are decided numerically, see eval.hpp.

#include <boost/rational.hpp>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// C++20 rewrites a == b as b == a, which sends boost's mixed int/rational
// equality into infinite recursion. Exact overloads take priority.
namespace boost {
inline bool operator==(const rational<long long>& a, long long b)
{
    return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(long long b, const rational<long long>& a) { return a == b; }
inline bool operator==(const rational<long long>& a, int b) { return a == static_cast<long long>(b); }
inline bool operator==(int b, const rational<long long>& a) { return a == static_cast<long long>(b); }
inline bool operator!=(const rational<long long>& a, long long b) { return !(a == b); }
inline bool operator!=(long long b, const rational<long long>& a) { return !(a == b); }
inline bool operator!=(const rational<long long>& a, int b) { return !(a == b); }
inline bool operator!=(int b, const rational<long long>& a) { return !(a == b); }
} // namespace boost

namespace linsym {

using Rational = boost::rational<long long>;

/// Exact complex rational re + i*im.
struct CRational {
    Rational re{0};
    Rational im{0};

    CRational() = default;
    CRational(Rational r) : re(r) {}
    CRational(Rational r, Rational i) : re(r), im(i) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }
    bool is_real() const { return im == 0; }
    std::complex<double> to_complex() const;
};

CRational operator+(const CRational& a, const CRational& b);
CRational operator*(const CRational& a, const CRational& b);
CRational operator-(const CRational& a);
bool operator==(const CRational& a, const CRational& b);
CRational conj(const CRational& a);
/// Integer power; throws DomainError for 0^k with k < 0.
CRational pow(const CRational& a, long long k);

/// Raised for mathematically undefined constructions (complex base of an
/// absolute power, division by an exact zero, ...).
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Codomain { Real, Complex };

/// Hint for drawing surrogates; the symbolic layer ignores it.
enum class Shape {
    Any,        ///< generic trigonometric polynomial
    Positive,   ///< bounded below by a positive constant
    Increasing, ///< derivative bounded below by a positive constant (arity 1)
    Nonzero     ///< arity-0 only: modulus bounded away from zero
};

struct SymbolInfo {
    std::string name;
    int arity = 0;
    Codomain codomain = Codomain::Real;
    Shape shape = Shape::Any;
    /// Sampling range for real arity-0 symbols.
    double lo = -1.0;
    double hi = 1.0;
};

using FunctionSymbol = std::shared_ptr<const SymbolInfo>;

FunctionSymbol make_symbol(std::string name, int arity, Codomain codomain,
                           Shape shape = Shape::Any);
FunctionSymbol make_constant_symbol(std::string name, double lo, double hi);
/// A symbol whose name cannot clash with parsed identifiers.
FunctionSymbol fresh_symbol(const std::string& hint, int arity, Codomain codomain,
                            Shape shape = Shape::Any);

enum class VarType { T, X, Jet };

/// Independent variable. For X, `index` is 1-based. For Jet, `alpha` counts
/// derivatives over (t, x_1, .., x_n), trailing zeros removed.
struct VarId {
    VarType type = VarType::T;
    int index = 0;
    std::vector<int> alpha;
    bool conjugated = false;

    static VarId t() { return {VarType::T, 0, {}, false}; }
    static VarId x(int a) { return {VarType::X, a, {}, false}; }
    static VarId jet(std::vector<int> alpha, bool conjugated = false);

    /// Jet with one more derivative in direction d (0 = t, a = x_a).
    VarId raised(int d) const;
    /// The same variable with the conjugation flag flipped (no-op for t, x).
    VarId flipped() const;
    int t_order() const { return alpha.empty() ? 0 : alpha[0]; }
    int order() const;
};

bool operator==(const VarId& a, const VarId& b);
bool operator<(const VarId& a, const VarId& b);

enum class Kind { Const, Var, Func, Builtin, Inverse, Sum, Product, IntPow, AbsPow, Sign, Conj };

/// Closed-form elementary functions. Ln(u) means ln|u| for real u.
enum class BuiltinFn { Cos, Sin, Exp, Ln, Atan2, Pi };

class Node;

/// Shared handle to an immutable node.
class Expr {
  public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node* operator->() const { return node_.get(); }
    const Node& operator*() const { return *node_; }
    const Node* get() const { return node_.get(); }
    explicit operator bool() const { return node_ != nullptr; }

  private:
    std::shared_ptr<const Node> node_;
};

class Node {
  public:
    Kind kind = Kind::Const;
    CRational value;           // Const
    VarId var;                 // Var
    FunctionSymbol symbol;     // Func
    std::vector<int> deriv;    // Func: derivative orders per argument slot
    BuiltinFn fn = BuiltinFn::Pi;
    long long int_exp = 1;     // IntPow
    Rational abs_exp{1};       // AbsPow
    std::vector<Expr> args;    // children
    std::size_t hash = 0;
    bool real = false;         // value is real for all admissible inputs
};

// Leaves.
Expr constant(const CRational& c);
Expr constant(long long p, long long q = 1);
Expr imag_unit();
Expr var(const VarId& v);
Expr var_t();
Expr var_x(int a);
Expr jet(std::vector<int> alpha, bool conjugated = false);
Expr psi();

// Composite nodes.
Expr func(const FunctionSymbol& f, std::vector<Expr> args, std::vector<int> deriv = {});
Expr builtin(BuiltinFn fn, std::vector<Expr> args);
/// Value s with f(s) = arg, where f is an expression in t alone.
Expr inverse(const Expr& f, const Expr& arg);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow_int(const Expr& base, long long k);
Expr pow_abs(const Expr& base, const Rational& p);
Expr sign(const Expr& base);
Expr conj(const Expr& e);

Expr cos(const Expr& e);
Expr sin(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr atan2(const Expr& y, const Expr& x);
Expr pi();

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Rational& b);
Expr operator+(const Rational& a, const Expr& b);
Expr operator-(const Expr& a, const Rational& b);
Expr operator-(const Rational& a, const Expr& b);
Expr operator*(const Expr& a, const Rational& b);
Expr operator*(const Rational& a, const Expr& b);
Expr operator/(const Expr& a, const Rational& b);

/// Real and imaginary parts, built from Conj.
Expr real_part(const Expr& e);
Expr imag_part(const Expr& e);

bool is_const(const Expr& e);
bool is_const_zero(const Expr& e);
bool is_real(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

/// Variables occurring in e; jets below an odd number of Conj nodes are
/// reported with the conjugation flag flipped.
std::set<VarId> variables(const Expr& e);
std::set<VarId> jets(const Expr& e);
bool depends_on(const Expr& e, VarType type);
bool depends_on_x(const Expr& e);
/// Function symbols by name.
std::map<std::string, FunctionSymbol> symbols(const Expr& e);
std::size_t node_count(const Expr& e);

// Calculus.
Expr diff(const Expr& e, const VarId& v);
Expr diff_t(const Expr& e, int k = 1);
/// Total derivative; direction 0 is t, direction a is x_a.
Expr total_derivative(const Expr& e, int direction);
/// Simultaneous substitution of variables.
Expr subst(const Expr& e, const std::map<VarId, Expr>& repl);
Expr subst_t(const Expr& e, const Expr& value);
/// Replace an arity-0 or arity-1 function symbol by a closed form. For arity
/// one the body is an expression in t and derivative slots are honoured.
Expr subst_function(const Expr& e, const std::string& name, const Expr& body);

} // namespace linsym
