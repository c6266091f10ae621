#include "linsym/expr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace linsym {

// ---------------------------------------------------------------------------
// CRational

std::complex<double> CRational::to_complex() const
{
    auto d = [](const Rational& r) {
        return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
    };
    return {d(re), d(im)};
}

CRational operator+(const CRational& a, const CRational& b) { return {a.re + b.re, a.im + b.im}; }

CRational operator*(const CRational& a, const CRational& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CRational operator-(const CRational& a) { return {-a.re, -a.im}; }

bool operator==(const CRational& a, const CRational& b) { return a.re == b.re && a.im == b.im; }

CRational conj(const CRational& a) { return {a.re, -a.im}; }

CRational pow(const CRational& a, long long k)
{
    CRational base = a;
    if (k < 0) {
        Rational den = a.re * a.re + a.im * a.im;
        if (den == 0)
            throw DomainError("negative power of exact zero");
        base = CRational(a.re / den, -a.im / den);
        k = -k;
    }
    CRational out(1);
    while (k > 0) {
        if (k & 1)
            out = out * base;
        base = base * base;
        k >>= 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Symbols and variables

FunctionSymbol make_symbol(std::string name, int arity, Codomain codomain, Shape shape)
{
    if (arity < 0)
        throw std::invalid_argument("negative arity for symbol " + name);
    auto s = std::make_shared<SymbolInfo>();
    s->name = std::move(name);
    s->arity = arity;
    s->codomain = codomain;
    s->shape = shape;
    return s;
}

FunctionSymbol make_constant_symbol(std::string name, double lo, double hi)
{
    auto s = std::make_shared<SymbolInfo>();
    s->name = std::move(name);
    s->arity = 0;
    s->codomain = Codomain::Real;
    s->lo = lo;
    s->hi = hi;
    return s;
}

FunctionSymbol fresh_symbol(const std::string& hint, int arity, Codomain codomain, Shape shape)
{
    static std::atomic<long> counter{0};
    return make_symbol("$" + hint + std::to_string(counter++), arity, codomain, shape);
}

namespace {
void trim(std::vector<int>& alpha)
{
    while (!alpha.empty() && alpha.back() == 0)
        alpha.pop_back();
}
} // namespace

VarId VarId::jet(std::vector<int> alpha, bool conjugated)
{
    for (int a : alpha)
        if (a < 0)
            throw std::invalid_argument("negative jet multi-index entry");
    trim(alpha);
    return {VarType::Jet, 0, std::move(alpha), conjugated};
}

VarId VarId::raised(int d) const
{
    VarId out = *this;
    if (static_cast<int>(out.alpha.size()) <= d)
        out.alpha.resize(d + 1, 0);
    out.alpha[d] += 1;
    return out;
}

VarId VarId::flipped() const
{
    VarId out = *this;
    if (type == VarType::Jet)
        out.conjugated = !out.conjugated;
    return out;
}

int VarId::order() const
{
    int s = 0;
    for (int a : alpha)
        s += a;
    return s;
}

bool operator==(const VarId& a, const VarId& b)
{
    return a.type == b.type && a.index == b.index && a.alpha == b.alpha &&
           a.conjugated == b.conjugated;
}

bool operator<(const VarId& a, const VarId& b)
{
    if (a.type != b.type)
        return a.type < b.type;
    if (a.index != b.index)
        return a.index < b.index;
    if (a.conjugated != b.conjugated)
        return a.conjugated < b.conjugated;
    return a.alpha < b.alpha;
}

// ---------------------------------------------------------------------------
// Node construction

namespace {

std::size_t mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_rational(const Rational& r)
{
    return mix(std::hash<long long>{}(r.numerator()), std::hash<long long>{}(r.denominator()));
}

Expr finish(Node n)
{
    std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
    switch (n.kind) {
    case Kind::Const:
        h = mix(h, hash_rational(n.value.re));
        h = mix(h, hash_rational(n.value.im));
        n.real = n.value.is_real();
        break;
    case Kind::Var:
        h = mix(h, static_cast<std::size_t>(n.var.type));
        h = mix(h, static_cast<std::size_t>(n.var.index));
        h = mix(h, n.var.conjugated);
        for (int a : n.var.alpha)
            h = mix(h, static_cast<std::size_t>(a));
        n.real = n.var.type != VarType::Jet;
        break;
    case Kind::Func:
        h = mix(h, std::hash<std::string>{}(n.symbol->name));
        for (int d : n.deriv)
            h = mix(h, static_cast<std::size_t>(d));
        n.real = n.symbol->codomain == Codomain::Real;
        break;
    case Kind::Builtin:
        h = mix(h, static_cast<std::size_t>(n.fn));
        n.real = true;
        break;
    case Kind::IntPow:
        h = mix(h, std::hash<long long>{}(n.int_exp));
        n.real = true;
        break;
    case Kind::AbsPow:
        h = mix(h, hash_rational(n.abs_exp));
        break;
    default:
        n.real = true;
        break;
    }
    bool args_real = true;
    for (const Expr& a : n.args) {
        h = mix(h, a->hash);
        args_real = args_real && a->real;
    }
    switch (n.kind) {
    case Kind::Func:
    case Kind::Builtin:
    case Kind::Sum:
    case Kind::Product:
    case Kind::IntPow:
        n.real = n.real && args_real;
        break;
    case Kind::Inverse:
    case Kind::AbsPow:
    case Kind::Sign:
        n.real = true;
        break;
    case Kind::Conj:
        n.real = args_real;
        break;
    default:
        break;
    }
    n.hash = h;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Node node_of(Kind k, std::vector<Expr> args = {})
{
    Node n;
    n.kind = k;
    n.args = std::move(args);
    return n;
}

} // namespace

Expr constant(const CRational& c)
{
    Node n = node_of(Kind::Const);
    n.value = c;
    return finish(std::move(n));
}

Expr constant(long long p, long long q) { return constant(CRational(Rational(p, q))); }

Expr imag_unit() { return constant(CRational(0, 1)); }

Expr var(const VarId& v)
{
    if (v.type == VarType::X && v.index < 1)
        throw std::invalid_argument("x index must be at least 1");
    Node n = node_of(Kind::Var);
    n.var = v;
    if (n.var.type != VarType::Jet) {
        n.var.alpha.clear();
        n.var.conjugated = false;
    }
    return finish(std::move(n));
}

Expr var_t() { return var(VarId::t()); }
Expr var_x(int a) { return var(VarId::x(a)); }
Expr jet(std::vector<int> alpha, bool conjugated) { return var(VarId::jet(std::move(alpha), conjugated)); }
Expr psi() { return jet({}, false); }

Expr func(const FunctionSymbol& f, std::vector<Expr> args, std::vector<int> deriv)
{
    if (!f)
        throw std::invalid_argument("null function symbol");
    if (static_cast<int>(args.size()) != f->arity)
        throw std::invalid_argument("symbol " + f->name + " expects " + std::to_string(f->arity) +
                                    " arguments, got " + std::to_string(args.size()));
    if (deriv.empty())
        deriv.assign(args.size(), 0);
    if (deriv.size() != args.size())
        throw std::invalid_argument("derivative index length mismatch for " + f->name);
    for (const Expr& a : args)
        if (!a->real)
            throw DomainError("argument of " + f->name + " must be real");
    for (int d : deriv)
        if (d < 0)
            throw std::invalid_argument("negative derivative order for " + f->name);
    Node n = node_of(Kind::Func, std::move(args));
    n.symbol = f;
    n.deriv = std::move(deriv);
    return finish(std::move(n));
}

Expr builtin(BuiltinFn fn, std::vector<Expr> args)
{
    std::size_t want = fn == BuiltinFn::Pi ? 0 : fn == BuiltinFn::Atan2 ? 2 : 1;
    if (args.size() != want)
        throw std::invalid_argument("wrong number of arguments to builtin function");
    if (fn == BuiltinFn::Ln || fn == BuiltinFn::Atan2)
        for (const Expr& a : args)
            if (!a->real)
                throw DomainError("ln and atan2 need real arguments");
    if (fn == BuiltinFn::Exp && is_const_zero(args[0]))
        return constant(1);
    if ((fn == BuiltinFn::Sin) && is_const_zero(args[0]))
        return constant(0);
    if ((fn == BuiltinFn::Cos) && is_const_zero(args[0]))
        return constant(1);
    Node n = node_of(Kind::Builtin, std::move(args));
    n.fn = fn;
    return finish(std::move(n));
}

Expr inverse(const Expr& f, const Expr& arg)
{
    if (!f->real || !arg->real)
        throw DomainError("inverse function needs real data");
    for (const VarId& v : variables(f))
        if (v.type != VarType::T)
            throw std::invalid_argument("inverse: the function must depend on t only");
    return finish(node_of(Kind::Inverse, {f, arg}));
}

Expr sum(std::vector<Expr> terms)
{
    CRational c;
    std::vector<Expr> rest;
    std::function<void(const Expr&)> add = [&](const Expr& e) {
        if (e->kind == Kind::Sum) {
            for (const Expr& a : e->args)
                add(a);
        } else if (e->kind == Kind::Const) {
            c = c + e->value;
        } else {
            rest.push_back(e);
        }
    };
    for (const Expr& e : terms)
        add(e);
    if (rest.empty())
        return constant(c);
    if (!c.is_zero())
        rest.insert(rest.begin(), constant(c));
    if (rest.size() == 1)
        return rest.front();
    return finish(node_of(Kind::Sum, std::move(rest)));
}

Expr product(std::vector<Expr> factors)
{
    CRational c(1);
    std::vector<Expr> rest;
    std::function<void(const Expr&)> add = [&](const Expr& e) {
        if (e->kind == Kind::Product) {
            for (const Expr& a : e->args)
                add(a);
        } else if (e->kind == Kind::Const) {
            c = c * e->value;
        } else {
            rest.push_back(e);
        }
    };
    for (const Expr& e : factors)
        add(e);
    if (c.is_zero())
        return constant(0);
    if (rest.empty())
        return constant(c);
    if (!c.is_one())
        rest.insert(rest.begin(), constant(c));
    if (rest.size() == 1)
        return rest.front();
    return finish(node_of(Kind::Product, std::move(rest)));
}

Expr pow_int(const Expr& base, long long k)
{
    if (k == 0)
        return constant(1);
    if (k == 1)
        return base;
    if (base->kind == Kind::Const)
        return constant(pow(base->value, k));
    if (base->kind == Kind::IntPow)
        return pow_int(base->args[0], base->int_exp * k);
    if (base->kind == Kind::AbsPow)
        return pow_abs(base->args[0], base->abs_exp * k);
    Node n = node_of(Kind::IntPow, {base});
    n.int_exp = k;
    return finish(std::move(n));
}

Expr pow_abs(const Expr& base, const Rational& p)
{
    if (!base->real)
        throw DomainError("absolute power of a non-real expression");
    if (p == 0)
        return constant(1);
    if (base->kind == Kind::Const) {
        Rational v = base->value.re < 0 ? -base->value.re : base->value.re;
        if (v == 0) {
            if (p < 0)
                throw DomainError("negative power of exact zero");
            return constant(0);
        }
        if (p.denominator() == 1)
            return constant(pow(CRational(v), p.numerator()));
        if (v == 1)
            return constant(1);
        // Exact roots of perfect powers, e.g. |4|^(1/2) = 2.
        auto root = [&](long long m, long long& r) {
            const long long q = p.denominator();
            long long c = std::llround(std::pow(static_cast<double>(m), 1.0 / static_cast<double>(q)));
            for (long long k = std::max(0LL, c - 1); k <= c + 1; ++k) {
                long long acc = 1;
                bool over = false;
                for (long long e = 0; e < q && !over; ++e)
                    over = __builtin_mul_overflow(acc, k, &acc);
                if (!over && acc == m) {
                    r = k;
                    return true;
                }
            }
            return false;
        };
        long long rn = 0, rd = 0;
        if (root(v.numerator(), rn) && root(v.denominator(), rd))
            return constant(pow(CRational(Rational(rn, rd)), p.numerator()));
        if (v != base->value.re) {
            Node n = node_of(Kind::AbsPow, {constant(CRational(v))});
            n.abs_exp = p;
            return finish(std::move(n));
        }
    }
    if (base->kind == Kind::AbsPow)
        return pow_abs(base->args[0], base->abs_exp * p);
    if (base->kind == Kind::IntPow)
        return pow_abs(base->args[0], p * base->int_exp);
    Node n = node_of(Kind::AbsPow, {base});
    n.abs_exp = p;
    return finish(std::move(n));
}

Expr sign(const Expr& base)
{
    if (!base->real)
        throw DomainError("sign of a non-real expression");
    if (base->kind == Kind::Const) {
        const Rational& r = base->value.re;
        return constant(r > 0 ? 1 : r < 0 ? -1 : 0);
    }
    if (base->kind == Kind::Sign)
        return base;
    return finish(node_of(Kind::Sign, {base}));
}

Expr conj(const Expr& e)
{
    if (e->kind == Kind::Const)
        return constant(conj(e->value));
    if (e->kind == Kind::Conj)
        return e->args[0];
    if (e->real)
        return e;
    return finish(node_of(Kind::Conj, {e}));
}

Expr cos(const Expr& e) { return builtin(BuiltinFn::Cos, {e}); }
Expr sin(const Expr& e) { return builtin(BuiltinFn::Sin, {e}); }
Expr exp(const Expr& e) { return builtin(BuiltinFn::Exp, {e}); }
Expr ln(const Expr& e) { return builtin(BuiltinFn::Ln, {e}); }
Expr atan2(const Expr& y, const Expr& x) { return builtin(BuiltinFn::Atan2, {y, x}); }
Expr pi() { return builtin(BuiltinFn::Pi, {}); }

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({constant(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return product({a, pow_int(b, -1)}); }
Expr operator-(const Expr& a) { return product({constant(-1), a}); }
Expr operator+(const Expr& a, const Rational& b) { return a + constant(CRational(b)); }
Expr operator+(const Rational& a, const Expr& b) { return constant(CRational(a)) + b; }
Expr operator-(const Expr& a, const Rational& b) { return a - constant(CRational(b)); }
Expr operator-(const Rational& a, const Expr& b) { return constant(CRational(a)) - b; }
Expr operator*(const Expr& a, const Rational& b) { return a * constant(CRational(b)); }
Expr operator*(const Rational& a, const Expr& b) { return constant(CRational(a)) * b; }
Expr operator/(const Expr& a, const Rational& b) { return a * constant(CRational(1 / b)); }

Expr real_part(const Expr& e) { return Rational(1, 2) * (e + conj(e)); }

Expr imag_part(const Expr& e) { return constant(CRational(0, Rational(-1, 2))) * (e - conj(e)); }

bool is_const(const Expr& e) { return e->kind == Kind::Const; }
bool is_const_zero(const Expr& e) { return e->kind == Kind::Const && e->value.is_zero(); }
bool is_real(const Expr& e) { return e->real; }

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.get() == b.get())
        return true;
    if (a->hash != b->hash || a->kind != b->kind || a->args.size() != b->args.size())
        return false;
    switch (a->kind) {
    case Kind::Const:
        if (!(a->value == b->value))
            return false;
        break;
    case Kind::Var:
        if (!(a->var == b->var))
            return false;
        break;
    case Kind::Func:
        if (a->symbol->name != b->symbol->name || a->deriv != b->deriv)
            return false;
        break;
    case Kind::Builtin:
        if (a->fn != b->fn)
            return false;
        break;
    case Kind::IntPow:
        if (a->int_exp != b->int_exp)
            return false;
        break;
    case Kind::AbsPow:
        if (a->abs_exp != b->abs_exp)
            return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!structurally_equal(a->args[i], b->args[i]))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Traversal

namespace {

template <class F>
void visit_unique(const Expr& root, F&& f)
{
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{root.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second)
            continue;
        f(*n);
        for (const Expr& a : n->args)
            stack.push_back(a.get());
    }
}

void collect_vars(const Expr& e, bool parity, std::set<VarId>& out,
                  std::set<std::pair<const Node*, bool>>& seen)
{
    if (!seen.insert({e.get(), parity}).second)
        return;
    if (e->kind == Kind::Var) {
        out.insert(parity ? e->var.flipped() : e->var);
        return;
    }
    if (e->kind == Kind::Inverse) {
        // The first child is a function of its own bound variable.
        collect_vars(e->args[1], parity, out, seen);
        return;
    }
    bool p = e->kind == Kind::Conj ? !parity : parity;
    for (const Expr& a : e->args)
        collect_vars(a, p, out, seen);
}

} // namespace

std::set<VarId> variables(const Expr& e)
{
    std::set<VarId> out;
    std::set<std::pair<const Node*, bool>> seen;
    collect_vars(e, false, out, seen);
    return out;
}

std::set<VarId> jets(const Expr& e)
{
    std::set<VarId> out;
    for (const VarId& v : variables(e))
        if (v.type == VarType::Jet)
            out.insert(v);
    return out;
}

bool depends_on(const Expr& e, VarType type)
{
    bool found = false;
    visit_unique(e, [&](const Node& n) {
        if (n.kind == Kind::Var && n.var.type == type)
            found = true;
    });
    return found;
}

bool depends_on_x(const Expr& e) { return depends_on(e, VarType::X); }

std::map<std::string, FunctionSymbol> symbols(const Expr& e)
{
    std::map<std::string, FunctionSymbol> out;
    visit_unique(e, [&](const Node& n) {
        if (n.kind == Kind::Func)
            out.emplace(n.symbol->name, n.symbol);
    });
    return out;
}

std::size_t node_count(const Expr& e)
{
    std::size_t c = 0;
    visit_unique(e, [&](const Node&) { ++c; });
    return c;
}

// ---------------------------------------------------------------------------
// Rebuilding with new children

namespace {

Expr rebuild(const Node& n, std::vector<Expr> args)
{
    switch (n.kind) {
    case Kind::Const:
    case Kind::Var:
        throw std::logic_error("rebuild of a leaf");
    case Kind::Func:
        return func(n.symbol, std::move(args), n.deriv);
    case Kind::Builtin:
        return builtin(n.fn, std::move(args));
    case Kind::Inverse:
        return inverse(args[0], args[1]);
    case Kind::Sum:
        return sum(std::move(args));
    case Kind::Product:
        return product(std::move(args));
    case Kind::IntPow:
        return pow_int(args[0], n.int_exp);
    case Kind::AbsPow:
        return pow_abs(args[0], n.abs_exp);
    case Kind::Sign:
        return sign(args[0]);
    case Kind::Conj:
        return conj(args[0]);
    }
    throw std::logic_error("unknown node kind");
}

class Differ {
  public:
    explicit Differ(const VarId& v) : v_{v, v.flipped()} {}

    Expr run(const Expr& e, int parity)
    {
        auto& memo = memo_[parity];
        auto it = memo.find(e.get());
        if (it != memo.end())
            return it->second;
        Expr out = compute(e, parity);
        memo.emplace(e.get(), out);
        return out;
    }

  private:
    Expr compute(const Expr& e, int parity)
    {
        const Node& n = *e;
        switch (n.kind) {
        case Kind::Const:
            return constant(0);
        case Kind::Var:
            return constant(n.var == v_[parity] ? 1 : 0);
        case Kind::Func: {
            std::vector<Expr> terms;
            for (std::size_t j = 0; j < n.args.size(); ++j) {
                Expr da = run(n.args[j], parity);
                if (is_const_zero(da))
                    continue;
                std::vector<int> d = n.deriv;
                d[j] += 1;
                terms.push_back(da * func(n.symbol, n.args, d));
            }
            return sum(std::move(terms));
        }
        case Kind::Builtin: {
            if (n.fn == BuiltinFn::Pi)
                return constant(0);
            if (n.fn == BuiltinFn::Atan2) {
                const Expr& y = n.args[0];
                const Expr& x = n.args[1];
                Expr num = x * run(y, parity) - y * run(x, parity);
                if (is_const_zero(num))
                    return num;
                return num * pow_int(x * x + y * y, -1);
            }
            Expr du = run(n.args[0], parity);
            if (is_const_zero(du))
                return du;
            const Expr& u = n.args[0];
            switch (n.fn) {
            case BuiltinFn::Cos:
                return -sin(u) * du;
            case BuiltinFn::Sin:
                return cos(u) * du;
            case BuiltinFn::Exp:
                return e * du;
            case BuiltinFn::Ln:
                return du * pow_int(u, -1);
            default:
                break;
            }
            throw std::logic_error("unhandled builtin");
        }
        case Kind::Inverse: {
            Expr da = run(n.args[1], parity);
            if (is_const_zero(da))
                return da;
            Expr fprime = subst_t(diff(n.args[0], VarId::t()), e);
            return da * pow_int(fprime, -1);
        }
        case Kind::Sum: {
            std::vector<Expr> terms;
            for (const Expr& a : n.args)
                terms.push_back(run(a, parity));
            return sum(std::move(terms));
        }
        case Kind::Product: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                Expr di = run(n.args[i], parity);
                if (is_const_zero(di))
                    continue;
                std::vector<Expr> f = n.args;
                f[i] = di;
                terms.push_back(product(std::move(f)));
            }
            return sum(std::move(terms));
        }
        case Kind::IntPow: {
            Expr db = run(n.args[0], parity);
            if (is_const_zero(db))
                return db;
            return constant(n.int_exp) * pow_int(n.args[0], n.int_exp - 1) * db;
        }
        case Kind::AbsPow: {
            Expr db = run(n.args[0], parity);
            if (is_const_zero(db))
                return db;
            return constant(CRational(n.abs_exp)) * pow_abs(n.args[0], n.abs_exp - 1) *
                   sign(n.args[0]) * db;
        }
        case Kind::Sign:
            return constant(0);
        case Kind::Conj:
            return conj(run(n.args[0], 1 - parity));
        }
        throw std::logic_error("unknown node kind");
    }

    VarId v_[2];
    std::unordered_map<const Node*, Expr> memo_[2];
};

} // namespace

Expr diff(const Expr& e, const VarId& v)
{
    Differ d(v);
    return d.run(e, 0);
}

Expr diff_t(const Expr& e, int k)
{
    Expr out = e;
    for (int i = 0; i < k; ++i)
        out = diff(out, VarId::t());
    return out;
}

Expr total_derivative(const Expr& e, int direction)
{
    VarId v = direction == 0 ? VarId::t() : VarId::x(direction);
    std::vector<Expr> terms{diff(e, v)};
    for (const VarId& j : jets(e)) {
        Expr dj = diff(e, j);
        if (!is_const_zero(dj))
            terms.push_back(dj * var(j.raised(direction)));
    }
    return sum(std::move(terms));
}

namespace {

template <class LeafFn>
Expr transform(const Expr& e, std::unordered_map<const Node*, Expr>& memo, LeafFn&& leaf,
               bool into_bound)
{
    auto it = memo.find(e.get());
    if (it != memo.end())
        return it->second;
    Expr out;
    if (auto r = leaf(e)) {
        out = *r;
    } else if (e->args.empty()) {
        out = e;
    } else {
        std::vector<Expr> args;
        bool changed = false;
        for (std::size_t i = 0; i < e->args.size(); ++i) {
            const Expr& a = e->args[i];
            bool bound = e->kind == Kind::Inverse && i == 0;
            args.push_back(bound && !into_bound ? a : transform(a, memo, leaf, into_bound));
            changed = changed || args.back().get() != a.get();
        }
        out = changed ? rebuild(*e, std::move(args)) : e;
    }
    memo.emplace(e.get(), out);
    return out;
}

} // namespace

Expr subst(const Expr& e, const std::map<VarId, Expr>& repl)
{
    std::unordered_map<const Node*, Expr> memo;
    return transform(e, memo, [&](const Expr& n) -> std::optional<Expr> {
        if (n->kind != Kind::Var)
            return std::nullopt;
        auto it = repl.find(n->var);
        if (it == repl.end())
            return std::nullopt;
        return it->second;
    }, false);
}

Expr subst_t(const Expr& e, const Expr& value) { return subst(e, {{VarId::t(), value}}); }

Expr subst_function(const Expr& e, const std::string& name, const Expr& body)
{
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> self;
    auto leaf = [&](const Expr& n) -> std::optional<Expr> {
        if (n->kind != Kind::Func || n->symbol->name != name)
            return std::nullopt;
        if (n->symbol->arity == 0)
            return body;
        if (n->symbol->arity != 1)
            throw std::invalid_argument("subst_function supports arity 0 and 1 only");
        Expr arg = self(n->args[0]);
        return subst_t(diff_t(body, n->deriv[0]), arg);
    };
    self = [&](const Expr& x) { return transform(x, memo, leaf, true); };
    return self(e);
}

} // namespace linsym
