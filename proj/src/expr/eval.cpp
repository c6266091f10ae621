#include "linsym/eval.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace linsym {

namespace {

constexpr double kSingular = 1e-9;

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Complex draw_coefficient(Rng& rng, bool complex, double bound)
{
    double re = uniform(rng, -bound, bound);
    double im = complex ? uniform(rng, -bound, bound) : 0.0;
    return {re, im};
}

} // namespace

Complex Surrogate::eval(const std::vector<double>& z, const std::vector<int>& deriv) const
{
    int order = 0;
    for (int d : deriv)
        order += d;
    Complex out = order == 0 ? c0 : Complex{};
    if (arity >= 1 && slope != 0.0) {
        if (order == 0)
            out += slope * z[0];
        else if (order == 1 && deriv[0] == 1)
            out += slope;
    }
    for (const Wave& w : waves) {
        double coef = 1.0;
        double phase = w.b + order * std::numbers::pi / 2;
        for (int j = 0; j < arity; ++j) {
            phase += w.a[j] * z[j];
            if (!deriv.empty())
                coef *= std::pow(w.a[j], deriv[j]);
        }
        out += w.c * coef * std::cos(phase);
    }
    return out;
}

Surrogate draw_surrogate(const SymbolInfo& s, Rng& rng)
{
    Surrogate out;
    out.arity = s.arity;
    bool complex = s.codomain == Codomain::Complex;
    if (s.arity == 0) {
        if (s.shape == Shape::Nonzero) {
            double r = uniform(rng, 0.5, 1.5);
            double ph = complex ? uniform(rng, 0.0, 2 * std::numbers::pi) : 0.0;
            double sg = complex ? 1.0 : (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            out.c0 = sg * std::polar(r, ph);
        } else if (complex) {
            out.c0 = draw_coefficient(rng, true, 1.0);
        } else {
            out.c0 = uniform(rng, s.lo, s.hi);
        }
        return out;
    }
    const int waves = 3;
    switch (s.shape) {
    case Shape::Positive:
        out.c0 = uniform(rng, 1.5, 2.5);
        break;
    case Shape::Increasing:
        out.c0 = uniform(rng, -1.0, 1.0);
        out.slope = uniform(rng, 1.0, 2.0);
        break;
    default:
        out.c0 = draw_coefficient(rng, complex, 1.0);
        break;
    }
    for (int k = 0; k < waves; ++k) {
        Surrogate::Wave w;
        w.a.resize(s.arity);
        bool nonzero = false;
        while (!nonzero) {
            for (double& a : w.a) {
                a = uniform_int(rng, -3, 3);
                nonzero = nonzero || a != 0;
            }
        }
        w.b = uniform(rng, 0.0, 2 * std::numbers::pi);
        switch (s.shape) {
        case Shape::Positive:
            w.c = uniform(rng, -1.0 / 3, 1.0 / 3);
            break;
        case Shape::Increasing: {
            double bound = out.slope / (6.0 * std::abs(w.a[0]) + 1e-300);
            w.c = w.a[0] == 0 ? 0.0 : uniform(rng, -bound, bound);
            break;
        }
        default:
            w.c = draw_coefficient(rng, complex, 1.0);
            break;
        }
        out.waves.push_back(std::move(w));
    }
    return out;
}

void SurrogateBinding::bind_missing(const std::vector<Expr>& exprs, Rng& rng)
{
    std::map<std::string, FunctionSymbol> all;
    for (const Expr& e : exprs)
        for (auto& [name, sym] : symbols(e))
            all.emplace(name, sym);
    for (auto& [name, sym] : all)
        if (!contains(name))
            table_[name] = draw_surrogate(*sym, rng);
}

const Surrogate& SurrogateBinding::at(const std::string& name) const
{
    auto it = table_.find(name);
    if (it == table_.end())
        throw UnboundSymbol("unbound function symbol " + name);
    return it->second;
}

Complex SamplePoint::jet(const VarId& v) const
{
    auto it = jets.find(v.alpha);
    if (it == jets.end())
        throw std::invalid_argument("sample point lacks a jet value");
    return v.conjugated ? std::conj(it->second) : it->second;
}

SamplePoint draw_point(int n, const std::vector<Expr>& exprs, const SampleDomain& dom, Rng& rng)
{
    SamplePoint p;
    p.t = uniform(rng, dom.t_lo, dom.t_hi);
    p.x.resize(n);
    for (double& xa : p.x)
        xa = uniform(rng, dom.x_lo, dom.x_hi);
    std::set<std::vector<int>> alphas;
    for (const Expr& e : exprs)
        for (const VarId& j : jets(e))
            alphas.insert(j.alpha);
    for (const auto& a : alphas) {
        double r = std::sqrt(uniform(rng, 0.0, 1.0));
        double th = uniform(rng, 0.0, 2 * std::numbers::pi);
        p.jets[a] = std::polar(r, th);
    }
    return p;
}

namespace {

class Evaluator {
  public:
    Evaluator(const SurrogateBinding& b, const SamplePoint& p) : b_(b), p_(p) {}

    Complex run(const Expr& e)
    {
        auto it = memo_.find(e.get());
        if (it != memo_.end())
            return it->second;
        Complex v = compute(*e, e);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            unsafe = true;
        scale = std::max(scale, std::abs(v));
        memo_.emplace(e.get(), v);
        return v;
    }

    double scale = 0.0;
    bool unsafe = false;

  private:
    void guard(double magnitude)
    {
        if (magnitude < kSingular)
            unsafe = true;
    }

    double real_of(const Expr& e) { return run(e).real(); }

    Complex compute(const Node& n, const Expr& self)
    {
        switch (n.kind) {
        case Kind::Const:
            return n.value.to_complex();
        case Kind::Var:
            switch (n.var.type) {
            case VarType::T:
                return p_.t;
            case VarType::X:
                if (n.var.index > static_cast<int>(p_.x.size()))
                    throw std::invalid_argument("sample point has too few x coordinates");
                return p_.x[n.var.index - 1];
            case VarType::Jet:
                return p_.jet(n.var);
            }
            break;
        case Kind::Func: {
            std::vector<double> z;
            z.reserve(n.args.size());
            for (const Expr& a : n.args)
                z.push_back(real_of(a));
            Complex v = b_.at(n.symbol->name).eval(z, n.deriv);
            return n.symbol->codomain == Codomain::Real ? Complex(v.real(), 0.0) : v;
        }
        case Kind::Builtin: {
            if (n.fn == BuiltinFn::Pi)
                return std::numbers::pi;
            if (n.fn == BuiltinFn::Atan2) {
                double y = real_of(n.args[0]);
                double x = real_of(n.args[1]);
                guard(std::abs(x) + std::abs(y));
                return std::atan2(y, x);
            }
            Complex u = run(n.args[0]);
            switch (n.fn) {
            case BuiltinFn::Cos:
                return std::cos(u);
            case BuiltinFn::Sin:
                return std::sin(u);
            case BuiltinFn::Exp:
                return std::exp(u);
            case BuiltinFn::Ln:
                guard(std::abs(u.real()));
                return std::log(std::abs(u.real()));
            default:
                break;
            }
            break;
        }
        case Kind::Inverse:
            return solve_inverse(n.args[0], real_of(n.args[1]));
        case Kind::Sum: {
            Complex s;
            for (const Expr& a : n.args)
                s += run(a);
            return s;
        }
        case Kind::Product: {
            Complex s(1.0, 0.0);
            for (const Expr& a : n.args)
                s *= run(a);
            return s;
        }
        case Kind::IntPow: {
            Complex b = run(n.args[0]);
            if (n.int_exp < 0)
                guard(std::abs(b));
            return ipow(b, n.int_exp);
        }
        case Kind::AbsPow: {
            double b = std::abs(real_of(n.args[0]));
            guard(b);
            double p = static_cast<double>(n.abs_exp.numerator()) /
                       static_cast<double>(n.abs_exp.denominator());
            return std::pow(b, p);
        }
        case Kind::Sign: {
            double b = real_of(n.args[0]);
            guard(std::abs(b));
            return b > 0 ? 1.0 : -1.0;
        }
        case Kind::Conj:
            return std::conj(run(n.args[0]));
        }
        (void)self;
        throw std::logic_error("unknown node kind");
    }

    static Complex ipow(Complex b, long long k)
    {
        bool inv = k < 0;
        unsigned long long m = inv ? -k : k;
        Complex out(1.0, 0.0);
        while (m) {
            if (m & 1)
                out *= b;
            b *= b;
            m >>= 1;
        }
        return inv ? 1.0 / out : out;
    }

    double f_at(const Expr& f, double s)
    {
        SamplePoint q;
        q.t = s;
        Evaluator sub(b_, q);
        double v = sub.run(f).real();
        if (sub.unsafe)
            unsafe = true;
        return v;
    }

    // Bracket outward from the default sample interval, then bisect.
    double solve_inverse(const Expr& f, double target)
    {
        double lo = 0.3, hi = 1.7;
        double glo = f_at(f, lo) - target;
        double ghi = f_at(f, hi) - target;
        for (int k = 0; k < 12 && glo * ghi > 0; ++k) {
            double w = hi - lo;
            lo -= w;
            hi += w;
            glo = f_at(f, lo) - target;
            ghi = f_at(f, hi) - target;
        }
        if (glo * ghi > 0 || !std::isfinite(glo) || !std::isfinite(ghi)) {
            unsafe = true;
            return 0.0;
        }
        if (glo == 0.0)
            return lo;
        if (ghi == 0.0)
            return hi;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
            double mid = 0.5 * (lo + hi);
            double gm = f_at(f, mid) - target;
            if (gm == 0.0)
                return mid;
            if ((gm < 0) == (glo < 0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
                ghi = gm;
            }
        }
        // Secant polish inside the final bracket.
        double s = ghi != glo ? lo - glo * (hi - lo) / (ghi - glo) : 0.5 * (lo + hi);
        return (s >= lo && s <= hi) ? s : 0.5 * (lo + hi);
    }

    const SurrogateBinding& b_;
    const SamplePoint& p_;
    std::unordered_map<const Node*, Complex> memo_;
};

} // namespace

EvalResult evaluate(const Expr& e, const SurrogateBinding& b, const SamplePoint& p)
{
    Evaluator ev(b, p);
    EvalResult r;
    r.value = ev.run(e);
    r.scale = ev.scale;
    r.unsafe = ev.unsafe;
    return r;
}

Complex eval(const Expr& e, const SurrogateBinding& b, const SamplePoint& p)
{
    return evaluate(e, b, p).value;
}

ZeroTestResult test_zero_with(const std::vector<Expr>& components, SurrogateBinding& binding,
                              const ZeroTestOptions& opt, Rng& rng)
{
    binding.bind_missing(components, rng);
    ZeroTestResult res;
    for (int i = 0; i < opt.points; ++i) {
        std::vector<EvalResult> vals;
        SamplePoint p;
        int tries = 0;
        for (;;) {
            p = draw_point(opt.n, components, opt.domain, rng);
            vals.clear();
            bool unsafe = false;
            for (const Expr& c : components) {
                vals.push_back(evaluate(c, binding, p));
                unsafe = unsafe || vals.back().unsafe;
            }
            if (!unsafe)
                break;
            ++res.rejected;
            if (++tries > opt.retries)
                throw SamplingError("no safe sample point found within the retry budget");
        }
        for (std::size_t k = 0; k < vals.size(); ++k) {
            double norm = std::abs(vals[k].value) / (1.0 + vals[k].scale);
            res.max_normalized = std::max(res.max_normalized, norm);
            if (norm > opt.tol && res.zero) {
                res.zero = false;
                res.witness = Witness{0, static_cast<int>(k), p.t, p.x, vals[k].value, norm};
                return res;
            }
        }
    }
    return res;
}

ZeroTestResult test_zero(const std::vector<Expr>& components, const ZeroTestOptions& opt, Rng& rng)
{
    ZeroTestResult total;
    for (int b = 0; b < opt.bindings; ++b) {
        SurrogateBinding binding;
        ZeroTestResult r = test_zero_with(components, binding, opt, rng);
        total.rejected += r.rejected;
        total.max_normalized = std::max(total.max_normalized, r.max_normalized);
        if (!r.zero) {
            total.zero = false;
            total.witness = r.witness;
            total.witness->binding = b;
            return total;
        }
    }
    return total;
}

ZeroTestResult test_zero(const Expr& e, const ZeroTestOptions& opt, Rng& rng)
{
    return test_zero(std::vector<Expr>{e}, opt, rng);
}

bool is_zero(const Expr& e, const ZeroTestOptions& opt, Rng& rng) { return test_zero(e, opt, rng).zero; }

bool is_zero(const Expr& e, Rng& rng) { return is_zero(e, ZeroTestOptions{}, rng); }

} // namespace linsym
