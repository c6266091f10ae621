#include "linsym/parse.hpp"

#include "json.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace linsym {

// ---------------------------------------------------------------------------
// Declarations

void Declarations::add(const FunctionSymbol& s)
{
    if (!table_.emplace(s->name, s).second)
        throw std::invalid_argument("duplicate symbol " + s->name);
}

const FunctionSymbol* Declarations::find(const std::string& name) const
{
    auto it = table_.find(name);
    return it == table_.end() ? nullptr : &it->second;
}

Declarations Declarations::from_json_text(std::string_view text)
{
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array())
        throw std::invalid_argument("declarations must be a JSON list");
    Declarations d;
    for (const auto& item : j) {
        std::string name = item.at("name").get<std::string>();
        int arity = item.at("arity").get<int>();
        std::string cod = item.value("codomain", "real");
        if (cod != "real" && cod != "complex")
            throw std::invalid_argument("codomain of " + name + " must be real or complex");
        std::string shape = item.value("shape", "any");
        Shape sh = shape == "positive"     ? Shape::Positive
                   : shape == "increasing" ? Shape::Increasing
                   : shape == "nonzero"    ? Shape::Nonzero
                                           : Shape::Any;
        auto s = std::make_shared<SymbolInfo>();
        s->name = name;
        s->arity = arity;
        s->codomain = cod == "complex" ? Codomain::Complex : Codomain::Real;
        s->shape = sh;
        if (item.contains("range")) {
            s->lo = item["range"].at(0).get<double>();
            s->hi = item["range"].at(1).get<double>();
        }
        d.add(s);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
  public:
    Parser(std::string_view s, const ParseContext& ctx) : s_(s), ctx_(ctx) {}

    Expr run()
    {
        Expr e = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool peek(char c)
    {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c)
    {
        if (!peek(c))
            return false;
        ++pos_;
        return true;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    Expr expr()
    {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+'))
                terms.push_back(term());
            else if (accept('-'))
                terms.push_back(-term());
            else
                break;
        }
        return sum(std::move(terms));
    }

    Expr term()
    {
        std::vector<Expr> f{factor()};
        for (;;) {
            if (accept('*')) {
                f.push_back(factor());
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = factor();
                if (is_const_zero(d))
                    throw ParseError("division by zero", at);
                f.push_back(pow_int(d, -1));
            } else {
                break;
            }
        }
        return product(std::move(f));
    }

    Expr factor()
    {
        if (accept('-'))
            return -factor();
        Expr base = atom();
        if (!accept('^'))
            return base;
        Rational p = exponent();
        if (p.denominator() == 1)
            return pow_int(base, p.numerator());
        if (base->kind == Kind::AbsPow)
            return pow_abs(base->args[0], base->abs_exp * p);
        if (base->kind == Kind::Const && base->value.is_real() && base->value.re > 0)
            return pow_abs(base, p);
        fail("fractional exponent requires an absolute value |..| base");
    }

    long long integer()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected integer");
        return std::stoll(std::string(s_.substr(start, pos_ - start)));
    }

    Rational exponent()
    {
        if (accept('(')) {
            bool neg = accept('-');
            long long p = integer();
            long long q = 1;
            if (accept('/'))
                q = integer();
            if (q == 0)
                fail("zero denominator in exponent");
            expect(')');
            return Rational(neg ? -p : p, q);
        }
        bool neg = accept('-');
        long long p = integer();
        return Rational(neg ? -p : p);
    }

    Expr number()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        std::string whole(s_.substr(start, pos_ - start));
        Rational r(std::stoll(whole));
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            std::size_t fs = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string frac(s_.substr(fs, pos_ - fs));
            if (frac.size() > 17)
                fail("too many decimal digits");
            long long den = 1;
            for (std::size_t k = 0; k < frac.size(); ++k)
                den *= 10;
            if (!frac.empty())
                r += Rational(std::stoll(frac), den);
        }
        return constant(CRational(r));
    }

    std::string ident()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '_' || s_[pos_] == '$'))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    std::vector<Expr> call_args()
    {
        expect('(');
        std::vector<Expr> args;
        if (accept(')'))
            return args;
        args.push_back(expr());
        while (accept(','))
            args.push_back(expr());
        expect(')');
        return args;
    }

    std::optional<Expr> jet_ident(const std::string& id, std::size_t at)
    {
        bool conj = false;
        std::string rest;
        if (id.rfind("psistar", 0) == 0) {
            conj = true;
            rest = id.substr(7);
        } else if (id.rfind("psi", 0) == 0) {
            rest = id.substr(3);
        } else {
            return std::nullopt;
        }
        if (rest.empty())
            return jet({}, conj);
        if (rest[0] != '_' || rest.size() == 1)
            return std::nullopt;
        std::vector<int> alpha(ctx_.n + 1, 0);
        for (std::size_t k = 1; k < rest.size(); ++k) {
            char c = rest[k];
            if (c == 't') {
                alpha[0] += 1;
            } else if (c >= '1' && c <= '9' && c - '0' <= ctx_.n) {
                alpha[c - '0'] += 1;
            } else {
                throw ParseError("bad jet suffix in " + id, at);
            }
        }
        return jet(alpha, conj);
    }

    Expr atom()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (c == '|') {
            ++pos_;
            std::size_t at = pos_;
            Expr e = expr();
            expect('|');
            if (!e->real)
                throw ParseError("absolute value of a non-real expression", at);
            return pow_abs(e, 1);
        }
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'))
            fail("unexpected character '" + std::string(1, c) + "'");
        std::size_t at = pos_;
        std::string id = ident();
        if (id == "t")
            return var_t();
        if (id == "i")
            return imag_unit();
        if (id == "pi")
            return pi();
        if (id.size() > 1 && id[0] == 'x' &&
            id.find_first_not_of("0123456789", 1) == std::string::npos) {
            int a = std::stoi(id.substr(1));
            if (a < 1 || a > ctx_.n)
                throw ParseError("coordinate " + id + " outside x1..x" + std::to_string(ctx_.n), at);
            return var_x(a);
        }
        if (auto j = jet_ident(id, at))
            return *j;
        static const std::map<std::string, BuiltinFn> fns{{"cos", BuiltinFn::Cos},
                                                          {"sin", BuiltinFn::Sin},
                                                          {"exp", BuiltinFn::Exp},
                                                          {"ln", BuiltinFn::Ln},
                                                          {"atan2", BuiltinFn::Atan2}};
        const FunctionSymbol* sym = ctx_.decls ? ctx_.decls->find(id) : nullptr;
        if (!sym) {
            if (auto it = fns.find(id); it != fns.end() && peek('('))
                return wrap(at, [&] { return builtin(it->second, call_args()); });
            if (id == "sgn" && peek('('))
                return wrap(at, [&] { return sign(single(call_args(), at)); });
            if (id == "conj" && peek('('))
                return conj(single(call_args(), at));
            if (id == "inv" && peek('(')) {
                auto args = call_args();
                if (args.size() != 2)
                    throw ParseError("inv takes two arguments", at);
                return wrap(at, [&] { return inverse(args[0], args[1]); });
            }
            throw UnknownSymbolError("unknown symbol '" + id + "'", at);
        }
        std::vector<int> deriv;
        if (accept('{')) {
            deriv.push_back(static_cast<int>(integer()));
            while (accept(','))
                deriv.push_back(static_cast<int>(integer()));
            expect('}');
        }
        std::vector<Expr> args;
        if ((*sym)->arity > 0)
            args = call_args();
        return wrap(at, [&] { return func(*sym, std::move(args), deriv); });
    }

    Expr single(std::vector<Expr> args, std::size_t at)
    {
        if (args.size() != 1)
            throw ParseError("expected one argument", at);
        return args[0];
    }

    template <class F>
    Expr wrap(std::size_t at, F&& f)
    {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(e.what(), at);
        }
    }

    std::string_view s_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

std::string rat(const Rational& r)
{
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1)
        s += "/" + std::to_string(r.denominator());
    return s;
}

std::string rat_atom(const Rational& r)
{
    if (r >= 0 && r.denominator() == 1)
        return rat(r);
    return "(" + rat(r) + ")";
}

std::string print_const(const CRational& c)
{
    if (c.im == 0)
        return rat_atom(c.re);
    std::string im = c.im == 1 ? "i" : rat_atom(c.im) + "*i";
    if (c.re == 0)
        return c.im == 1 ? "i" : "(" + im + ")";
    return "(" + rat_atom(c.re) + " + " + im + ")";
}

std::string exponent_text(const Rational& p)
{
    if (p > 0 && p.denominator() == 1)
        return rat(p);
    return "(" + rat(p) + ")";
}

// Precedence: 0 sum, 1 product, 2 power base.
std::string print_prec(const Expr& e, int prec);

std::string join_args(const std::vector<Expr>& args)
{
    std::string s;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            s += ", ";
        s += print_prec(args[i], 0);
    }
    return s;
}

std::string print_prec(const Expr& e, int prec)
{
    const Node& n = *e;
    switch (n.kind) {
    case Kind::Const:
        return print_const(n.value);
    case Kind::Var:
        return print_var(n.var);
    case Kind::Func: {
        std::string s = n.symbol->name;
        bool any = false;
        for (int d : n.deriv)
            any = any || d != 0;
        if (any) {
            s += "{";
            for (std::size_t i = 0; i < n.deriv.size(); ++i)
                s += (i ? "," : "") + std::to_string(n.deriv[i]);
            s += "}";
        }
        if (n.symbol->arity > 0)
            s += "(" + join_args(n.args) + ")";
        return s;
    }
    case Kind::Builtin: {
        static const char* names[] = {"cos", "sin", "exp", "ln", "atan2", "pi"};
        if (n.fn == BuiltinFn::Pi)
            return "pi";
        return std::string(names[static_cast<int>(n.fn)]) + "(" + join_args(n.args) + ")";
    }
    case Kind::Inverse:
        return "inv(" + join_args(n.args) + ")";
    case Kind::Sum: {
        std::string s;
        for (std::size_t i = 0; i < n.args.size(); ++i)
            s += (i ? " + " : "") + print_prec(n.args[i], 1);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case Kind::Product: {
        std::string s;
        for (std::size_t i = 0; i < n.args.size(); ++i)
            s += (i ? "*" : "") + print_prec(n.args[i], 2);
        return prec > 1 ? "(" + s + ")" : s;
    }
    case Kind::IntPow: {
        std::string s = print_prec(n.args[0], 3) + "^" + exponent_text(Rational(n.int_exp));
        return prec > 2 ? "(" + s + ")" : s;
    }
    case Kind::AbsPow: {
        std::string s = "|" + print_prec(n.args[0], 0) + "|";
        if (n.abs_exp != 1)
            s += "^" + exponent_text(n.abs_exp);
        return prec > 2 ? "(" + s + ")" : s;
    }
    case Kind::Sign:
        return "sgn(" + print_prec(n.args[0], 0) + ")";
    case Kind::Conj:
        return "conj(" + print_prec(n.args[0], 0) + ")";
    }
    throw std::logic_error("unknown node kind");
}

} // namespace

Expr parse(std::string_view text, const ParseContext& ctx)
{
    if (ctx.n < 1)
        throw std::invalid_argument("dimension n must be at least 1");
    return Parser(text, ctx).run();
}

std::string print(const Expr& e) { return print_prec(e, 0); }

std::string print_var(const VarId& v)
{
    switch (v.type) {
    case VarType::T:
        return "t";
    case VarType::X:
        return "x" + std::to_string(v.index);
    case VarType::Jet:
        break;
    }
    std::string s = v.conjugated ? "psistar" : "psi";
    if (v.order() == 0)
        return s;
    s += "_";
    for (std::size_t d = 0; d < v.alpha.size(); ++d) {
        if (d > 9)
            throw std::invalid_argument("jet names support at most 9 space directions");
        for (int k = 0; k < v.alpha[d]; ++k)
            s += d == 0 ? 't' : static_cast<char>('0' + d);
    }
    return s;
}

} // namespace linsym
