#include "linsym/cases.hpp"

#include "linsym/json_io.hpp"

#include <cctype>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace linsym {

extern const char* const builtin_cases_json;

namespace {

std::map<std::string, std::string> read_macros(const Json& j)
{
    std::map<std::string, std::string> out;
    if (!j.is_null() && !j.is_object())
        throw SchemaError("macros must be an object");
    if (j.is_object())
        for (const auto& [k, v] : j.items())
            out[k] = v.get<std::string>();
    return out;
}

std::vector<std::pair<std::string, std::string>> read_defines(const Json& j)
{
    std::vector<std::pair<std::string, std::string>> out;
    if (j.is_null())
        return out;
    if (!j.is_array())
        throw SchemaError("defines must be a list of [name, body] pairs");
    for (const auto& d : j) {
        if (!d.is_array() || d.size() != 2)
            throw SchemaError("defines must be a list of [name, body] pairs");
        out.emplace_back(d[0].get<std::string>(), d[1].get<std::string>());
    }
    return out;
}

CaseConstraint read_constraint(const Json& j)
{
    CaseConstraint c;
    c.text = j.value("text", "");
    if (j.contains("positive")) {
        c.kind = CaseConstraint::Kind::Positive;
        c.exprs.push_back(j["positive"].get<std::string>());
    } else if (j.contains("any_nonzero")) {
        c.kind = CaseConstraint::Kind::AnyNonzero;
        for (const auto& e : j["any_nonzero"])
            c.exprs.push_back(e.get<std::string>());
    } else {
        throw SchemaError("constraint needs \"positive\" or \"any_nonzero\"");
    }
    return c;
}

CaseEntry read_case(const Json& j)
{
    CaseEntry c;
    try {
        c.id = j.at("id").get<int>();
        c.potential = j.at("potential").get<std::string>();
        c.declarations = j.value("declarations", Json::array()).dump();
        c.macros = read_macros(j.value("macros", Json()));
        c.defines = read_defines(j.value("defines", Json()));
        for (const auto& g : j.at("generators")) {
            if (!g.is_object())
                throw SchemaError("generator must be an object");
            c.generators.push_back({g.value("label", ""), g.dump()});
        }
        for (const auto& v : j.value("variants", Json::array())) {
            CaseVariant var;
            var.label = v.value("label", "");
            var.macros = read_macros(v.value("macros", Json()));
            var.defines = read_defines(v.value("defines", Json()));
            c.variants.push_back(var);
        }
        for (const auto& k : j.value("constraints", Json::array()))
            c.constraints.push_back(read_constraint(k));
        for (const auto& s : j.value("notes", Json::array()))
            c.notes.push_back(s.get<std::string>());
        const Json& e = j.at("expected");
        if (!e.is_array() || e.size() != 5)
            throw SchemaError("expected must list k0, k1, k2, k3, r0");
        c.expected = {e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>(),
                      e[4].get<int>()};
    } catch (const Json::exception& ex) {
        throw SchemaError(std::string("case entry: ") + ex.what());
    }
    if (static_cast<int>(c.generators.size()) != c.expected.dim())
        throw SchemaError("case " + std::to_string(c.id) +
                          ": generator count differs from the expected dimension");
    return c;
}

bool ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'; }
bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }

std::string expand_rec(const std::string& text,
                       const std::vector<const std::map<std::string, std::string>*>& scopes, int depth)
{
    if (depth > 32)
        throw SchemaError("macro expansion too deep (cyclic macros?)");
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!ident_start(text[i])) {
            out += text[i++];
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && ident_char(text[j]))
            ++j;
        std::string tok = text.substr(i, j - i);
        const std::string* body = nullptr;
        for (const auto* s : scopes) {
            auto it = s->find(tok);
            if (it != s->end()) {
                body = &it->second;
                break;
            }
        }
        if (body)
            out += "(" + expand_rec(*body, scopes, depth + 1) + ")";
        else
            out += tok;
        i = j;
    }
    return out;
}

void expand_json_strings(Json& j, const std::vector<const std::map<std::string, std::string>*>& scopes)
{
    if (j.is_string())
        j = expand_macros(j.get<std::string>(), scopes);
    else if (j.is_array() || j.is_object())
        for (auto& v : j)
            expand_json_strings(v, scopes);
}

bool mentions(const Expr& e, const std::string& name) { return symbols(e).count(name) != 0; }

Expr apply_defines(Expr e, const std::vector<std::pair<std::string, Expr>>& defs)
{
    for (int round = 0; round < 16; ++round) {
        bool changed = false;
        for (const auto& [name, body] : defs) {
            if (mentions(e, name)) {
                e = subst_function(e, name, body);
                changed = true;
            }
        }
        if (!changed)
            return e;
    }
    throw SchemaError("definitions do not reach a fixed point");
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string fmt(const Complex& v) { return "(" + fmt(v.real()) + ", " + fmt(v.imag()) + ")"; }

std::string point_text(double t, const std::vector<double>& x)
{
    std::string s = "t=" + fmt(t) + " x=(";
    for (std::size_t a = 0; a < x.size(); ++a)
        s += (a ? ", " : "") + fmt(x[a]);
    return s + ")";
}

std::string witness_text(const Witness& w)
{
    return point_text(w.t, w.x) + " value=" + fmt(w.value) + " normalized=" + fmt(w.normalized);
}

} // namespace

// ---------------------------------------------------------------------------
// Table

CaseTable CaseTable::from_json_text(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& ex) {
        throw SchemaError(std::string("case table: ") + ex.what());
    }
    if (!j.is_object() || !j.contains("cases") || !j["cases"].is_array())
        throw SchemaError("case table must be an object with a \"cases\" list");
    CaseTable t;
    t.n_ = j.value("n", 2);
    t.macros_ = read_macros(j.value("macros", Json()));
    for (const auto& c : j["cases"])
        t.cases_.push_back(read_case(c));
    return t;
}

const CaseTable& CaseTable::builtin()
{
    static const CaseTable table = from_json_text(builtin_cases_json);
    return table;
}

const CaseEntry& CaseTable::at(int id) const
{
    for (const auto& c : cases_)
        if (c.id == id)
            return c;
    throw std::out_of_range("unknown case id " + std::to_string(id));
}

std::string expand_macros(const std::string& text,
                          const std::vector<const std::map<std::string, std::string>*>& scopes)
{
    return expand_rec(text, scopes, 0);
}

int variant_count(const CaseEntry& c) { return c.variants.empty() ? 1 : static_cast<int>(c.variants.size()); }

CaseInstance instantiate(const CaseTable& table, const CaseEntry& c, int variant)
{
    if (variant < 0 || variant >= variant_count(c))
        throw std::out_of_range("unknown variant");
    CaseInstance inst;
    inst.variant = variant;
    std::vector<const std::map<std::string, std::string>*> scopes;
    auto defines = c.defines;
    if (!c.variants.empty()) {
        const CaseVariant& v = c.variants[variant];
        inst.variant_label = v.label;
        scopes.push_back(&v.macros);
        // Variant definitions replace case definitions of the same name.
        for (const auto& d : v.defines) {
            bool replaced = false;
            for (auto& e : defines)
                if (e.first == d.first) {
                    e.second = d.second;
                    replaced = true;
                }
            if (!replaced)
                defines.push_back(d);
        }
    }
    scopes.push_back(&c.macros);
    scopes.push_back(&table.macros());

    inst.decls = Declarations::from_json_text(c.declarations);
    ParseContext ctx{table.n(), &inst.decls};
    std::vector<std::pair<std::string, Expr>> defs;
    for (const auto& [name, body] : defines) {
        if (!inst.decls.find(name))
            throw SchemaError("definition of undeclared symbol " + name);
        defs.emplace_back(name, parse(expand_macros(body, scopes), ctx));
    }
    auto build = [&](const std::string& s) { return apply_defines(parse(expand_macros(s, scopes), ctx), defs); };

    inst.potential = {table.n(), build(c.potential)};
    for (const auto& g : c.generators) {
        Json spec = Json::parse(g.spec);
        spec.erase("label");
        expand_json_strings(spec, scopes);
        GeneratorCoeffs coeffs = field_from_json(spec, ctx);
        auto fix = [&](Expr& e) { e = apply_defines(e, defs); };
        fix(coeffs.tau);
        for (auto& row : coeffs.kappa)
            for (auto& e : row)
                fix(e);
        for (auto& e : coeffs.chi)
            fix(e);
        fix(coeffs.sigma);
        fix(coeffs.rho);
        validate(coeffs);
        inst.labels.push_back(g.label);
        inst.generators.push_back(std::move(coeffs));
    }
    for (const auto& k : c.constraints) {
        CaseInstance::Constraint con{k.kind, {}, k.text};
        for (const auto& e : k.exprs)
            con.exprs.push_back(build(e));
        inst.constraints.push_back(std::move(con));
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Verification

CaseReport verify_case(const CaseTable& table, int id, const VerifyOptions& opt, Rng& rng)
{
    const CaseEntry& c = table.at(id);
    CaseReport rep;
    rep.id = id;
    rep.expected = c.expected;
    rep.notes = c.notes;

    const int nv = variant_count(c);
    std::vector<std::optional<CaseInstance>> insts(nv);
    std::vector<std::vector<Expr>> residuals(nv);

    auto fail = [&](const std::string& check, int draw, const std::string& detail) {
        rep.ok = false;
        rep.failures.push_back({check, false, draw, detail});
    };

    if (auto v = tuple_restriction_violation(c.expected))
        fail("restrictions", -1, "expected tuple " + c.expected.str() + ": " + *v);

    ZeroTestOptions zopt;
    zopt.n = table.n();
    zopt.bindings = 1;
    zopt.points = opt.points;
    zopt.tol = opt.tol;

    for (int draw = 0; draw < opt.draws; ++draw) {
        const int vi = draw % nv;
        if (!insts[vi]) {
            insts[vi] = instantiate(table, c, vi);
            for (const auto& g : insts[vi]->generators)
                residuals[vi].push_back(classifying_residual(insts[vi]->potential, g));
        }
        const CaseInstance& inst = *insts[vi];
        const std::string where = inst.variant_label.empty() ? "" : " [" + inst.variant_label + "]";
        ++rep.draws;

        SurrogateBinding b;
        std::vector<Expr> all = residuals[vi];
        all.push_back(inst.potential.expr);
        for (const auto& k : inst.constraints)
            all.insert(all.end(), k.exprs.begin(), k.exprs.end());
        b.bind_missing(all, rng);

        // (i) every generator is a symmetry.
        try {
            ZeroTestResult z = test_zero_with(residuals[vi], b, zopt, rng);
            rep.worst_residual = std::max(rep.worst_residual, z.max_normalized);
            if (!z.zero) {
                const Witness& w = *z.witness;
                fail("residual", draw,
                     "generator " + inst.labels[w.component] + where + " at " + witness_text(w));
            }
        } catch (const SamplingError& ex) {
            fail("residual", draw, std::string("sampling: ") + ex.what() + where);
        }

        // (ii), (iii) closure, kernel membership and invariant integers.
        InvariantTuple found;
        try {
            found = invariants(inst.generators, b, rng);
            if (!(found == c.expected))
                fail("tuple", draw, "found " + found.str() + ", expected " + c.expected.str() + where);
        } catch (const InvariantError& ex) {
            fail("closure", draw, std::string(ex.what()) + where);
        }
        rep.found.push_back(found);

        // (iv) restrictions on the computed tuple.
        if (found.dim() > 0)
            if (auto v = tuple_restriction_violation(found))
                fail("restrictions", draw, found.str() + ": " + *v);

        // Side conditions on the parameters.
        for (const auto& k : inst.constraints) {
            try {
                if (k.kind == CaseConstraint::Kind::Positive) {
                    for (int p = 0; p < opt.points; ++p) {
                        SamplePoint pt = draw_point(table.n(), k.exprs, zopt.domain, rng);
                        Complex v = eval(k.exprs.front(), b, pt);
                        if (!(v.real() > 0.0) || std::abs(v.imag()) > opt.tol * (1.0 + std::abs(v))) {
                            fail("constraint", draw, k.text + where + " violated at " +
                                                         point_text(pt.t, pt.x) + " value=" + fmt(v));
                            break;
                        }
                    }
                } else {
                    bool any = false;
                    for (const auto& e : k.exprs)
                        if (!test_zero_with({e}, b, zopt, rng).zero) {
                            any = true;
                            break;
                        }
                    if (!any)
                        fail("constraint", draw, k.text + where + " violated: all terms vanish");
                }
            } catch (const SamplingError& ex) {
                fail("constraint", draw, std::string("sampling: ") + ex.what() + where);
            }
        }
    }
    return rep;
}

std::string CaseReport::text() const
{
    std::ostringstream os;
    os << "case " << id << ": " << (ok ? "PASS" : "FAIL") << " expected " << expected.str();
    if (!found.empty())
        os << " found " << found.back().str();
    os << " draws " << draws << " worst residual " << fmt(worst_residual) << "\n";
    for (const auto& f : failures)
        os << "  FAIL " << f.check << " (case " << id << ", draw " << f.draw << "): " << f.detail << "\n";
    for (const auto& n : notes)
        os << "  note: " << n << "\n";
    return os.str();
}

std::string CaseReport::json() const
{
    auto tuple = [](const InvariantTuple& t) { return Json::array({t.k0, t.k1, t.k2, t.k3, t.r0}); };
    Json j;
    j["id"] = id;
    j["ok"] = ok;
    j["draws"] = draws;
    j["expected"] = tuple(expected);
    j["found"] = Json::array();
    for (const auto& t : found)
        j["found"].push_back(tuple(t));
    j["worst_residual"] = worst_residual;
    j["failures"] = Json::array();
    for (const auto& f : failures)
        j["failures"].push_back({{"check", f.check}, {"case", id}, {"draw", f.draw}, {"detail", f.detail}});
    j["notes"] = notes;
    return j.dump();
}

} // namespace linsym
