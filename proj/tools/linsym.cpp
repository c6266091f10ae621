// Command-line entry point: verification of the classification table, single
// residuals and brackets, transformations, invariant tuples and groupoid
// models. Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.

#include "linsym/cases.hpp"
#include "linsym/conditions.hpp"
#include "linsym/equiv.hpp"
#include "linsym/groupoid.hpp"
#include "linsym/json_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace linsym;

namespace {

struct RunConfig {
    int n = 2;
    int trials = 5;
    int bindings = 2;
    int points = 100;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string format = "text";
};

class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Literal text, or the contents of a file when prefixed with '@'.
std::string read_arg(const std::string& value)
{
    if (value.empty() || value[0] != '@')
        return value;
    std::ifstream in(value.substr(1));
    if (!in)
        throw InputError("cannot open " + value.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError("invalid JSON in " + what + ": " + e.what());
    }
}

Declarations read_decls(const std::string& arg)
{
    if (arg.empty())
        return {};
    return Declarations::from_json_text(read_arg(arg));
}

GeneratorCoeffs read_field(const std::string& arg, const ParseContext& ctx)
{
    return field_from_json(parse_json(read_arg(arg), "field spec"), ctx);
}

std::string witness_text(const Witness& w)
{
    std::ostringstream os;
    os << "binding " << w.binding << ", component " << w.component << ", t=" << fmt(w.t) << ", x=(";
    for (std::size_t a = 0; a < w.x.size(); ++a)
        os << (a ? ", " : "") << fmt(w.x[a]);
    os << "), value=" << fmt(w.value.real()) << (w.value.imag() < 0 ? "-" : "+") << fmt(std::abs(w.value.imag()))
       << "i, normalized=" << fmt(w.normalized);
    return os.str();
}

Json witness_json(const Witness& w)
{
    return {{"binding", w.binding}, {"component", w.component}, {"t", w.t},
            {"x", w.x},             {"re", w.value.real()},     {"im", w.value.imag()},
            {"normalized", w.normalized}};
}

ZeroTestOptions zero_options(const RunConfig& cfg)
{
    ZeroTestOptions opt;
    opt.n = cfg.n;
    opt.bindings = cfg.bindings;
    opt.points = cfg.trials;
    opt.tol = cfg.tol;
    return opt;
}

/// Prints either the text lines or the JSON document and returns the exit code.
int emit(const RunConfig& cfg, bool ok, const std::string& text, const Json& json)
{
    if (cfg.format == "json")
        std::cout << json.dump(2) << "\n";
    else
        std::cout << text;
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_verify_cases(const RunConfig& cfg, const std::vector<int>& ids, const std::string& name)
{
    if (cfg.n != 2)
        throw InputError("the classification table is for n = 2");
    const CaseTable& table = CaseTable::builtin();
    VerifyOptions opt;
    opt.draws = cfg.trials;
    opt.points = cfg.points;
    opt.tol = cfg.tol;
    std::string text;
    Json cases = Json::array();
    int passed = 0;
    for (int id : ids) {
        Rng rng(cfg.seed + static_cast<std::uint64_t>(id));
        CaseReport r = verify_case(table, id, opt, rng);
        passed += r.ok;
        text += r.text();
        cases.push_back(Json::parse(r.json()));
    }
    const bool ok = passed == static_cast<int>(ids.size());
    text += name + ": " + std::to_string(passed) + "/" + std::to_string(ids.size()) + " cases pass\n";
    Json j{{"command", name}, {"ok", ok}, {"passed", passed}, {"cases", cases}};
    return emit(cfg, ok, text, j);
}

int cmd_residual(const RunConfig& cfg, const std::string& potential, const std::string& field,
                 const std::string& decls_arg)
{
    Declarations decls = read_decls(decls_arg);
    ParseContext ctx{cfg.n, &decls};
    Potential V{cfg.n, parse(read_arg(potential), ctx)};
    GeneratorCoeffs g = read_field(field, ctx);
    Rng rng(cfg.seed);
    ZeroTestResult z = test_zero(classifying_residual(V, g), zero_options(cfg), rng);
    std::string text = std::string("residual: ") + (z.zero ? "zero" : "nonzero") +
                       " (max normalized " + fmt(z.max_normalized) + ")\n";
    Json j{{"command", "residual"}, {"zero", z.zero}, {"max_normalized", z.max_normalized}};
    if (z.witness) {
        text += "FAIL residual: witness " + witness_text(*z.witness) + "\n";
        j["witness"] = witness_json(*z.witness);
    }
    return emit(cfg, z.zero, text, j);
}

int cmd_bracket(const RunConfig& cfg, const std::string& f1, const std::string& f2, const std::string& decls_arg)
{
    Declarations decls = read_decls(decls_arg);
    ParseContext ctx{cfg.n, &decls};
    GeneratorCoeffs g1 = read_field(f1, ctx), g2 = read_field(f2, ctx);
    GeneratorCoeffs b = bracket_structural(g1, g2);
    VectorField diff = expand(b) - bracket_generic(expand(g1), expand(g2));
    Rng rng(cfg.seed);
    ZeroTestResult z = test_zero(diff.components(), zero_options(cfg), rng);
    std::string text = "bracket: " + field_to_json(b).dump() + "\n" +
                       "structural and generic brackets " + (z.zero ? "agree" : "differ") + "\n";
    Json j{{"command", "bracket"}, {"bracket", field_to_json(b)}, {"agrees", z.zero}};
    if (z.witness) {
        text += "FAIL bracket: witness " + witness_text(*z.witness) + "\n";
        j["witness"] = witness_json(*z.witness);
    }
    return emit(cfg, z.zero, text, j);
}

int cmd_transform(const RunConfig& cfg, const std::string& potential, const std::string& spec,
                  const std::string& decls_arg)
{
    Declarations decls = read_decls(decls_arg);
    ParseContext ctx{cfg.n, &decls};
    Potential V{cfg.n, parse(read_arg(potential), ctx)};
    EquivTransformation tr = transformation_from_json_text(read_arg(spec), ctx);
    Potential target = act_on_potential(V, tr);

    // Spot check: the target at the image point against the formula in the
    // source variables.
    Expr in_source = target_potential_in_source(V.expr, tr);
    std::vector<Expr> image{tr.T};
    for (int a = 0; a < cfg.n; ++a) {
        std::vector<Expr> terms;
        for (int b = 0; b < cfg.n; ++b)
            terms.push_back(tr.O[a][b] * var_x(b + 1));
        image.push_back(pow_abs(diff_t(tr.T), Rational(1, 2)) * sum(std::move(terms)) + tr.X[a]);
    }
    Rng rng(cfg.seed);
    SurrogateBinding binding;
    std::vector<Expr> all{target.expr, in_source};
    all.insert(all.end(), image.begin(), image.end());
    binding.bind_missing(all, rng);

    std::ostringstream text;
    text << "target: " << print(target.expr) << "\n";
    text << "spot check (t, x) -> (t~, x~): target vs formula\n";
    Json rows = Json::array();
    bool ok = true;
    const int rows_wanted = std::min(cfg.trials, 5);
    for (int k = 0, tries = 0; k < rows_wanted && tries < 50 * rows_wanted; ++tries) {
        SamplePoint p = draw_point(cfg.n, all, SampleDomain{}, rng);
        SamplePoint q;
        bool unsafe = false;
        auto value = [&](const Expr& e, const SamplePoint& at) {
            EvalResult r = evaluate(e, binding, at);
            unsafe = unsafe || r.unsafe;
            return r;
        };
        q.t = value(image[0], p).value.real();
        for (int a = 1; a <= cfg.n; ++a)
            q.x.push_back(value(image[a], p).value.real());
        EvalResult lhs = value(target.expr, q);
        EvalResult rhs = value(in_source, p);
        if (unsafe)
            continue;
        ++k;
        const double d = std::abs(lhs.value - rhs.value) / (1.0 + std::max(lhs.scale, rhs.scale));
        ok = ok && d <= std::max(cfg.tol, 1e-8);
        text << "  (" << fmt(p.t);
        for (double x : p.x)
            text << ", " << fmt(x);
        text << ") -> (" << fmt(q.t);
        for (double x : q.x)
            text << ", " << fmt(x);
        text << "): " << fmt(lhs.value.real()) << (lhs.value.imag() < 0 ? "-" : "+")
             << fmt(std::abs(lhs.value.imag())) << "i vs " << fmt(rhs.value.real())
             << (rhs.value.imag() < 0 ? "-" : "+") << fmt(std::abs(rhs.value.imag())) << "i, diff " << fmt(d)
             << "\n";
        rows.push_back({{"source", Json{{"t", p.t}, {"x", p.x}}},
                        {"image", Json{{"t", q.t}, {"x", q.x}}},
                        {"target", {lhs.value.real(), lhs.value.imag()}},
                        {"formula", {rhs.value.real(), rhs.value.imag()}},
                        {"diff", d}});
    }
    if (!ok)
        text << "FAIL transform: spot check differs\n";
    Json j{{"command", "transform"}, {"target", print(target.expr)}, {"ok", ok}, {"spot_check", rows}};
    return emit(cfg, ok, text.str(), j);
}

int cmd_invariants(const RunConfig& cfg, const std::string& fields_arg, int case_id)
{
    std::vector<GeneratorCoeffs> gs;
    std::vector<std::string> labels;
    int n = cfg.n;
    if (case_id >= 0) {
        const CaseTable& table = CaseTable::builtin();
        CaseInstance inst = instantiate(table, table.at(case_id), 0);
        gs = inst.generators;
        labels = inst.labels;
        n = table.n();
    } else {
        Json j = parse_json(read_arg(fields_arg), "fields file");
        if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array())
            throw SchemaError("a fields file is {\"n\", \"declarations\", \"generators\": [...]}");
        if (j.contains("n"))
            n = j["n"].get<int>();
        Declarations decls = j.contains("declarations") ? declarations_from_json(j["declarations"]) : Declarations{};
        ParseContext ctx{n, &decls};
        for (const auto& g : j["generators"]) {
            gs.push_back(field_from_json(g, ctx));
            labels.push_back(g.value("label", "g" + std::to_string(labels.size())));
        }
    }
    Rng rng(cfg.seed);
    SurrogateBinding binding;
    InvariantTuple t;
    try {
        t = invariants(gs, binding, rng);
    } catch (const InvariantError& e) {
        std::string text = std::string("FAIL invariants: ") + e.what() + "\n";
        return emit(cfg, false, text, Json{{"command", "invariants"}, {"ok", false}, {"error", e.what()}});
    }
    std::optional<std::string> bad = tuple_restriction_violation(t);
    const bool ok = !bad;
    std::string text = "invariants " + t.str() + " dim " + std::to_string(t.dim()) + "\n";
    if (bad)
        text += "FAIL restrictions: " + *bad + "\n";
    Json j{{"command", "invariants"},
           {"ok", ok},
           {"tuple", {t.k0, t.k1, t.k2, t.k3, t.r0}},
           {"dim", t.dim()},
           {"generators", labels}};
    if (bad)
        j["violation"] = *bad;
    return emit(cfg, ok, text, j);
}

int cmd_groupoid(const RunConfig& cfg, const std::string& path, const std::string& check)
{
    GroupoidModel m = load_groupoid_model(path);
    std::vector<GroupoidCheck> results;
    if (check == "all") {
        results = run_groupoid_checks(m);
    } else {
        for (const auto& c : run_groupoid_checks(m))
            if (c.name == check)
                results.push_back(c);
        if (results.empty())
            throw InputError("unknown check " + check);
    }
    bool ok = true;
    std::string text;
    Json checks = Json::array();
    for (const auto& c : results) {
        ok = ok && c.holds;
        text += c.name + ": " + (c.holds ? "true" : "false");
        if (!c.holds)
            text += " (" + c.detail + ")";
        text += "\n";
        checks.push_back({{"check", c.name}, {"holds", c.holds}, {"detail", c.detail}});
    }
    Json j{{"command", "groupoid"},
           {"objects", m.G.objects()},
           {"arrows", m.G.arrows()},
           {"ok", ok},
           {"checks", checks}};
    return emit(cfg, ok, text, j);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symmetry and equivalence checks for linear Schroedinger equations"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or INI file with default flag values");

    RunConfig cfg;
    app.add_option("--n", cfg.n, "space dimension")->check(CLI::PositiveNumber);
    app.add_option("--trials", cfg.trials, "draws per case, or sample points per binding")
        ->check(CLI::PositiveNumber);
    app.add_option("--bindings", cfg.bindings, "surrogate bindings per zero test")->check(CLI::PositiveNumber);
    app.add_option("--points", cfg.points, "sample points per draw in table checks")->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "normalized residual tolerance");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));

    auto* verify_table = app.add_subcommand("verify-table", "verify every case of the classification table");
    int case_id = -1;
    auto* verify_case_cmd = app.add_subcommand("verify-case", "verify one case of the table");
    verify_case_cmd->add_option("--id", case_id, "case id")->required();

    std::string potential, field, field2, decls, spec, fields, model, check = "all";
    auto* residual = app.add_subcommand("residual", "classifying residual of a potential and a generator");
    residual->add_option("--potential", potential, "potential, or @file")->required();
    residual->add_option("--field", field, "field spec JSON, or @file")->required();
    residual->add_option("--decls", decls, "declarations JSON, or @file");

    auto* bracket = app.add_subcommand("bracket", "bracket of two generators");
    bracket->add_option("--field1", field, "field spec JSON, or @file")->required();
    bracket->add_option("--field2", field2, "field spec JSON, or @file")->required();
    bracket->add_option("--decls", decls, "declarations JSON, or @file");

    auto* transform = app.add_subcommand("transform", "apply an equivalence transformation to a potential");
    transform->add_option("--potential", potential, "potential, or @file")->required();
    transform->add_option("--transformation", spec, "transformation JSON, or @file")->required();
    transform->add_option("--decls", decls, "declarations JSON, or @file");

    int inv_case = -1;
    auto* inv = app.add_subcommand("invariants", "invariant tuple of a span of generators");
    auto* inv_fields = inv->add_option("--fields", fields, "fields JSON file");
    auto* inv_case_opt = inv->add_option("--case", inv_case, "use the generators of a table case");
    inv_fields->excludes(inv_case_opt);

    auto* groupoid = app.add_subcommand("groupoid", "checks on a finite groupoid model");
    groupoid->add_option("--model", model, "model JSON file")->required()->check(CLI::ExistingFile);
    groupoid->add_option("--check", check, "check name or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*verify_table) {
            std::vector<int> ids;
            for (const auto& c : CaseTable::builtin().cases())
                ids.push_back(c.id);
            return cmd_verify_cases(cfg, ids, "verify-table");
        }
        if (*verify_case_cmd) {
            CaseTable::builtin().at(case_id);
            return cmd_verify_cases(cfg, {case_id}, "verify-case");
        }
        if (*residual)
            return cmd_residual(cfg, potential, field, decls);
        if (*bracket)
            return cmd_bracket(cfg, field, field2, decls);
        if (*transform)
            return cmd_transform(cfg, potential, spec, decls);
        if (*inv) {
            if (inv_case < 0 && fields.empty())
                throw InputError("invariants needs --fields or --case");
            return cmd_invariants(cfg, inv_case < 0 ? "@" + fields : "", inv_case);
        }
        if (*groupoid)
            return cmd_groupoid(cfg, model, check);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const NotUniform& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: unknown case id\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
