#include "doctest.h"

#include "linsym/cases.hpp"
#include "linsym/json_io.hpp"
#include "linsym/parse.hpp"

using namespace linsym;

TEST_CASE("case table loads")
{
    const CaseTable& t = CaseTable::builtin();
    REQUIRE(t.cases().size() == 20);
    for (int id = 0; id < 20; ++id) {
        const CaseEntry& c = t.at(id);
        CHECK(c.id == id);
        CHECK(static_cast<int>(c.generators.size()) == c.expected.dim());
        CHECK(c.expected.k0 == 2);
        CHECK_FALSE(tuple_restriction_violation(c.expected));
        for (int v = 0; v < variant_count(c); ++v)
            CHECK_NOTHROW(instantiate(t, c, v));
    }
    CHECK_THROWS_AS(t.at(20), std::out_of_range);
}

TEST_CASE("macro expansion")
{
    std::map<std::string, std::string> outer{{"r2", "x1^2 + x2^2"}, {"z", "a"}};
    std::map<std::string, std::string> inner{{"z", "r2*t"}};
    CHECK(expand_macros("r2^(-1)", {&outer}) == "(x1^2 + x2^2)^(-1)");
    CHECK(expand_macros("U(z) + r2f(t)", {&inner, &outer}) == "U(((x1^2 + x2^2)*t)) + r2f(t)");
    std::map<std::string, std::string> cyc{{"a", "b"}, {"b", "a"}};
    CHECK_THROWS_AS(expand_macros("a", {&cyc}), SchemaError);
}

TEST_CASE("malformed tables are rejected")
{
    CHECK_THROWS_AS(CaseTable::from_json_text("[]"), SchemaError);
    CHECK_THROWS_AS(CaseTable::from_json_text("{\"cases\": [{\"id\": 0}]}"), SchemaError);
    CHECK_THROWS_AS(CaseTable::from_json_text(R"j({"cases": [{"id": 0, "potential": "0",
        "generators": [{"sigma": 1}], "expected": [2, 0, 0, 0, 0]}]})j"),
                    SchemaError);
}

TEST_CASE("case 7 verifies with the documented tuple")
{
    Rng rng(11);
    CaseReport r = verify_case(CaseTable::builtin(), 7, {}, rng);
    MESSAGE(r.text());
    CHECK(r.ok);
    CHECK(r.draws == 5);
    for (const auto& t : r.found)
        CHECK(t == InvariantTuple{2, 0, 1, 3, 0});
}

TEST_CASE("every case verifies")
{
    Rng rng(12);
    for (int id = 0; id < 20; ++id) {
        CaseReport r = verify_case(CaseTable::builtin(), id, {}, rng);
        CHECK_MESSAGE(r.ok, r.text());
        CHECK(r.worst_residual < 1e-8);
    }
}

TEST_CASE("a wrong generator is reported with a witness")
{
    std::string text = R"j({"cases": [{"id": 9, "potential": "U(x2) + i*beta*x1",
        "declarations": [{"name": "U", "arity": 1, "codomain": "complex"},
                         {"name": "beta", "arity": 0, "codomain": "real", "range": [0.5, 1]}],
        "generators": [{"sigma": 1}, {"rho": 1},
                       {"label": "P(1,0)+beta tI", "chi": [1, 0], "rho": "beta*t"},
                       {"label": "P(t,0)-beta/2 t^2 I", "chi": ["t", 0], "rho": "-beta/2*t^2"},
                       {"label": "D(1)", "tau": 1}],
        "expected": [2, 2, 0, 1, 1]}]})j";
    CaseTable t = CaseTable::from_json_text(text);
    Rng rng(13);
    CaseReport r = verify_case(t, 9, {}, rng);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.failures.empty());
    CHECK(r.failures.front().check == "residual");
    CHECK(r.failures.front().detail.find("P(1,0)+beta tI") != std::string::npos);
    CHECK(r.failures.front().detail.find("x=(") != std::string::npos);
}

TEST_CASE("a tiny tolerance makes verification fail with sample points")
{
    Rng rng(14);
    VerifyOptions opt;
    opt.draws = 1;
    opt.tol = 1e-30;
    CaseReport r = verify_case(CaseTable::builtin(), 4, opt, rng);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.failures.empty());
    CHECK(r.failures.front().detail.find("t=") != std::string::npos);
}

TEST_CASE("reports are deterministic under a fixed seed")
{
    VerifyOptions opt;
    opt.draws = 2;
    Rng a(15), b(15);
    CHECK(verify_case(CaseTable::builtin(), 13, opt, a).json() ==
          verify_case(CaseTable::builtin(), 13, opt, b).json());
}

namespace {

bool symmetric(const std::string& decls, const std::string& v, const std::string& field, Rng& rng)
{
    Declarations d = Declarations::from_json_text(decls);
    ParseContext ctx{2, &d};
    Potential V{2, parse(v, ctx)};
    GeneratorCoeffs g = field_from_json_text(field, ctx);
    ZeroTestOptions opt;
    opt.bindings = 3;
    opt.points = 50;
    return test_zero(classifying_residual(V, g), opt, rng).zero;
}

} // namespace

TEST_CASE("sign-corrected entries: the alternative signs are not symmetries")
{
    Rng rng(16);
    const std::string d10 = R"j([{"name": "U", "arity": 1, "codomain": "complex"},
                                {"name": "beta", "arity": 0, "codomain": "real", "range": [0.5, 1]}])j";
    const std::string v10 = "t^(-1)*U(|t|^(-1/2)*x2) + i*beta*|t|^(-3/2)*x1";
    CHECK(symmetric(d10, v10, R"j({"chi": [1, 0], "rho": "2*beta*t*|t|^(-3/2)"})j", rng));
    CHECK_FALSE(symmetric(d10, v10, R"j({"chi": [1, 0], "rho": "-2*beta*t*|t|^(-3/2)"})j", rng));

    const std::string d14 = R"j([{"name": "U", "arity": 1, "codomain": "complex"},
                                {"name": "alpha", "arity": 0, "codomain": "real"},
                                {"name": "beta", "arity": 0, "codomain": "real", "range": [0.5, 1]}])j";
    const std::string w1 = "(x1*cos(t) + x2*sin(t))", w2 = "(-x1*sin(t) + x2*cos(t))";
    const std::string field14 =
        R"j({"chi": ["exp(beta*t)*cos(t)", "exp(beta*t)*sin(t)"], "rho": "alpha*exp(beta*t)"})j";
    const std::string good = "U(" + w2 + ") + 1/4*(beta^2 - 1)*" + w1 + "^2 + beta*" + w1 + "*" + w2 +
                             " - i*alpha*beta*" + w1;
    const std::string other = "U(" + w2 + ") + 1/4*(beta - 1)*" + w1 + "^2 - beta*" + w1 + "*" + w2 +
                              " - i*alpha*beta*" + w1;
    CHECK(symmetric(d14, good, field14, rng));
    CHECK_FALSE(symmetric(d14, other, field14, rng));
    CHECK(symmetric(d14, good, R"j({"tau": 1, "J": 1})j", rng));
}
