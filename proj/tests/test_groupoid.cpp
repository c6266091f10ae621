#include "doctest.h"

#include "linsym/groupoid.hpp"

#include "json.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

using namespace linsym;
using Json = nlohmann::json;

namespace {

std::string fixture_path(const std::string& name) { return std::string(LINSYM_DATA_DIR) + "/groupoids/" + name + ".json"; }

Json fixture_json(const std::string& name)
{
    std::ifstream in(fixture_path(name));
    REQUIRE(in);
    return Json::parse(in);
}

GroupoidModel model(const Json& j) { return groupoid_model_from_json_text(j.dump()); }

std::vector<bool> truth(const GroupoidModel& m)
{
    std::vector<bool> out;
    for (const auto& c : run_groupoid_checks(m))
        out.push_back(c.holds);
    return out;
}

// Two objects, C2 at each, no arrows between them.
const char* kLoopsOnly = R"j({
  "objects": ["u", "v"],
  "arrows": [{"src": "u", "label": "u1", "tgt": "u"}, {"src": "u", "label": "uk", "tgt": "u"},
             {"src": "v", "label": "v1", "tgt": "v"}, {"src": "v", "label": "vk", "tgt": "v"}],
  "mult": [["u1", "u1", "u1"], ["u1", "uk", "uk"], ["uk", "u1", "uk"], ["uk", "uk", "u1"],
           ["v1", "v1", "v1"], ["v1", "vk", "vk"], ["vk", "v1", "vk"], ["vk", "vk", "v1"]],
  "H": ["u1", "v1"],
  "N": {"u": ["u1", "uk"], "v": ["v1", "vk"]}
})j";

} // namespace

TEST_CASE("shipped fixtures give the documented truth table")
{
    // uniform, semi-normalized, disjoint, factorization, splitting, extension
    const std::vector<std::pair<std::string, std::vector<bool>>> table{
        {"normalized", {true, true, true, true, true, true}},
        {"disjoint", {true, true, true, true, true, true}},
        {"kernel_shared", {true, true, false, true, false, true}},
        {"non_semi", {true, false, false, false, false, false}},
    };
    for (const auto& [name, want] : table) {
        CAPTURE(name);
        GroupoidModel m = load_groupoid_model(fixture_path(name));
        CHECK(truth(m) == want);
        for (const auto& c : run_groupoid_checks(m))
            if (!c.holds)
                CHECK(!c.detail.empty());
    }
}

TEST_CASE("fixtures respect the size cap and load in time")
{
    auto start = std::chrono::steady_clock::now();
    for (const char* name : {"normalized", "disjoint", "kernel_shared", "non_semi"}) {
        GroupoidModel m = load_groupoid_model(fixture_path(name));
        CHECK(m.G.objects() <= 8);
        CHECK(m.G.arrows() <= 200);
        run_groupoid_checks(m);
        semi_normalized_consequences(m);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 5.0);
}

TEST_CASE("consequences of semi-normalization hold on every semi-normalized fixture")
{
    for (const char* name : {"normalized", "disjoint", "kernel_shared"}) {
        CAPTURE(name);
        GroupoidModel m = load_groupoid_model(fixture_path(name));
        REQUIRE(check_semi_normalized(m).holds);
        for (const auto& c : semi_normalized_consequences(m)) {
            CAPTURE(c.name);
            CHECK(c.holds);
        }
    }
}

TEST_CASE("a twisted family is not uniform")
{
    Json j = fixture_json("normalized");
    // Stabilizer of a at a, trivial elsewhere: not carried along the arrows.
    j["N"]["a"] = {"a:e", "a:s0"};
    GroupoidModel m = model(j);
    GroupoidCheck u = check_uniform(m);
    CHECK_FALSE(u.holds);
    CHECK(u.detail.find("at arrow") != std::string::npos);
    CHECK_THROWS_AS(check_semi_normalized(m), NotUniform);
    CHECK_THROWS_AS(check_disjoint(m), NotUniform);
    auto all = run_groupoid_checks(m);
    for (const auto& c : all)
        CHECK_FALSE(c.holds);
}

TEST_CASE("uniformity with trivial and with full vertex groups")
{
    GroupoidModel m = load_groupoid_model(fixture_path("normalized"));
    CHECK(check_uniform(m).holds);

    // Full vertex groups: uniform iff conjugation along H preserves them,
    // decided here by a direct double loop.
    for (int o = 0; o < m.G.objects(); ++o)
        m.N[o] = m.G.loops(o);
    bool normal = true;
    for (int T : m.H) {
        const Arrow& a = m.G.arrow(T);
        for (int n : m.N[a.src]) {
            int moved = m.G.compose(m.G.compose(m.G.inverse(T), n), T);
            normal = normal && m.N[a.tgt].count(moved);
        }
    }
    CHECK(check_uniform(m).holds == normal);
    CHECK(normal);
}

TEST_CASE("degenerate model: H is only the units and the whole groupoid is N")
{
    GroupoidModel m = groupoid_model_from_json_text(kLoopsOnly);
    CHECK(check_uniform(m).holds);
    CHECK(check_semi_normalized(m).holds);
    CHECK(check_disjoint(m).holds);
    CHECK(check_splitting(m).holds);
}

TEST_CASE("frobenius product")
{
    Json j = fixture_json("kernel_shared");
    GroupoidModel m = model(j);
    const FiniteGroupoid& G = m.G;
    const ArrowSet units = G.unit_set();
    CHECK(frobenius_product(G, units, m.H) == m.H);
    CHECK(frobenius_product(G, m.H, units) == m.H);

    // Oracle: scan the listed multiplication triples directly.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        ArrowSet A, B;
        for (int a = 0; a < G.arrows(); ++a) {
            if (rng() % 4 == 0)
                A.insert(a);
            if (rng() % 4 == 0)
                B.insert(a);
        }
        ArrowSet want;
        for (const auto& t : j.at("mult")) {
            int a = G.find_arrow(t[0]), b = G.find_arrow(t[1]);
            if (A.count(a) && B.count(b))
                want.insert(G.find_arrow(t[2]));
        }
        CHECK(frobenius_product(G, A, B) == want);
    }
}

TEST_CASE("extension with a larger subgroupoid and the kernel")
{
    GroupoidModel m = load_groupoid_model(fixture_path("disjoint"));
    REQUIRE(m.H_bar);
    CHECK(check_extension(m).holds);
    m.H_bar.reset();
    CHECK(check_extension(m).holds);

    // An H_bar that is not closed is rejected.
    GroupoidModel bad = load_groupoid_model(fixture_path("disjoint"));
    bad.H_bar = bad.G.unit_set();
    CHECK_THROWS_AS(check_extension(bad), SchemaError);
}

TEST_CASE("malformed model files")
{
    Json base = fixture_json("normalized");
    auto rejects = [](const Json& j) {
        CHECK_THROWS_AS(groupoid_model_from_json_text(j.dump()), SchemaError);
    };
    CHECK_THROWS_AS(groupoid_model_from_json_text("{"), SchemaError);
    CHECK_THROWS_AS(groupoid_model_from_json_text("[]"), SchemaError);
    CHECK_THROWS_AS(load_groupoid_model("/nonexistent/model.json"), SchemaError);

    Json j = base;
    j.erase("mult");
    rejects(j);
    j = base;
    j["extra"] = 1;
    rejects(j);
    j = base;
    j["H"].push_back("nope");
    rejects(j);
    j = base;
    j["mult"].erase(j["mult"].begin());
    rejects(j); // missing product
    j = base;
    j["mult"][0][2] = j["mult"][1][2];
    rejects(j); // conflicting or wrongly placed product
    j = base;
    j["N"]["a"] = {"a:s0"};
    rejects(j); // not a subgroup
    j = base;
    j["N"]["a"] = {"a:e", "a:r"};
    rejects(j); // a:r moves a
    j = base;
    j["H"] = {"a:e", "b:e"};
    rejects(j); // not wide
    j = base;
    j["objects"] = Json::array();
    for (int k = 0; k < 9; ++k)
        j["objects"].push_back("o" + std::to_string(k));
    rejects(j);

    // A table without inverses: the monoid {1, z} with z*z = z.
    Json mono = Json::parse(R"j({"objects": ["u"],
      "arrows": [{"src": "u", "label": "1", "tgt": "u"}, {"src": "u", "label": "z", "tgt": "u"}],
      "mult": [["1", "1", "1"], ["1", "z", "z"], ["z", "1", "z"], ["z", "z", "z"]],
      "H": ["1"]})j");
    rejects(mono);
}
