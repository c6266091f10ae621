// Acceptance run: one PASS/FAIL line per criterion; exit code 1 if any fails.

#include "linsym/cases.hpp"
#include "linsym/equiv.hpp"
#include "linsym/fixtures.hpp"
#include "linsym/groupoid.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace linsym;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    std::vector<std::string> failures;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome from_report(const PropertyReport& r, const std::string& detail)
{
    return {r.ok, detail + ", worst residual " + fmt(r.worst), r.failures};
}

Outcome table()
{
    const CaseTable& t = CaseTable::builtin();
    VerifyOptions opt; // 5 draws x 100 points, tol 1e-8
    Outcome o;
    int passed = 0;
    double worst = 0.0;
    auto start = std::chrono::steady_clock::now();
    for (const auto& c : t.cases()) {
        Rng rng(1000 + c.id);
        CaseReport r = verify_case(t, c.id, opt, rng);
        worst = std::max(worst, r.worst_residual);
        if (r.ok)
            ++passed;
        else
            o.failures.push_back(r.text());
    }
    const double secs = seconds_since(start);
    o.ok = passed == static_cast<int>(t.cases().size()) && secs < 60.0;
    o.detail = std::to_string(passed) + "/" + std::to_string(t.cases().size()) + " cases, " +
               std::to_string(opt.draws) + " draws x " + std::to_string(opt.points) + " points, worst residual " +
               fmt(worst) + ", " + fmt(secs) + " s (limit 60 s)";
    return o;
}

Outcome brackets()
{
    Rng rng(2);
    auto start = std::chrono::steady_clock::now();
    PropertyReport r = check_bracket_oracle(50, 20, rng);
    const double secs = seconds_since(start);
    Outcome o = from_report(r, "50 pairs, 20 Jacobi triples, " + fmt(secs) + " s (limit 10 s)");
    o.ok = o.ok && secs < 10.0;
    return o;
}

Outcome prolongation()
{
    Rng rng(3);
    PropertyReport r = check_prolongation_oracle(52, rng);
    Outcome o = from_report(r, std::to_string(r.fixtures) + " pairs, " + std::to_string(r.rejected) +
                                   " non-symmetries rejected by both");
    o.ok = o.ok && r.fixtures >= 50 && r.rejected >= 10;
    return o;
}

Outcome groupoid_laws()
{
    Rng rng(4);
    PropertyReport laws = check_groupoid_laws(20, rng);
    PropertyReport eq = check_equivariance(20, rng);
    Outcome o;
    o.ok = laws.ok && eq.ok && laws.fixtures >= 20 && eq.fixtures >= 20;
    o.detail = std::to_string(laws.fixtures) + " transformation triples, " + std::to_string(eq.fixtures) +
               " equivariance fixtures, worst residual " + fmt(std::max(laws.worst, eq.worst));
    o.failures = laws.failures;
    o.failures.insert(o.failures.end(), eq.failures.begin(), eq.failures.end());
    return o;
}

Outcome algebra()
{
    Rng rng(5);
    PropertyReport r = check_equivalence_algebra(rng);
    Outcome o = from_report(r, std::to_string(r.fixtures) + " families, relative tol 1e-4");
    o.detail = std::to_string(r.fixtures) + " families, worst relative deviation " + fmt(r.worst) + " (tol 1e-4)";
    o.ok = o.ok && r.fixtures == 5;
    return o;
}

Outcome dimensions()
{
    Rng rng(6);
    PropertyReport r = check_dimension_facts(rng);
    Outcome o{r.ok, std::to_string(r.fixtures) + " cases; case 19 dim = 10 = n(n+3)/2+5", r.failures};
    o.ok = o.ok && r.fixtures == 20;
    return o;
}

Outcome real_subclass()
{
    Rng rng(7);
    PropertyReport r = check_real_subclass(10, rng);
    Outcome o = from_report(r, std::to_string(r.fixtures) + " fixtures, " + std::to_string(r.rejected) +
                                   " non-admissible controls detected");
    o.ok = o.ok && r.fixtures >= 10;
    return o;
}

Outcome groupoid_kit()
{
    const std::vector<std::pair<std::string, std::vector<bool>>> expected{
        {"normalized", {true, true, true, true, true, true}},
        {"disjoint", {true, true, true, true, true, true}},
        {"kernel_shared", {true, true, false, true, false, true}},
        {"non_semi", {true, false, false, false, false, false}},
    };
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    for (const auto& [name, want] : expected) {
        GroupoidModel m = load_groupoid_model(std::string(LINSYM_DATA_DIR) + "/groupoids/" + name + ".json");
        auto results = run_groupoid_checks(m);
        for (std::size_t k = 0; k < results.size(); ++k)
            if (results[k].holds != want[k]) {
                o.ok = false;
                o.failures.push_back(name + ": " + results[k].name + " gave " + (results[k].holds ? "true" : "false") +
                                     " " + results[k].detail);
            }
    }
    const double secs = seconds_since(start);
    o.ok = o.ok && secs < 5.0;
    o.detail = "4 fixtures x 6 checks match the documented table, " + fmt(secs) + " s (limit 5 s)";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"classification table", table},
        {"bracket oracle", brackets},
        {"prolongation oracle", prolongation},
        {"groupoid laws and equivariance", groupoid_laws},
        {"equivalence algebra", algebra},
        {"dimension facts", dimensions},
        {"real subclass", real_subclass},
        {"finite groupoid kit", groupoid_kit},
    };
    bool all = true;
    int k = 0;
    for (const auto& [name, run] : criteria) {
        ++k;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        all = all && o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << k << " (" << name << "): " << o.detail << "\n";
        for (const auto& f : o.failures)
            std::cout << "    " << f << "\n";
        std::cout.flush();
    }
    return all ? 0 : 1;
}
