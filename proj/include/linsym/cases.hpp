#pragma once

// Classification table at n = 2: templates of the potentials and their
// essential symmetry generators, instantiation and numeric verification.

#include "linsym/conditions.hpp"
#include "linsym/eval.hpp"
#include "linsym/parse.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace linsym {

/// A machine-checkable side condition on the parameters.
struct CaseConstraint {
    enum class Kind { Positive, AnyNonzero };
    Kind kind = Kind::AnyNonzero;
    std::vector<std::string> exprs;
    std::string text;
};

struct CaseVariant {
    std::string label;
    std::map<std::string, std::string> macros;
    std::vector<std::pair<std::string, std::string>> defines;
};

struct CaseGenerator {
    std::string label;
    std::string spec; ///< JSON field spec, macros not yet expanded
};

struct CaseEntry {
    int id = 0;
    std::string potential;
    std::string declarations; ///< JSON list
    std::map<std::string, std::string> macros;
    std::vector<std::pair<std::string, std::string>> defines;
    std::vector<CaseGenerator> generators;
    std::vector<CaseVariant> variants; ///< empty means a single plain variant
    std::vector<CaseConstraint> constraints;
    std::vector<std::string> notes;
    InvariantTuple expected;
};

class CaseTable {
  public:
    /// Parses the table format; throws SchemaError on malformed input.
    static CaseTable from_json_text(const std::string& text);
    /// The table shipped with the library.
    static const CaseTable& builtin();

    int n() const { return n_; }
    const std::vector<CaseEntry>& cases() const { return cases_; }
    /// Throws std::out_of_range for an unknown id.
    const CaseEntry& at(int id) const;
    const std::map<std::string, std::string>& macros() const { return macros_; }

  private:
    int n_ = 2;
    std::map<std::string, std::string> macros_;
    std::vector<CaseEntry> cases_;
};

/// Replaces every identifier token naming a macro by its parenthesized,
/// recursively expanded body. Inner maps take precedence.
std::string expand_macros(const std::string& text,
                          const std::vector<const std::map<std::string, std::string>*>& scopes);

struct CaseInstance {
    int variant = 0;
    std::string variant_label;
    Declarations decls;
    Potential potential;
    std::vector<std::string> labels;
    std::vector<GeneratorCoeffs> generators;
    struct Constraint {
        CaseConstraint::Kind kind;
        std::vector<Expr> exprs;
        std::string text;
    };
    std::vector<Constraint> constraints;
};

int variant_count(const CaseEntry& c);
/// Parses the templates of one variant and applies the definitions.
CaseInstance instantiate(const CaseTable& table, const CaseEntry& c, int variant);

struct VerifyOptions {
    int draws = 5;
    int points = 100;
    double tol = 1e-8;
};

struct CheckResult {
    std::string check; ///< residual, closure, kernel, tuple, restrictions, constraint
    bool ok = true;
    int draw = 0;
    std::string detail; ///< witness sample or message on failure
};

struct CaseReport {
    int id = 0;
    bool ok = true;
    int draws = 0;
    InvariantTuple expected;
    std::vector<InvariantTuple> found; ///< per draw; zero tuple if not computed
    double worst_residual = 0.0;
    std::vector<CheckResult> failures;
    std::vector<std::string> notes;

    std::string text() const;
    std::string json() const; ///< single JSON object
};

/// Runs every check of a case for `opt.draws` independent bindings, cycling
/// through the variants.
CaseReport verify_case(const CaseTable& table, int id, const VerifyOptions& opt, Rng& rng);

} // namespace linsym
