#pragma once

// Finite groupoids and the semi-normalization checks on toy models. Every
// check is an exhaustive enumeration over the arrows.

#include "linsym/errors.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace linsym {

using ArrowSet = std::set<int>;

struct Arrow {
    int src = 0;
    int tgt = 0;
    std::string label;
};

/// Objects, arrows and the full multiplication table. a * b is "a, then b"
/// and is defined iff tgt(a) = src(b).
class FiniteGroupoid {
  public:
    static constexpr int kMaxObjects = 8;
    static constexpr int kMaxArrows = 200;

    /// Builds and checks the category axioms exhaustively; throws SchemaError.
    FiniteGroupoid(std::vector<std::string> objects, std::vector<Arrow> arrows,
                   const std::vector<std::vector<int>>& triples);

    int objects() const { return static_cast<int>(objects_.size()); }
    int arrows() const { return static_cast<int>(arrows_.size()); }
    const std::string& object_name(int o) const { return objects_[o]; }
    const Arrow& arrow(int a) const { return arrows_[a]; }
    int find_object(const std::string& name) const;
    int find_arrow(const std::string& label) const;

    /// a * b, or -1 if the endpoints do not match.
    int compose(int a, int b) const { return table_[a * arrows() + b]; }
    int unit(int o) const { return units_[o]; }
    int inverse(int a) const { return inverses_[a]; }

    /// Vertex group at o.
    ArrowSet loops(int o) const;
    ArrowSet all() const;
    ArrowSet unit_set() const;

    std::string describe(const ArrowSet& s) const;

  private:
    std::vector<std::string> objects_;
    std::vector<Arrow> arrows_;
    std::vector<int> table_;
    std::vector<int> units_;
    std::vector<int> inverses_;
};

/// {a * b | a in A, b in B, tgt(a) = src(b)}.
ArrowSet frobenius_product(const FiniteGroupoid& G, const ArrowSet& A, const ArrowSet& B);

/// Whether S contains the units and is closed under products and inverses.
bool is_wide_subgroupoid(const FiniteGroupoid& G, const ArrowSet& S);

/// G plays the equivalence groupoid, H the action groupoid of the subgroup,
/// N[o] the symmetry subgroup attached to object o, kernel[o] the kernel
/// group at o and H_bar an optional larger subgroupoid for the extension check.
struct GroupoidModel {
    FiniteGroupoid G;
    ArrowSet H;
    std::vector<ArrowSet> N;
    std::optional<ArrowSet> H_bar;
    std::vector<ArrowSet> kernel;

    ArrowSet N_union() const;
};

/// Parses {"objects", "arrows", "mult", "H", "N"} with optional "H_bar" and
/// "kernel"; "mult" lists [a, b, a*b] label triples. Throws SchemaError.
GroupoidModel groupoid_model_from_json_text(const std::string& text);
GroupoidModel load_groupoid_model(const std::string& path);

class NotUniform : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GroupoidCheck {
    std::string name;
    bool holds = true;
    std::string detail; ///< witness when the check fails
};

GroupoidCheck check_uniform(const GroupoidModel& m);
/// Throws NotUniform for a non-uniform model.
GroupoidCheck check_semi_normalized(const GroupoidModel& m);
GroupoidCheck check_disjoint(const GroupoidModel& m);
/// False with a precondition detail if the model is not semi-normalized.
GroupoidCheck check_factorization(const GroupoidModel& m);
GroupoidCheck check_splitting(const GroupoidModel& m);
/// Semi-normalization persists for H_bar (default H) with N and with the
/// family generated by N and the kernel. Throws SchemaError if H_bar is not a
/// wide subgroupoid containing H.
GroupoidCheck check_extension(const GroupoidModel& m);

/// The six checks in the order uniform, semi-normalized, disjoint,
/// factorization, splitting, extension. Non-uniform models report the
/// semi-normalized and disjoint checks as failing with the reason.
std::vector<GroupoidCheck> run_groupoid_checks(const GroupoidModel& m);

/// Consequences that must hold in a semi-normalized model: N*H = H*N, the
/// union of the N is stable under conjugation, and objects connected in G
/// are connected in H.
std::vector<GroupoidCheck> semi_normalized_consequences(const GroupoidModel& m);

const std::vector<std::string>& groupoid_check_names();

} // namespace linsym
