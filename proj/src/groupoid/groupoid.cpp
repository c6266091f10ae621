#include "linsym/groupoid.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace linsym {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// FiniteGroupoid

FiniteGroupoid::FiniteGroupoid(std::vector<std::string> objects, std::vector<Arrow> arrows,
                               const std::vector<std::vector<int>>& triples)
    : objects_(std::move(objects)), arrows_(std::move(arrows))
{
    const int n = this->arrows();
    if (objects_.empty() || this->objects() > kMaxObjects)
        throw SchemaError("a model needs 1 to 8 objects");
    if (n > kMaxArrows)
        throw SchemaError("a model has at most 200 arrows");
    for (const Arrow& a : arrows_)
        if (a.src < 0 || a.src >= this->objects() || a.tgt < 0 || a.tgt >= this->objects())
            throw SchemaError("arrow " + a.label + " has an unknown endpoint");

    table_.assign(static_cast<std::size_t>(n) * n, -1);
    for (const auto& tr : triples) {
        const int a = tr[0], b = tr[1], c = tr[2];
        const std::string what = arrows_[a].label + " * " + arrows_[b].label;
        if (arrows_[a].tgt != arrows_[b].src)
            throw SchemaError("product " + what + " is listed but the arrows are not composable");
        if (arrows_[c].src != arrows_[a].src || arrows_[c].tgt != arrows_[b].tgt)
            throw SchemaError("product " + what + " has the wrong endpoints");
        int& slot = table_[a * n + b];
        if (slot != -1 && slot != c)
            throw SchemaError("product " + what + " is listed twice");
        slot = c;
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (arrows_[a].tgt == arrows_[b].src && compose(a, b) == -1)
                throw SchemaError("product " + arrows_[a].label + " * " + arrows_[b].label + " is missing");

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int ab = compose(a, b);
            if (ab == -1)
                continue;
            for (int c = 0; c < n; ++c) {
                const int bc = compose(b, c);
                if (bc != -1 && compose(ab, c) != compose(a, bc))
                    throw SchemaError("associativity fails for " + arrows_[a].label + ", " + arrows_[b].label +
                                      ", " + arrows_[c].label);
            }
        }

    units_.assign(this->objects(), -1);
    for (int o = 0; o < this->objects(); ++o) {
        for (int u = 0; u < n && units_[o] == -1; ++u) {
            if (arrows_[u].src != o || arrows_[u].tgt != o)
                continue;
            bool ok = true;
            for (int a = 0; a < n && ok; ++a) {
                if (arrows_[a].src == o && compose(u, a) != a)
                    ok = false;
                if (arrows_[a].tgt == o && compose(a, u) != a)
                    ok = false;
            }
            if (ok)
                units_[o] = u;
        }
        if (units_[o] == -1)
            throw SchemaError("object " + objects_[o] + " has no unit arrow");
    }

    inverses_.assign(n, -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n && inverses_[a] == -1; ++b)
            if (compose(a, b) == units_[arrows_[a].src] && compose(b, a) == units_[arrows_[a].tgt])
                inverses_[a] = b;
        if (inverses_[a] == -1)
            throw SchemaError("arrow " + arrows_[a].label + " has no inverse");
    }
}

int FiniteGroupoid::find_object(const std::string& name) const
{
    auto it = std::find(objects_.begin(), objects_.end(), name);
    if (it == objects_.end())
        throw SchemaError("unknown object " + name);
    return static_cast<int>(it - objects_.begin());
}

int FiniteGroupoid::find_arrow(const std::string& label) const
{
    for (int a = 0; a < arrows(); ++a)
        if (arrows_[a].label == label)
            return a;
    throw SchemaError("unknown arrow " + label);
}

ArrowSet FiniteGroupoid::loops(int o) const
{
    ArrowSet s;
    for (int a = 0; a < arrows(); ++a)
        if (arrows_[a].src == o && arrows_[a].tgt == o)
            s.insert(a);
    return s;
}

ArrowSet FiniteGroupoid::all() const
{
    ArrowSet s;
    for (int a = 0; a < arrows(); ++a)
        s.insert(a);
    return s;
}

ArrowSet FiniteGroupoid::unit_set() const { return ArrowSet(units_.begin(), units_.end()); }

std::string FiniteGroupoid::describe(const ArrowSet& s) const
{
    std::string out = "{";
    for (int a : s) {
        if (out.size() > 1)
            out += ", ";
        out += arrows_[a].label;
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Set operations

ArrowSet frobenius_product(const FiniteGroupoid& G, const ArrowSet& A, const ArrowSet& B)
{
    ArrowSet out;
    for (int a : A)
        for (int b : B) {
            const int c = G.compose(a, b);
            if (c != -1)
                out.insert(c);
        }
    return out;
}

bool is_wide_subgroupoid(const FiniteGroupoid& G, const ArrowSet& S)
{
    for (int o = 0; o < G.objects(); ++o)
        if (!S.count(G.unit(o)))
            return false;
    for (int a : S) {
        if (!S.count(G.inverse(a)))
            return false;
        for (int b : S) {
            const int c = G.compose(a, b);
            if (c != -1 && !S.count(c))
                return false;
        }
    }
    return true;
}

namespace {

ArrowSet intersect(const ArrowSet& a, const ArrowSet& b)
{
    ArrowSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
    return out;
}

/// Subgroup of the vertex group at o generated by S.
ArrowSet generated(const FiniteGroupoid& G, int o, ArrowSet S)
{
    S.insert(G.unit(o));
    for (;;) {
        ArrowSet next = frobenius_product(G, S, S);
        next.insert(S.begin(), S.end());
        if (next == S)
            return S;
        S = std::move(next);
    }
}

ArrowSet loops_in(const FiniteGroupoid& G, const ArrowSet& S, int o)
{
    return intersect(S, G.loops(o));
}

GroupoidCheck ok(const std::string& name) { return {name, true, ""}; }
GroupoidCheck fail(const std::string& name, const std::string& why) { return {name, false, why}; }

GroupoidCheck uniform_for(const FiniteGroupoid& G, const ArrowSet& H, const std::vector<ArrowSet>& N)
{
    for (int T : H) {
        const Arrow& a = G.arrow(T);
        ArrowSet left = frobenius_product(G, N[a.src], {T});
        ArrowSet right = frobenius_product(G, {T}, N[a.tgt]);
        if (left != right)
            return fail("uniform", "at arrow " + a.label + ": N_src * T = " + G.describe(left) +
                                       " but T * N_tgt = " + G.describe(right));
    }
    return ok("uniform");
}

ArrowSet union_of(const std::vector<ArrowSet>& N)
{
    ArrowSet out;
    for (const auto& s : N)
        out.insert(s.begin(), s.end());
    return out;
}

GroupoidCheck semi_for(const FiniteGroupoid& G, const ArrowSet& H, const std::vector<ArrowSet>& N)
{
    GroupoidCheck u = uniform_for(G, H, N);
    if (!u.holds)
        throw NotUniform("model is not uniform: " + u.detail);
    ArrowSet product = frobenius_product(G, union_of(N), H);
    for (int a = 0; a < G.arrows(); ++a)
        if (!product.count(a))
            return fail("semi-normalized", "arrow " + G.arrow(a).label + " is not in N * H");
    return ok("semi-normalized");
}

/// Semi-normalization as a plain predicate; non-uniform counts as false.
bool semi_holds(const FiniteGroupoid& G, const ArrowSet& H, const std::vector<ArrowSet>& N, std::string& why)
{
    try {
        GroupoidCheck c = semi_for(G, H, N);
        why = c.detail;
        return c.holds;
    } catch (const NotUniform& e) {
        why = e.what();
        return false;
    }
}

ArrowSet labels_to_set(const FiniteGroupoid& G, const Json& j, const std::string& what)
{
    if (!j.is_array())
        throw SchemaError(what + " must be an array of arrow labels");
    ArrowSet s;
    for (const auto& l : j) {
        if (!l.is_string())
            throw SchemaError(what + " must be an array of arrow labels");
        s.insert(G.find_arrow(l.get<std::string>()));
    }
    return s;
}

std::vector<ArrowSet> family_from_json(const FiniteGroupoid& G, const Json* j, const std::string& what)
{
    std::vector<ArrowSet> fam(G.objects());
    for (int o = 0; o < G.objects(); ++o)
        fam[o].insert(G.unit(o));
    if (!j)
        return fam;
    if (!j->is_object())
        throw SchemaError(what + " must map objects to arrays of labels");
    for (auto it = j->begin(); it != j->end(); ++it) {
        const int o = G.find_object(it.key());
        ArrowSet s = labels_to_set(G, it.value(), what + "." + it.key());
        for (int a : s)
            if (G.arrow(a).src != o || G.arrow(a).tgt != o)
                throw SchemaError(what + "." + it.key() + " contains " + G.arrow(a).label +
                                  ", which is not a loop at that object");
        if (generated(G, o, s) != s)
            throw SchemaError(what + "." + it.key() + " is not a subgroup of the vertex group");
        fam[o] = std::move(s);
    }
    return fam;
}

std::string string_field(const Json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_string())
        throw SchemaError(std::string("arrow entries need a string \"") + key + "\"");
    return j.at(key).get<std::string>();
}

} // namespace

ArrowSet GroupoidModel::N_union() const { return union_of(N); }

// ---------------------------------------------------------------------------
// Model files

GroupoidModel groupoid_model_from_json_text(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw SchemaError("a groupoid model must be a JSON object");
    static const std::set<std::string> known{"objects", "arrows", "mult", "H", "N", "H_bar", "kernel"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw SchemaError("unknown key \"" + it.key() + "\"");
    for (const char* key : {"objects", "arrows", "mult", "H"})
        if (!j.contains(key) || !j.at(key).is_array())
            throw SchemaError(std::string("\"") + key + "\" must be present and an array");

    std::vector<std::string> objects;
    std::map<std::string, int> object_index;
    for (const auto& o : j.at("objects")) {
        if (!o.is_string())
            throw SchemaError("objects must be strings");
        if (!object_index.emplace(o.get<std::string>(), static_cast<int>(objects.size())).second)
            throw SchemaError("duplicate object " + o.get<std::string>());
        objects.push_back(o.get<std::string>());
    }
    if (objects.empty() || objects.size() > static_cast<std::size_t>(FiniteGroupoid::kMaxObjects))
        throw SchemaError("a model needs 1 to 8 objects");
    if (j.at("arrows").size() > static_cast<std::size_t>(FiniteGroupoid::kMaxArrows))
        throw SchemaError("a model has at most 200 arrows");

    std::vector<Arrow> arrows;
    std::map<std::string, int> arrow_index;
    for (const auto& a : j.at("arrows")) {
        if (!a.is_object())
            throw SchemaError("arrows must be objects with src, label and tgt");
        Arrow ar;
        ar.label = string_field(a, "label");
        auto endpoint = [&](const char* key) {
            auto it = object_index.find(string_field(a, key));
            if (it == object_index.end())
                throw SchemaError("arrow " + ar.label + " has an unknown endpoint");
            return it->second;
        };
        ar.src = endpoint("src");
        ar.tgt = endpoint("tgt");
        if (!arrow_index.emplace(ar.label, static_cast<int>(arrows.size())).second)
            throw SchemaError("duplicate arrow label " + ar.label);
        arrows.push_back(ar);
    }

    std::vector<std::vector<int>> triples;
    for (const auto& t : j.at("mult")) {
        if (!t.is_array() || t.size() != 3)
            throw SchemaError("mult entries must be [a, b, a*b] label triples");
        std::vector<int> tr;
        for (const auto& l : t) {
            if (!l.is_string() || !arrow_index.count(l.get<std::string>()))
                throw SchemaError("mult refers to an unknown arrow " + l.dump());
            tr.push_back(arrow_index.at(l.get<std::string>()));
        }
        triples.push_back(tr);
    }

    FiniteGroupoid G(std::move(objects), std::move(arrows), triples);
    ArrowSet H = labels_to_set(G, j.at("H"), "H");
    if (!is_wide_subgroupoid(G, H))
        throw SchemaError("H is not a wide subgroupoid");
    std::vector<ArrowSet> N = family_from_json(G, j.contains("N") ? &j.at("N") : nullptr, "N");
    std::optional<ArrowSet> H_bar;
    if (j.contains("H_bar"))
        H_bar = labels_to_set(G, j.at("H_bar"), "H_bar");
    std::vector<ArrowSet> kernel = family_from_json(G, j.contains("kernel") ? &j.at("kernel") : nullptr, "kernel");
    return GroupoidModel{std::move(G), std::move(H), std::move(N), std::move(H_bar), std::move(kernel)};
}

GroupoidModel load_groupoid_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return groupoid_model_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------
// Checks

GroupoidCheck check_uniform(const GroupoidModel& m) { return uniform_for(m.G, m.H, m.N); }

GroupoidCheck check_semi_normalized(const GroupoidModel& m) { return semi_for(m.G, m.H, m.N); }

GroupoidCheck check_disjoint(const GroupoidModel& m)
{
    GroupoidCheck semi = check_semi_normalized(m);
    if (!semi.holds)
        return fail("disjoint", "not semi-normalized: " + semi.detail);
    for (int o = 0; o < m.G.objects(); ++o) {
        ArrowSet common = intersect(m.N[o], loops_in(m.G, m.H, o));
        if (common.size() != 1)
            return fail("disjoint", "at object " + m.G.object_name(o) + ": N and the H-loops share " +
                                        m.G.describe(common));
    }
    return ok("disjoint");
}

GroupoidCheck check_factorization(const GroupoidModel& m)
{
    std::string why;
    if (!semi_holds(m.G, m.H, m.N, why))
        return fail("factorization", "precondition: not semi-normalized: " + why);
    for (int o = 0; o < m.G.objects(); ++o) {
        const ArrowSet vertex = m.G.loops(o);
        const ArrowSet& N = m.N[o];
        for (int g : vertex) {
            ArrowSet conj = frobenius_product(m.G, frobenius_product(m.G, {m.G.inverse(g)}, N), {g});
            if (conj != N)
                return fail("factorization", "N at " + m.G.object_name(o) + " is not normal: conjugation by " +
                                                 m.G.arrow(g).label + " gives " + m.G.describe(conj));
        }
        ArrowSet product = frobenius_product(m.G, loops_in(m.G, m.H, o), N);
        if (product != vertex)
            return fail("factorization", "at object " + m.G.object_name(o) + ": H-loops * N = " +
                                             m.G.describe(product) + " differs from the vertex group");
    }
    return ok("factorization");
}

GroupoidCheck check_splitting(const GroupoidModel& m)
{
    GroupoidCheck f = check_factorization(m);
    if (!f.holds)
        return fail("splitting", "factorization fails: " + f.detail);
    for (int o = 0; o < m.G.objects(); ++o) {
        const ArrowSet essential = loops_in(m.G, m.H, o);
        std::map<int, int> decompositions;
        for (int h : essential)
            for (int n : m.N[o])
                ++decompositions[m.G.compose(h, n)];
        for (const auto& [g, count] : decompositions)
            if (count != 1)
                return fail("splitting", "at object " + m.G.object_name(o) + ": " + m.G.arrow(g).label + " has " +
                                             std::to_string(count) + " decompositions h * n");
    }
    return ok("splitting");
}

GroupoidCheck check_extension(const GroupoidModel& m)
{
    const ArrowSet H_bar = m.H_bar.value_or(m.H);
    if (!is_wide_subgroupoid(m.G, H_bar) || !std::includes(H_bar.begin(), H_bar.end(), m.H.begin(), m.H.end()))
        throw SchemaError("H_bar is not a wide subgroupoid containing H");
    std::string why;
    if (!semi_holds(m.G, m.H, m.N, why))
        return fail("extension", "precondition: not semi-normalized: " + why);
    if (!semi_holds(m.G, H_bar, m.N, why))
        return fail("extension", "with H_bar and N: " + why);
    std::vector<ArrowSet> enlarged(m.G.objects());
    for (int o = 0; o < m.G.objects(); ++o) {
        ArrowSet s = m.N[o];
        s.insert(m.kernel[o].begin(), m.kernel[o].end());
        enlarged[o] = generated(m.G, o, s);
    }
    if (!semi_holds(m.G, H_bar, enlarged, why))
        return fail("extension", "with H_bar and the kernel-enlarged N: " + why);
    return ok("extension");
}

const std::vector<std::string>& groupoid_check_names()
{
    static const std::vector<std::string> names{"uniform",       "semi-normalized", "disjoint",
                                                "factorization", "splitting",       "extension"};
    return names;
}

std::vector<GroupoidCheck> run_groupoid_checks(const GroupoidModel& m)
{
    std::vector<GroupoidCheck> out;
    out.push_back(check_uniform(m));
    const bool uniform = out.back().holds;
    if (uniform) {
        out.push_back(check_semi_normalized(m));
        out.push_back(check_disjoint(m));
    } else {
        out.push_back(fail("semi-normalized", "model is not uniform"));
        out.push_back(fail("disjoint", "model is not uniform"));
    }
    out.push_back(check_factorization(m));
    out.push_back(check_splitting(m));
    out.push_back(check_extension(m));
    return out;
}

std::vector<GroupoidCheck> semi_normalized_consequences(const GroupoidModel& m)
{
    std::vector<GroupoidCheck> out;
    const ArrowSet Nf = m.N_union();
    ArrowSet nh = frobenius_product(m.G, Nf, m.H), hn = frobenius_product(m.G, m.H, Nf);
    out.push_back(nh == hn ? ok("N*H = H*N") : fail("N*H = H*N", "the two products differ"));

    GroupoidCheck normal = ok("N is a normal subgroupoid");
    for (int g = 0; g < m.G.arrows() && normal.holds; ++g) {
        const Arrow& a = m.G.arrow(g);
        ArrowSet conj = frobenius_product(m.G, frobenius_product(m.G, {m.G.inverse(g)}, m.N[a.src]), {g});
        if (conj != m.N[a.tgt])
            normal = fail(normal.name, "conjugation by " + a.label + " moves N");
    }
    out.push_back(normal);

    // Connected components by union-find over the arrows of each set.
    auto components = [&](const ArrowSet& S) {
        std::vector<int> parent(m.G.objects());
        for (int o = 0; o < m.G.objects(); ++o)
            parent[o] = o;
        auto root = [&](int o) {
            while (parent[o] != o)
                o = parent[o] = parent[parent[o]];
            return o;
        };
        for (int a : S)
            parent[root(m.G.arrow(a).src)] = root(m.G.arrow(a).tgt);
        std::vector<int> r(m.G.objects());
        for (int o = 0; o < m.G.objects(); ++o)
            r[o] = root(o);
        return r;
    };
    std::vector<int> cg = components(m.G.all()), ch = components(m.H);
    GroupoidCheck conn = ok("connectivity agrees");
    for (int p = 0; p < m.G.objects() && conn.holds; ++p)
        for (int q = 0; q < m.G.objects() && conn.holds; ++q)
            if ((cg[p] == cg[q]) != (ch[p] == ch[q]))
                conn = fail(conn.name, m.G.object_name(p) + " and " + m.G.object_name(q) +
                                           " are connected in one groupoid only");
    out.push_back(conn);
    return out;
}

} // namespace linsym
