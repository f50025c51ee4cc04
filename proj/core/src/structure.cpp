#include "cohrel/structure.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

#include "cohrel/errors.hpp"

namespace cohrel {

struct StructureExpr::Node {
    Kind kind = Kind::Leaf;
    int id = 0;
    std::vector<StructureExpr> children;
    int max_id = 0;
    std::size_t leaves = 0;
};

ComponentSet make_set(std::initializer_list<int> ids) {
    ComponentSet s;
    for (int id : ids) s.insert(ComponentId{id});
    return s;
}

StructureExpr StructureExpr::leaf(int id) {
    if (id < 1) throw InputError("component ids are 1-based, got " + std::to_string(id));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Leaf;
    n->id = id;
    n->max_id = id;
    n->leaves = 1;
    return StructureExpr(std::move(n));
}

StructureExpr StructureExpr::min_of(std::vector<StructureExpr> children) {
    if (children.empty()) throw InputError("min() needs at least one child");
    if (children.size() == 1) return children.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Min;
    for (const auto& c : children) {
        n->max_id = std::max(n->max_id, c.component_count());
        n->leaves += c.leaf_count();
    }
    n->children = std::move(children);
    return StructureExpr(std::move(n));
}

StructureExpr StructureExpr::max_of(std::vector<StructureExpr> children) {
    if (children.empty()) throw InputError("max() needs at least one child");
    if (children.size() == 1) return children.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Max;
    for (const auto& c : children) {
        n->max_id = std::max(n->max_id, c.component_count());
        n->leaves += c.leaf_count();
    }
    n->children = std::move(children);
    return StructureExpr(std::move(n));
}

StructureExpr StructureExpr::k_out_of_m(int k, int m) {
    if (m < 1 || k < 1 || k > m)
        throw InputError("koutofm needs 1 <= k <= m, got k=" + std::to_string(k) + " m=" + std::to_string(m));
    if (m > 20) throw InputError("koutofm limited to m <= 20");
    std::vector<StructureExpr> blocks;
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        std::vector<StructureExpr> leaves;
        for (int id : pick) leaves.push_back(leaf(id));
        blocks.push_back(min_of(std::move(leaves)));
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i + 1) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return max_of(std::move(blocks));
}

StructureExpr::Kind StructureExpr::kind() const noexcept { return node_->kind; }

ComponentId StructureExpr::id() const {
    if (node_->kind != Kind::Leaf) throw InputError("id() on a gate");
    return ComponentId{node_->id};
}

const std::vector<StructureExpr>& StructureExpr::children() const noexcept { return node_->children; }
int StructureExpr::component_count() const noexcept { return node_->max_id; }
std::size_t StructureExpr::leaf_count() const noexcept { return node_->leaves; }

std::string StructureExpr::to_string() const {
    if (kind() == Kind::Leaf) return std::to_string(node_->id);
    std::string s = kind() == Kind::Min ? "min(" : "max(";
    for (std::size_t i = 0; i < children().size(); ++i) {
        if (i) s += ",";
        s += children()[i].to_string();
    }
    return s + ")";
}

// ---- DSL -------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    StructureExpr parse() {
        StructureExpr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    int integer() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer");
        if (pos_ - start > 6) {
            pos_ = start;
            fail("integer too large");
        }
        return std::stoi(s_.substr(start, pos_ - start));
    }

    std::string word() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string w = s_.substr(start, pos_ - start);
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
        return w;
    }

    StructureExpr expr() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t at = pos_;
            int id = integer();
            if (id < 1) {
                pos_ = at;
                fail("component ids start at 1");
            }
            return StructureExpr::leaf(id);
        }
        std::size_t at = pos_;
        std::string w = word();
        if (w == "koutofm") {
            expect('(');
            std::size_t kpos = (skip(), pos_);
            int k = integer();
            expect(',');
            int m = integer();
            expect(')');
            if (m < 1 || k < 1 || k > m || m > 20) {
                pos_ = kpos;
                fail("koutofm needs 1 <= k <= m <= 20");
            }
            return StructureExpr::k_out_of_m(k, m);
        }
        if (w != "min" && w != "max") {
            pos_ = at;
            fail("expected an integer, min(, max( or koutofm(");
        }
        expect('(');
        std::vector<StructureExpr> kids;
        kids.push_back(expr());
        while (accept(',')) kids.push_back(expr());
        if (kids.size() < 2) fail("expected ',' (a gate needs at least two children)");
        expect(')');
        return w == "min" ? StructureExpr::min_of(std::move(kids)) : StructureExpr::max_of(std::move(kids));
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

StructureExpr parse_structure(const std::string& text) {
    StructureExpr e = Parser(text).parse();
    try {
        check_relevance(e);
    } catch (const InputError& err) {
        throw ParseError(err.what(), 0);
    }
    return e;
}

std::string caret_diagnostic(const std::string& text, const ParseError& err) {
    std::string out = "error: " + std::string(err.what()) + "\n  " + text + "\n  ";
    out += std::string(std::min(err.position(), text.size()), ' ') + "^\n";
    return out;
}

void check_relevance(const StructureExpr& expr) {
    const int m = expr.component_count();
    std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
    std::function<void(const StructureExpr&)> walk = [&](const StructureExpr& e) {
        if (e.kind() == StructureExpr::Kind::Leaf)
            seen[static_cast<std::size_t>(e.id().value)] = true;
        else
            for (const auto& c : e.children()) walk(c);
    };
    walk(expr);
    for (int j = 1; j <= m; ++j)
        if (!seen[static_cast<std::size_t>(j)])
            throw InputError("component " + std::to_string(j) + " does not appear in the structure");
}

// ---- evaluation -------------------------------------------------------------

namespace {

double eval(const StructureExpr& e, std::span<const double> x) {
    switch (e.kind()) {
        case StructureExpr::Kind::Leaf:
            return x[e.id().index()];
        case StructureExpr::Kind::Min: {
            double v = kInf;
            for (const auto& c : e.children()) v = std::min(v, eval(c, x));
            return v;
        }
        case StructureExpr::Kind::Max: {
            double v = -kInf;
            for (const auto& c : e.children()) v = std::max(v, eval(c, x));
            return v;
        }
    }
    return 0.0;
}

void check_dim(const StructureExpr& expr, std::span<const double> times) {
    if (times.size() != static_cast<std::size_t>(expr.component_count()))
        throw DimensionError("expected " + std::to_string(expr.component_count()) + " component times, got " +
                             std::to_string(times.size()));
}

}  // namespace

double lifetime(const StructureExpr& expr, std::span<const double> times) {
    check_dim(expr, times);
    return eval(expr, times);
}

ComponentId failure_cause(const StructureExpr& expr, std::span<const double> times) {
    const double T = lifetime(expr, times);
    int found = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] == T) {
            if (found) throw TieError("components " + std::to_string(found) + " and " + std::to_string(j + 1) +
                                      " both fail at the system lifetime");
            found = static_cast<int>(j) + 1;
        }
    }
    return ComponentId{found};
}

std::vector<CensorKind> component_statuses(const StructureExpr& expr, std::span<const double> times) {
    failure_cause(expr, times);  // tie check
    const double T = lifetime(expr, times);
    std::vector<CensorKind> out;
    out.reserve(times.size());
    for (double x : times) out.push_back(x == T ? CensorKind::Exact : (x < T ? CensorKind::Left : CensorKind::Right));
    return out;
}

bool works(const StructureExpr& e, unsigned long working) {
    switch (e.kind()) {
        case StructureExpr::Kind::Leaf:
            return (working >> e.id().index()) & 1UL;
        case StructureExpr::Kind::Min:
            for (const auto& c : e.children())
                if (!works(c, working)) return false;
            return true;
        case StructureExpr::Kind::Max:
            for (const auto& c : e.children())
                if (works(c, working)) return true;
            return false;
    }
    return false;
}

namespace {

std::vector<bool> truth_table(const StructureExpr& expr) {
    const int m = expr.component_count();
    if (m > 20) throw InputError("cut/path enumeration is limited to m <= 20");
    const unsigned long n = 1UL << m;
    std::vector<bool> table(n);
    for (unsigned long x = 0; x < n; ++x) table[x] = works(expr, x);
    return table;
}

ComponentSet to_set(unsigned long mask) {
    ComponentSet s;
    for (int j = 0; mask; ++j, mask >>= 1)
        if (mask & 1UL) s.insert(ComponentId{j + 1});
    return s;
}

StructureExpr block(const ComponentSet& s, bool series) {
    std::vector<StructureExpr> leaves;
    for (auto id : s) leaves.push_back(StructureExpr::leaf(id.value));
    return series ? StructureExpr::min_of(std::move(leaves)) : StructureExpr::max_of(std::move(leaves));
}

}  // namespace

SetFamily minimal_path_sets(const StructureExpr& expr) {
    const auto table = truth_table(expr);
    SetFamily out;
    for (unsigned long p = 0; p < table.size(); ++p) {
        if (!table[p]) continue;
        bool minimal = true;
        for (unsigned long bit = 1; bit <= p && minimal; bit <<= 1)
            if ((p & bit) && table[p & ~bit]) minimal = false;
        if (minimal) out.insert(to_set(p));
    }
    return out;
}

SetFamily minimal_cut_sets(const StructureExpr& expr) {
    const auto table = truth_table(expr);
    const unsigned long all = table.size() - 1;
    SetFamily out;
    for (unsigned long c = 0; c < table.size(); ++c) {
        if (table[all & ~c]) continue;
        bool minimal = true;
        for (unsigned long bit = 1; bit <= c && minimal; bit <<= 1)
            if ((c & bit) && !table[all & ~(c & ~bit)]) minimal = false;
        if (minimal) out.insert(to_set(c));
    }
    return out;
}

StructureExpr to_pss(const StructureExpr& expr) {
    std::vector<StructureExpr> blocks;
    for (const auto& p : minimal_path_sets(expr)) blocks.push_back(block(p, true));
    return StructureExpr::max_of(std::move(blocks));
}

StructureExpr to_sps(const StructureExpr& expr) {
    std::vector<StructureExpr> blocks;
    for (const auto& c : minimal_cut_sets(expr)) blocks.push_back(block(c, false));
    return StructureExpr::min_of(std::move(blocks));
}

bool has_repeated_component(const StructureExpr& expr) {
    std::set<int> ids;
    std::function<void(const StructureExpr&)> walk = [&](const StructureExpr& e) {
        if (e.kind() == StructureExpr::Kind::Leaf)
            ids.insert(e.id().value);
        else
            for (const auto& c : e.children()) walk(c);
    };
    walk(expr);
    return ids.size() != expr.leaf_count();
}

// ---- canonical views ---------------------------------------------------------

namespace {

struct Blocks {
    TwoLevelKind kind;
    std::vector<ComponentSet> blocks;
};

Blocks two_level_blocks(const StructureExpr& expr) {
    if (has_repeated_component(expr))
        throw UnsupportedSystemError("structure repeats a component; no two-level form without repeats");
    using K = StructureExpr::Kind;
    if (expr.kind() == K::Leaf) throw UnsupportedSystemError("a single component is not a three-slot system");
    const K top = expr.kind();
    const K inner = top == K::Min ? K::Max : K::Min;
    Blocks out{top == K::Min ? TwoLevelKind::Sps : TwoLevelKind::Pss, {}};
    for (const auto& c : expr.children()) {
        if (c.kind() == K::Leaf) {
            out.blocks.push_back(make_set({c.id().value}));
        } else if (c.kind() == inner) {
            ComponentSet s;
            for (const auto& g : c.children()) {
                if (g.kind() != K::Leaf) throw UnsupportedSystemError("structure is not in two-level form");
                s.insert(g.id());
            }
            out.blocks.push_back(std::move(s));
        } else {
            throw UnsupportedSystemError("structure is not in two-level form");
        }
    }
    return out;
}

ThreeComponentView finish(TwoLevelKind kind, ComponentSet x1, ComponentSet x2, ComponentSet x3, int slot, int m) {
    ThreeComponentView v;
    v.kind = kind;
    v.target_slot = slot;
    v.cause_map.assign(static_cast<std::size_t>(m), 0);
    for (auto id : x1) v.cause_map[id.index()] = 1;
    for (auto id : x2) v.cause_map[id.index()] = 2;
    for (auto id : x3) v.cause_map[id.index()] = 3;
    v.x1 = std::move(x1);
    v.x2 = std::move(x2);
    v.x3 = std::move(x3);
    return v;
}

}  // namespace

ThreeComponentView canonical_three(const StructureExpr& expr, ComponentId target) {
    const Blocks b = two_level_blocks(expr);
    ComponentSet x1, x3;
    bool found = false;
    for (const auto& blk : b.blocks) {
        if (blk.count(target)) {
            found = true;
            for (auto id : blk)
                if (id != target) x3.insert(id);
        } else {
            x1.insert(blk.begin(), blk.end());
        }
    }
    if (!found) throw InputError("component " + std::to_string(target.value) + " is not in the structure");
    if (x3.empty()) throw UnsupportedSystemError("target block has no siblings");
    if (x1.empty()) throw UnsupportedSystemError("no blocks besides the target's");
    return finish(b.kind, std::move(x1), ComponentSet{target}, std::move(x3), 2, expr.component_count());
}

ThreeComponentView canonical_lead(const StructureExpr& expr, ComponentId target) {
    const Blocks b = two_level_blocks(expr);
    ComponentSet rest;
    bool alone = false;
    std::size_t others = 0;
    for (const auto& blk : b.blocks) {
        if (blk.count(target)) {
            alone = blk.size() == 1;
        } else {
            rest.insert(blk.begin(), blk.end());
            ++others;
        }
    }
    if (!alone) throw UnsupportedSystemError("target does not form a block on its own");
    if (rest.empty()) throw UnsupportedSystemError("no blocks besides the target's");
    if (others == 1 && rest.size() >= 2) {
        // one remaining block splits into X2 and X3 directly
        ComponentSet x2{*rest.begin()};
        rest.erase(rest.begin());
        return finish(b.kind, ComponentSet{target}, std::move(x2), std::move(rest), 1, expr.component_count());
    }
    return finish(b.kind, ComponentSet{target}, std::move(rest), {}, 1, expr.component_count());
}

}  // namespace cohrel
