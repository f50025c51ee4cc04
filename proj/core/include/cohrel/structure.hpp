#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cohrel/data.hpp"
#include "cohrel/errors.hpp"

namespace cohrel {

struct ComponentId {
    int value = 0;

    constexpr ComponentId() = default;
    constexpr explicit ComponentId(int v) : value(v) {}
    constexpr std::size_t index() const noexcept { return static_cast<std::size_t>(value - 1); }
    auto operator<=>(const ComponentId&) const = default;
};

using ComponentSet = std::set<ComponentId>;
using SetFamily = std::set<ComponentSet>;

ComponentSet make_set(std::initializer_list<int> ids);

// Immutable min/max tree. Min is series (fails at the first child failure),
// Max is parallel. Copies share nodes.
class StructureExpr {
public:
    enum class Kind { Leaf, Min, Max };

    static StructureExpr leaf(int id);
    // A single child collapses to the child itself.
    static StructureExpr min_of(std::vector<StructureExpr> children);
    static StructureExpr max_of(std::vector<StructureExpr> children);
    // Max over the Min of every k-subset of 1..m, expanded here.
    static StructureExpr k_out_of_m(int k, int m);

    Kind kind() const noexcept;
    ComponentId id() const;  // leaves only
    const std::vector<StructureExpr>& children() const noexcept;

    int component_count() const noexcept;  // largest id
    std::size_t leaf_count() const noexcept;
    std::string to_string() const;

private:
    struct Node;
    explicit StructureExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Parses the text DSL; throws ParseError with a 0-based character offset.
StructureExpr parse_structure(const std::string& text);
// Two-line message with a caret under the offending character.
std::string caret_diagnostic(const std::string& text, const ParseError& err);

// Throws InputError unless every id in 1..m occurs.
void check_relevance(const StructureExpr& expr);

double lifetime(const StructureExpr& expr, std::span<const double> times);
ComponentId failure_cause(const StructureExpr& expr, std::span<const double> times);
// Exact / Left / Right relative to the system lifetime.
std::vector<CensorKind> component_statuses(const StructureExpr& expr, std::span<const double> times);

// Boolean structure function; bit j-1 of `working` is component j.
bool works(const StructureExpr& expr, unsigned long working);

SetFamily minimal_path_sets(const StructureExpr& expr);
SetFamily minimal_cut_sets(const StructureExpr& expr);
StructureExpr to_pss(const StructureExpr& expr);
StructureExpr to_sps(const StructureExpr& expr);
bool has_repeated_component(const StructureExpr& expr);

enum class TwoLevelKind { Sps, Pss };

// min(X1, max(X2, X3)) for Sps, max(X1, min(X2, X3)) for Pss.
struct ThreeComponentView {
    TwoLevelKind kind = TwoLevelKind::Sps;
    ComponentSet x1, x2, x3;
    int target_slot = 2;          // 2 from canonical_three, 1 from canonical_lead
    std::vector<int> cause_map;   // cause_map[j-1] = canonical slot of component j

    int slot_of(int cause) const { return cause_map.at(static_cast<std::size_t>(cause - 1)); }
};

// Target shares a block with siblings: x2 = {target}, x3 = siblings,
// x1 = every other block.
ThreeComponentView canonical_three(const StructureExpr& expr, ComponentId target);
// Target forms a block on its own: x1 = {target}. A single remaining block
// splits into x2 = its first component and x3 = the rest; several remaining
// blocks go to x2 whole with x3 empty.
ThreeComponentView canonical_lead(const StructureExpr& expr, ComponentId target);

}  // namespace cohrel
