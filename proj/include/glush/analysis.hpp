#ifndef glush_analysis_hpp
#define glush_analysis_hpp

#include <algorithm>
#include <vector>

#include "glush/parse_tree.hpp"

namespace glush {

// Per-node and per-position sets derived from one bottom-up pass (the
// classic position-automaton recurrences) and one top-down pass (extent
// tops, labels). Positions are identified by their 0-based in-order rank.
//
// Extent tops are computed independently of the explicit sets by chaining
// the "my first set is contained in my parent's" predicate, so the two
// routes cross-check each other in tests.
struct AnalysisTables {
    std::vector<char> nullable;              // per node
    std::vector<std::vector<int32_t>> first; // per node, sorted ranks
    std::vector<std::vector<int32_t>> last;  // per node, sorted ranks
    std::vector<std::vector<int32_t>> follow; // per rank, sorted ranks

    // Highest node u with first(v) <= first(u) on v's ancestor-or-self path;
    // for a position p this is the top of firstextent(p).
    std::vector<NodeId> fe_top_node; // per node
    std::vector<NodeId> le_top_node; // per node
    std::vector<NodeId> fe_top;      // per rank
    std::vector<NodeId> le_top;      // per rank

    // label(v) for internal nodes: v = lca of two equally labeled positions,
    // closed upward through lowest proper Star ancestors. Literal leaves
    // carry their own character as a singleton label.
    std::vector<std::vector<char32_t>> node_labels; // sorted per node

    bool has_label(NodeId v, char32_t c) const {
        const auto& ls = node_labels[static_cast<size_t>(v)];
        return std::binary_search(ls.begin(), ls.end(), c);
    }

    // u in firstextent-of-node(w): u ancestor-or-self of w and
    // first(w) <= first(u). Constant time from the tops.
    bool in_first_extent(const ParseTree& t, NodeId u, NodeId w) const {
        return t.is_ancestor(u, w) &&
               t.depth(u) >= t.depth(fe_top_node[static_cast<size_t>(w)]);
    }
    bool in_last_extent(const ParseTree& t, NodeId u, NodeId w) const {
        return t.is_ancestor(u, w) &&
               t.depth(u) >= t.depth(le_top_node[static_cast<size_t>(w)]);
    }
};

// Full mode materializes every per-node first/last set and per-position
// follow set (the oracle needs them; total size can be quadratic in m).
// Compact mode skips them, keeping only the root's first and last sets --
// everything the matching pipeline touches is linear in m.
enum class AnalyzeMode { full, compact };

AnalysisTables analyze(const ParseTree& tree, AnalyzeMode mode = AnalyzeMode::full);

// follow(v, p) restricted to the subexpression rooted at v. Quadratic-ish
// recomputation; used by fixtures and oracles, not the matching path.
std::vector<int32_t> follow_within(const ParseTree& tree, NodeId v, int32_t rank);

} // namespace glush

#endif
