#ifndef glush_first_label_hpp
#define glush_first_label_hpp

#include <map>
#include <optional>
#include <vector>

#include "glush/analysis.hpp"
#include "glush/batched_predecessor.hpp"
#include "glush/parse_tree.hpp"

namespace glush {

// firstlabel(v, c): the lowest ancestor-or-self of v whose label contains c.
//
// Per character the labeled nodes form a laminar family of Euler intervals.
// One predecessor query on the sorted interval endpoints answers a query:
// landing on an opening endpoint of w means w is the answer; landing on a
// closing endpoint of w means the answer is w's nearest labeled ancestor.
class FirstLabelStructure {
public:
    FirstLabelStructure() = default;
    FirstLabelStructure(const ParseTree& tree, const AnalysisTables& tables);

    std::optional<NodeId> query(NodeId v, char32_t c, QueryCounters& ctx) const;

    // Batched variant: `vs` must be sorted by Euler tin. Routed through the
    // batched predecessor reduction.
    std::vector<std::optional<NodeId>> query_batch(const std::vector<NodeId>& vs, char32_t c,
                                                   QueryCounters& ctx) const;

    // Nodes labeled c in tin order, and per-node nearest labeled proper
    // ancestor (parallel array). Used to build the engine's pointer chains.
    struct CharIndex {
        std::vector<NodeId> nodes;        // tin order
        std::vector<int32_t> parent;      // index into nodes, -1 = none
        std::vector<int64_t> endpoints;   // sorted tin/tout values
        std::vector<int32_t> endpoint_of; // index into nodes
        std::vector<char> is_open;
        BatchedPredecessor pred;
    };

    const CharIndex* char_index(char32_t c) const {
        auto it = by_char_.find(c);
        return it == by_char_.end() ? nullptr : &it->second;
    }

    // Nearest proper ancestor of a c-labeled node whose label also contains
    // c. Pointer lookup, no predecessor query.
    NodeId labeled_parent(NodeId w, char32_t c) const;

private:
    std::optional<NodeId> decode(const CharIndex& ci, std::optional<size_t> endpoint) const;

    const ParseTree* tree_ = nullptr;
    std::map<char32_t, CharIndex> by_char_;
};

} // namespace glush

#endif
