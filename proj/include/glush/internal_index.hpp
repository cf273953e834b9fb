#ifndef glush_internal_index_hpp
#define glush_internal_index_hpp

#include <map>
#include <optional>
#include <vector>

#include "glush/analysis.hpp"
#include "glush/batched_predecessor.hpp"
#include "glush/parse_tree.hpp"
#include "glush/rmq.hpp"

namespace glush {

// Index range [lo, hi] into a per-character position array; empty if absent.
struct IndexRange {
    int32_t lo = 0;
    int32_t hi = -1;
    bool empty() const { return lo > hi; }
    int32_t size() const { return empty() ? 0 : hi - lo + 1; }
};

// The internal-transition index: for each character c, the positions labeled
// c in order (A), the top of each position's first extent (F), its depth (D)
// with an RMQ on top, and a predecessor structure over the position ranks.
// Concat and Star nodes additionally store, per character in their label,
// the index range of A covered by their subtree (Concat: also by the right
// child), so labeled queries need no predecessor search at all.
class InternalIndex {
public:
    InternalIndex() = default;
    InternalIndex(const ParseTree& tree, const AnalysisTables& tables);

    const ParseTree& tree() const { return *tree_; }
    const AnalysisTables& tables() const { return *tables_; }

    struct CharArrays {
        std::vector<int32_t> ranks;   // A: position ranks, increasing
        std::vector<NodeId> fe_tops;  // F: highest node of firstextent
        std::vector<int32_t> depths;  // D: depth of F
        RmqStructure rmq;
        BatchedPredecessor pred; // over ranks, universe m
    };

    const CharArrays* arrays(char32_t c) const {
        auto it = chars_.find(c);
        return it == chars_.end() ? nullptr : &it->second;
    }

    // Range of A_c covered by v's subtree (or by right(v)'s subtree).
    // O(1) when c is in label(v); otherwise two predecessor queries.
    // nullopt when no position labeled c lies below.
    std::optional<IndexRange> descendant_range(NodeId v, char32_t c, QueryCounters& ctx) const;
    std::optional<IndexRange> right_descendant_range(NodeId v, char32_t c,
                                                     QueryCounters& ctx) const;

    // delta for an internal concat transition: all positions labeled c whose
    // first extent reaches right(v). Sorted output. Throws ContractError if
    // v is not a Concat node.
    std::vector<int32_t> delta_concat(NodeId v, char32_t c, QueryCounters& ctx) const;

    // delta for an internal star transition: all positions labeled c whose
    // first extent reaches v's star anchor (v itself when v is a Star node,
    // else its lowest proper Star ancestor). Empty when no anchor exists.
    std::vector<int32_t> delta_star(NodeId v, char32_t c, QueryCounters& ctx) const;

    // Emission into a shared buffer, given a precomputed range. Used by the
    // engine, which batches its range lookups.
    void emit_concat(NodeId v, char32_t c, IndexRange range, std::vector<int32_t>& out,
                     QueryCounters& ctx) const;
    void emit_star_anchor(NodeId anchor, char32_t c, IndexRange range, std::vector<int32_t>& out,
                          QueryCounters& ctx) const;

    // Stored-range lookup; nullopt when c is not in label(v).
    std::optional<IndexRange> stored_subtree_range(NodeId v, char32_t c) const;
    std::optional<IndexRange> stored_right_range(NodeId v, char32_t c) const;

    // Range of A_c inside an arbitrary rank interval, by predecessor search.
    std::optional<IndexRange> range_by_search(const CharArrays& arr, int32_t lo_rank,
                                              int32_t hi_rank, QueryCounters& ctx) const;

private:
    struct NodeRanges {
        // parallel to the label set of the node
        std::vector<char32_t> chars;
        std::vector<IndexRange> subtree;
        std::vector<IndexRange> right; // Concat only
    };

    static IndexRange locate(const std::vector<int32_t>& ranks, int32_t lo_rank, int32_t hi_rank);

    void emit(const CharArrays& arr, NodeId target, int32_t lo, int32_t hi,
              std::vector<int32_t>& out, QueryCounters& ctx) const;

    const ParseTree* tree_ = nullptr;
    const AnalysisTables* tables_ = nullptr;
    std::map<char32_t, CharArrays> chars_;
    std::vector<NodeRanges> node_ranges_;
    std::vector<IndexRange> position_anchor_range_; // per rank, in A_label(p)
};

} // namespace glush

#endif
