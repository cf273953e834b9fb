#ifndef glush_engine_hpp
#define glush_engine_hpp

#include <optional>
#include <vector>

#include "glush/analysis.hpp"
#include "glush/first_label.hpp"
#include "glush/internal_index.hpp"
#include "glush/lca.hpp"
#include "glush/parse_tree.hpp"

namespace glush {

// Compact O(|P|) view of the subtree induced by a position set P and its
// ancestors: the positions as leaves, lowest common ancestors of adjacent
// leaves as branching nodes, and one segment per node running up to the
// next branching node (the topmost segment ends at the root).
struct TransitionTree {
    struct TNode {
        NodeId rnode = kNoNode;
        int32_t rank = -1;        // position rank for leaves
        int32_t parent = -1;      // T-index of the branching node above
        int32_t child[2] = {-1, -1}; // T-children hanging off left/right side
        bool branching = false;
        NodeId highest_le = kNoNode; // highest node of lastextent(P ∩ Pos(rnode))
        bool oplive = false;         // Concat with left child in lastextent(P)
        bool odom = false;           // ⊙-dominated by an ⊙-live node of T
        bool wodom = false;          // weakly ⊙-dominated by an ⊙-live node
        int32_t domdepth = INT32_MIN; // deepest right(u) over ⊙-live u having
                                      // this node in right(u)'s subtree
    };
    struct Segment {
        int32_t bot = -1; // T-index; top is nodes[bot].parent (or the root)
        bool star_segment = false;
        int32_t next_star_above = -1; // segment index, -1 = none
    };

    std::vector<TNode> nodes;      // in Euler-tin order; parents precede children
    std::vector<Segment> segments; // segments[i].bot == i
    std::vector<int32_t> leaf_ranks;

    void clear() {
        nodes.clear();
        segments.clear();
        leaf_ranks.clear();
    }

    // top of segment i as a node of R, or kNoNode for the topmost segment
    NodeId top_rnode(size_t i) const {
        int32_t p = nodes[static_cast<size_t>(segments[i].bot)].parent;
        return p < 0 ? kNoNode : nodes[static_cast<size_t>(p)].rnode;
    }
};

namespace detail {

// working state of one transition; reused across calls through the scratch
struct Candidate {
    NodeId node = kNoNode;
    bool concat = false;      // concat vs star emission
    bool range_ready = false; // unlabeled candidates get ranges resolved late
    bool contributed = false;
    IndexRange range;                 // valid when range_ready
    std::optional<size_t> pending_lo; // known lo index while hi is pending
};

struct SegmentSeeds {
    std::optional<size_t> q_concat; // index into A_c: seed for concat chains
    std::optional<size_t> q_minus, q_plus; // star seeds
    std::optional<size_t> pending_right_lo, pending_right_hi;
    std::optional<IndexRange> bot_right_range; // resolved for live bots
    bool want_concat = false;
    bool want_star = false;
    // index arithmetic deferred until query results are in
    bool derive_concat_from_plus = false;
    bool derive_concat_from_minus = false;
    bool right_hi_from_minus = false;
};

} // namespace detail

// Per-call scratch reused across state-set transitions so a simulation run
// keeps its footprint at two state sets plus these buffers.
struct TransitionScratch {
    TransitionTree t;
    std::vector<int32_t> out;
    std::vector<detail::SegmentSeeds> seeds;
    std::vector<detail::Candidate> cands;
    std::vector<std::optional<NodeId>> seed2, seed3, fl2, fl3;
    std::vector<NodeId> fl_nodes;
    size_t bytes_in_use() const;
};

// The state-set transition engine: the internal-transition index plus lca,
// first-label, and four pointer families over labeled nodes.
class Engine {
public:
    Engine(const ParseTree& tree, const AnalysisTables& tables, const InternalIndex& index,
           const LcaStructure& lca, const FirstLabelStructure& firstlabel);

    const ParseTree& tree() const { return *tree_; }
    const AnalysisTables& tables() const { return *tables_; }
    const InternalIndex& index() const { return *index_; }

    // Pointer accessors (kNoNode when absent). Defined for nodes whose label
    // contains c; endlast_star for Star nodes only.
    NodeId next_concat(NodeId v, char32_t c) const;   // lowest proper ancestor u,
        // Concat, v in left(u)'s subtree, c in label(u), nonempty concat delta
    NodeId next_star(NodeId v, char32_t c) const;     // lowest proper Star ancestor,
        // labeled c, nonempty star delta
    NodeId endfirst_star(NodeId v, char32_t c) const; // highest proper Star ancestor,
        // labeled c, with first(v) contained in its first set
    NodeId endlast_star(NodeId v) const;              // highest proper Star ancestor
        // with last(v) contained in its last set

    // Builds the compact tree with every annotation: shape, lastextent tops,
    // liveness and domination flags, star segments. Throws ContractError on
    // empty or unsorted input.
    void build_transition_tree(const std::vector<int32_t>& ranks, TransitionTree& t) const;

    // Relevant concat-transition nodes of delta(P, c), per segment chains.
    // Every returned node has a nonempty contribution.
    std::vector<NodeId> collect_concat_nodes(const TransitionTree& t, char32_t c,
                                             QueryCounters& ctx) const;
    // Star-transition nodes whose contributions union to the star part.
    std::vector<NodeId> collect_star_nodes(const TransitionTree& t, char32_t c,
                                           QueryCounters& ctx) const;

    // delta(P, c) for a strictly increasing position set P; sorted output.
    // All predecessor and first-label lookups are staged through batched
    // queries. Throws ContractError on unsorted input.
    std::vector<int32_t> state_set_transition(const std::vector<int32_t>& ranks, char32_t c,
                                              QueryCounters& ctx) const;
    std::vector<int32_t> state_set_transition(const std::vector<int32_t>& ranks, char32_t c,
                                              QueryCounters& ctx, TransitionScratch& scratch) const;

private:
    using Candidate = detail::Candidate;
    using SegmentSeeds = detail::SegmentSeeds;

    // Chain walking shared by the batched transition and the direct collect
    // operations. Appends candidates; never resolves unlabeled ranges.
    void walk_concat_segment(const TransitionTree& t, size_t seg, char32_t c,
                             const SegmentSeeds& seeds, std::optional<NodeId> firstlabel_of_seed,
                             std::vector<Candidate>& out, QueryCounters& ctx) const;
    void walk_star_segment(const TransitionTree& t, size_t seg, char32_t c,
                           const SegmentSeeds& seeds, std::optional<NodeId> firstlabel_of_seed,
                           std::vector<Candidate>& out, QueryCounters& ctx) const;

    // Seed plan helpers.
    bool chain_viable(const TransitionTree& t, size_t seg) const;
    std::optional<NodeId> concat_seed_node(const TransitionTree& t, size_t seg, char32_t c,
                                           const SegmentSeeds& seeds) const;
    std::optional<NodeId> star_seed_node(const TransitionTree& t, size_t seg, char32_t c,
                                         const SegmentSeeds& seeds) const;

    bool on_segment(const TransitionTree& t, size_t seg, NodeId x) const;
    bool in_le(const TransitionTree& t, size_t seg, NodeId x) const;

    void compute_seeds(const TransitionTree& t, char32_t c, std::vector<SegmentSeeds>& seeds,
                       bool batched, QueryCounters& ctx) const;
    void resolve_ranges(std::vector<Candidate>& cands, char32_t c, bool batched,
                        QueryCounters& ctx) const;
    void emit_candidates(std::vector<Candidate>& cands, char32_t c, std::vector<int32_t>& out,
                         QueryCounters& ctx) const;

    NodeId pointer_at(const std::vector<NodeId>& table, NodeId v, char32_t c) const;

    const ParseTree* tree_;
    const AnalysisTables* tables_;
    const InternalIndex* index_;
    const LcaStructure* lca_;
    const FirstLabelStructure* firstlabel_;

    // parallel to tables_->node_labels flattened per node
    std::vector<std::vector<char32_t>> ptr_chars_;
    std::vector<std::vector<NodeId>> next_concat_;
    std::vector<std::vector<NodeId>> next_star_;
    std::vector<std::vector<NodeId>> endfirst_star_;
    std::vector<NodeId> endlast_star_;
};

} // namespace glush

#endif
