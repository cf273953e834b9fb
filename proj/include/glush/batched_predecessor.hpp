#ifndef glush_batched_predecessor_hpp
#define glush_batched_predecessor_hpp

#include <cstdint>
#include <optional>
#include <vector>

#include "glush/predecessor.hpp"

namespace glush {

// Batched predecessor search: a conceptual binary trie over the universe,
// one predecessor structure per (nonempty) trie node, and per-level sorted
// span lists so a sorted query batch of size |P| only touches structures
// whose universe has shrunk to u/|P|.
//
// Space is reduced by grouping ~log2(u) consecutive elements per node and
// keeping only group maxima in the node structure; a query finishes with a
// bounded scan of the group holding the answer and the next one.
class BatchedPredecessor {
public:
    BatchedPredecessor() = default;

    // `sorted_values` strictly increasing, all < universe. The universe is
    // padded up to a power of two.
    BatchedPredecessor(std::vector<int64_t> sorted_values, int64_t universe,
                       PredecessorFactory factory = &make_sorted_array_predecessor);

    size_t size() const { return values_.size(); }
    int64_t universe() const { return universe_; }
    int64_t value_at(size_t i) const { return values_[i]; }
    const std::vector<int64_t>& values() const { return values_; }

    int levels() const { return static_cast<int>(levels_.size()); }
    size_t level_list_size(int i) const { return levels_[static_cast<size_t>(i)].spans.size() * 2; }

    // Element-wise predecessor indices for a strictly increasing batch.
    // Throws ContractError on unsorted input. Equals pointwise pred().
    std::vector<std::optional<size_t>> batched_pred(const std::vector<int64_t>& batch,
                                                    QueryCounters& ctx) const;

    // Level that batched_pred would pick for a batch of this size: the
    // largest i with 2^(i+1) <= batch_size, capped at the deepest level;
    // -1 means the batch is too small and the root structure is queried
    // directly.
    int level_for_batch(size_t batch_size) const;

    // Plain single query through the same node machinery (root node).
    std::optional<size_t> pred_index(int64_t x, QueryCounters& ctx) const;

    // Derived from one predecessor query.
    std::optional<size_t> succ_index(int64_t x, QueryCounters& ctx) const {
        auto p = pred_index(x, ctx);
        if (!p) return values_.empty() ? std::nullopt : std::optional<size_t>(0);
        if (values_[*p] == x) return p;
        return *p + 1 < values_.size() ? std::optional<size_t>(*p + 1) : std::nullopt;
    }

private:
    struct TrieNode {
        size_t lo = 0, hi = 0; // element index range [lo, hi)
        std::unique_ptr<PredecessorStructure> reps; // group maxima
    };
    struct Span {
        int64_t min_value, max_value;
        size_t node; // index into nodes_
    };
    struct Level {
        std::vector<Span> spans; // sorted, disjoint; L_i = their endpoints
    };

    std::optional<size_t> query_node(const TrieNode& node, int64_t x, QueryCounters& ctx) const;

    std::vector<int64_t> values_;
    int64_t universe_ = 1;
    int log_u_ = 0;
    size_t group_width_ = 1;
    std::vector<TrieNode> nodes_;
    std::vector<Level> levels_;
};

} // namespace glush

#endif
