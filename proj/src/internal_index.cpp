#include "glush/internal_index.hpp"

#include <algorithm>

#include "glush/errors.hpp"

namespace glush {

InternalIndex::InternalIndex(const ParseTree& tree, const AnalysisTables& tables)
    : tree_(&tree), tables_(&tables) {
    const int32_t m = tree.num_positions();
    for (const auto& [c, ranks] : tree.pos_by_char) {
        CharArrays arr;
        arr.ranks = ranks;
        arr.fe_tops.reserve(ranks.size());
        std::vector<int32_t> depths;
        depths.reserve(ranks.size());
        for (int32_t r : ranks) {
            NodeId top = tables.fe_top[static_cast<size_t>(r)];
            arr.fe_tops.push_back(top);
            depths.push_back(tree.depth(top));
        }
        arr.depths = depths;
        arr.rmq = RmqStructure(std::move(depths));
        std::vector<int64_t> values(ranks.begin(), ranks.end());
        arr.pred = BatchedPredecessor(std::move(values), std::max<int64_t>(m, 1));
        chars_.emplace(c, std::move(arr));
    }

    // Stored ranges for every (internal node, labeled character) pair. Unions
    // never answer transitions but their ranges seed the segment walks.
    node_ranges_.resize(tree.size());
    for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
        const Node& nd = tree.at(v);
        if (nd.is_leaf()) continue;
        const auto& labels = tables.node_labels[static_cast<size_t>(v)];
        if (labels.empty()) continue;
        NodeRanges nr;
        nr.chars = labels;
        for (char32_t c : labels) {
            const auto& arr = chars_.at(c);
            nr.subtree.push_back(locate(arr.ranks, nd.lo_pos, nd.hi_pos));
            if (nd.kind == NodeKind::Concat) {
                const Node& rc = tree.at(nd.right);
                nr.right.push_back(locate(arr.ranks, rc.lo_pos, rc.hi_pos));
            }
        }
        node_ranges_[static_cast<size_t>(v)] = std::move(nr);
    }

    // Per-position range of its own character under its star anchor, so
    // delta_star at a labeled leaf is query free.
    position_anchor_range_.assign(static_cast<size_t>(m), IndexRange{});
    for (int32_t r = 0; r < m; ++r) {
        NodeId p = tree.positions[static_cast<size_t>(r)];
        NodeId anchor = tree.parent_star(p);
        if (anchor == kNoNode) continue;
        const Node& an = tree.at(anchor);
        const auto& arr = chars_.at(tree.at(p).ch);
        position_anchor_range_[static_cast<size_t>(r)] = locate(arr.ranks, an.lo_pos, an.hi_pos);
    }
}

IndexRange InternalIndex::locate(const std::vector<int32_t>& ranks, int32_t lo_rank,
                                 int32_t hi_rank) {
    IndexRange out;
    if (lo_rank > hi_rank) return out;
    auto lo = std::lower_bound(ranks.begin(), ranks.end(), lo_rank);
    auto hi = std::upper_bound(ranks.begin(), ranks.end(), hi_rank);
    out.lo = static_cast<int32_t>(lo - ranks.begin());
    out.hi = static_cast<int32_t>(hi - ranks.begin()) - 1;
    return out;
}

std::optional<IndexRange> InternalIndex::stored_subtree_range(NodeId v, char32_t c) const {
    const NodeRanges& nr = node_ranges_[static_cast<size_t>(v)];
    auto it = std::lower_bound(nr.chars.begin(), nr.chars.end(), c);
    if (it == nr.chars.end() || *it != c) return std::nullopt;
    return nr.subtree[static_cast<size_t>(it - nr.chars.begin())];
}

std::optional<IndexRange> InternalIndex::stored_right_range(NodeId v, char32_t c) const {
    const NodeRanges& nr = node_ranges_[static_cast<size_t>(v)];
    if (nr.right.empty()) return std::nullopt;
    auto it = std::lower_bound(nr.chars.begin(), nr.chars.end(), c);
    if (it == nr.chars.end() || *it != c) return std::nullopt;
    return nr.right[static_cast<size_t>(it - nr.chars.begin())];
}

std::optional<IndexRange> InternalIndex::range_by_search(const CharArrays& arr, int32_t lo_rank,
                                                         int32_t hi_rank,
                                                         QueryCounters& ctx) const {
    if (lo_rank > hi_rank) return std::nullopt;
    auto lo = arr.pred.succ_index(lo_rank, ctx);
    if (!lo || arr.ranks[*lo] > hi_rank) return std::nullopt;
    auto hi = arr.pred.pred_index(hi_rank, ctx);
    IndexRange out;
    out.lo = static_cast<int32_t>(*lo);
    out.hi = static_cast<int32_t>(*hi);
    return out;
}

std::optional<IndexRange> InternalIndex::descendant_range(NodeId v, char32_t c,
                                                          QueryCounters& ctx) const {
    auto it = chars_.find(c);
    if (it == chars_.end()) return std::nullopt;
    if (auto stored = stored_subtree_range(v, c)) {
        if (stored->empty()) return std::nullopt;
        return stored;
    }
    const Node& nd = tree_->at(v);
    return range_by_search(it->second, nd.lo_pos, nd.hi_pos, ctx);
}

std::optional<IndexRange> InternalIndex::right_descendant_range(NodeId v, char32_t c,
                                                                QueryCounters& ctx) const {
    if (tree_->kind(v) != NodeKind::Concat)
        throw ContractError("right_descendant_range: not a concat node");
    auto it = chars_.find(c);
    if (it == chars_.end()) return std::nullopt;
    if (auto stored = stored_right_range(v, c)) {
        if (stored->empty()) return std::nullopt;
        return stored;
    }
    const Node& rc = tree_->at(tree_->right(v));
    return range_by_search(it->second, rc.lo_pos, rc.hi_pos, ctx);
}

void InternalIndex::emit(const CharArrays& arr, NodeId target, int32_t lo, int32_t hi,
                         std::vector<int32_t>& out, QueryCounters& ctx) const {
    // In-order range splitting with an explicit stack. The RMQ picks a
    // position with the highest first-extent top in the range; it reaches
    // the target iff any position in the range does.
    struct Frame {
        int32_t lo, hi, emit_index;
    };
    thread_local std::vector<Frame> stack; // emit never nests
    stack.clear();
    stack.push_back({lo, hi, -1});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.emit_index >= 0) {
            out.push_back(arr.ranks[static_cast<size_t>(f.emit_index)]);
            continue;
        }
        if (f.lo > f.hi) continue;
        ++ctx.rmq;
        int32_t j = arr.rmq.query(static_cast<size_t>(f.lo), static_cast<size_t>(f.hi));
        if (!tree_->is_ancestor(arr.fe_tops[static_cast<size_t>(j)], target)) continue;
        stack.push_back({j + 1, f.hi, -1});
        stack.push_back({0, 0, j});
        stack.push_back({f.lo, j - 1, -1});
    }
}

void InternalIndex::emit_concat(NodeId v, char32_t c, IndexRange range, std::vector<int32_t>& out,
                                QueryCounters& ctx) const {
    if (range.empty()) return;
    auto it = chars_.find(c);
    if (it == chars_.end()) return;
    emit(it->second, tree_->right(v), range.lo, range.hi, out, ctx);
}

void InternalIndex::emit_star_anchor(NodeId anchor, char32_t c, IndexRange range,
                                     std::vector<int32_t>& out, QueryCounters& ctx) const {
    if (range.empty()) return;
    auto it = chars_.find(c);
    if (it == chars_.end()) return;
    emit(it->second, anchor, range.lo, range.hi, out, ctx);
}

std::vector<int32_t> InternalIndex::delta_concat(NodeId v, char32_t c, QueryCounters& ctx) const {
    if (tree_->kind(v) != NodeKind::Concat)
        throw ContractError("delta_concat: not a concat node");
    std::vector<int32_t> out;
    auto range = right_descendant_range(v, c, ctx);
    if (range) emit_concat(v, c, *range, out, ctx);
    return out;
}

std::vector<int32_t> InternalIndex::delta_star(NodeId v, char32_t c, QueryCounters& ctx) const {
    std::vector<int32_t> out;
    NodeId anchor = tree_->star_anchor(v);
    if (anchor == kNoNode) return out;
    auto it = chars_.find(c);
    if (it == chars_.end()) return out;

    std::optional<IndexRange> range;
    if (auto stored = stored_subtree_range(anchor, c)) {
        range = stored->empty() ? std::nullopt : std::optional<IndexRange>(*stored);
    } else if (tree_->kind(v) == NodeKind::Literal && tree_->at(v).ch == c) {
        const IndexRange& pr = position_anchor_range_[static_cast<size_t>(tree_->at(v).pos)];
        range = pr.empty() ? std::nullopt : std::optional<IndexRange>(pr);
    } else {
        const Node& an = tree_->at(anchor);
        range = range_by_search(it->second, an.lo_pos, an.hi_pos, ctx);
    }
    if (range) emit(it->second, anchor, range->lo, range->hi, out, ctx);
    return out;
}

} // namespace glush
