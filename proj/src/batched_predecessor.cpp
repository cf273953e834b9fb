#include "glush/batched_predecessor.hpp"

#include <algorithm>

#include "glush/errors.hpp"

namespace glush {

BatchedPredecessor::BatchedPredecessor(std::vector<int64_t> sorted_values, int64_t universe,
                                       PredecessorFactory factory)
    : values_(std::move(sorted_values)) {
    for (size_t i = 0; i + 1 < values_.size(); ++i)
        if (values_[i] >= values_[i + 1])
            throw ContractError("batched predecessor: set must be strictly increasing");
    universe_ = 1;
    log_u_ = 0;
    int64_t need = std::max<int64_t>(universe, values_.empty() ? 1 : values_.back() + 1);
    while (universe_ < need) {
        universe_ <<= 1;
        ++log_u_;
    }
    group_width_ = static_cast<size_t>(std::max(1, log_u_));

    // One level per trie depth. A node at level i covers the elements whose
    // top i bits match; since the element list is sorted, every node is an
    // index range and we can materialize nonempty nodes by splitting ranges.
    levels_.resize(static_cast<size_t>(log_u_) + 1);
    if (values_.empty()) return;

    struct Pending {
        size_t lo, hi;
        int level;
        int64_t base; // smallest universe value with this prefix
    };
    std::vector<Pending> work{{0, values_.size(), 0, 0}};
    while (!work.empty()) {
        Pending p = work.back();
        work.pop_back();
        TrieNode node;
        node.lo = p.lo;
        node.hi = p.hi;
        std::vector<int64_t> reps;
        for (size_t g = p.lo; g < p.hi; g += group_width_)
            reps.push_back(values_[std::min(g + group_width_, p.hi) - 1]);
        node.reps = factory(std::move(reps), universe_);
        size_t node_index = nodes_.size();
        levels_[static_cast<size_t>(p.level)].spans.push_back(
            {values_[p.lo], values_[p.hi - 1], node_index});
        nodes_.push_back(std::move(node));
        if (p.level < log_u_) {
            int shift = log_u_ - p.level - 1;
            int64_t mid = p.base + (int64_t{1} << shift);
            size_t split = static_cast<size_t>(
                std::lower_bound(values_.begin() + static_cast<ptrdiff_t>(p.lo),
                                 values_.begin() + static_cast<ptrdiff_t>(p.hi), mid) -
                values_.begin());
            // deeper levels inherit only nonempty halves
            if (split > p.lo) work.push_back({p.lo, split, p.level + 1, p.base});
            if (split < p.hi) work.push_back({split, p.hi, p.level + 1, mid});
        }
    }
    for (auto& level : levels_)
        std::sort(level.spans.begin(), level.spans.end(),
                  [](const Span& a, const Span& b) { return a.min_value < b.min_value; });
}

std::optional<size_t> BatchedPredecessor::query_node(const TrieNode& node, int64_t x,
                                                     QueryCounters& ctx) const {
    ++ctx.batched_deep;
    auto rep = node.reps->pred_index(x, ctx);
    // rep g covers values_[node.lo + g*width .. min(+width, hi)-1]; the true
    // predecessor sits in that group or the next one.
    size_t scan_from, scan_to; // [from, to)
    if (!rep) {
        scan_from = node.lo;
        scan_to = std::min(node.lo + group_width_, node.hi);
    } else {
        scan_from = node.lo + (*rep + 1) * group_width_;
        scan_to = std::min(scan_from + group_width_, node.hi);
    }
    std::optional<size_t> best;
    if (rep) best = node.lo + *rep * group_width_ + group_width_ - 1; // the rep itself
    if (best && *best >= node.hi) best = node.hi - 1;
    for (size_t i = scan_from; i < scan_to; ++i)
        if (values_[i] <= x) best = i;
    if (best && values_[*best] > x) best = std::nullopt;
    return best;
}

std::optional<size_t> BatchedPredecessor::pred_index(int64_t x, QueryCounters& ctx) const {
    if (values_.empty()) return std::nullopt;
    return query_node(nodes_[0], x, ctx);
}

int BatchedPredecessor::level_for_batch(size_t batch_size) const {
    int level = -1;
    for (int i = 0; i <= log_u_; ++i)
        if ((size_t{2} << i) <= batch_size) level = i;
    return level;
}

std::vector<std::optional<size_t>> BatchedPredecessor::batched_pred(
    const std::vector<int64_t>& batch, QueryCounters& ctx) const {
    for (size_t i = 0; i + 1 < batch.size(); ++i)
        if (batch[i] >= batch[i + 1])
            throw ContractError("batched predecessor: batch must be strictly increasing");
    std::vector<std::optional<size_t>> out(batch.size());
    if (values_.empty()) return out;
    int level = level_for_batch(batch.size());
    if (level < 0) {
        for (size_t i = 0; i < batch.size(); ++i) out[i] = query_node(nodes_[0], batch[i], ctx);
        return out;
    }
    const auto& spans = levels_[static_cast<size_t>(level)].spans;
    // Merge the sorted batch with the level's sorted spans.
    size_t s = 0;
    for (size_t i = 0; i < batch.size(); ++i) {
        int64_t x = batch[i];
        while (s < spans.size() && spans[s].max_value < x) ++s;
        if (s < spans.size() && spans[s].min_value <= x) {
            // inside the span of one subset: descend into its structure
            out[i] = query_node(nodes_[spans[s].node], x, ctx);
        } else if (s == 0) {
            out[i] = std::nullopt; // below every span
        } else {
            // between spans: the previous span's max is the answer
            out[i] = nodes_[spans[s - 1].node].hi - 1;
        }
    }
    return out;
}

} // namespace glush
