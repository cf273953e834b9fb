#ifndef glush_predecessor_hpp
#define glush_predecessor_hpp

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace glush {

// Per-call instrumentation. Structures are immutable after build; counters
// are owned by the caller so concurrent queries stay safe.
struct QueryCounters {
    uint64_t pred = 0;          // predecessor/successor structure queries
    uint64_t firstlabel = 0;    // first-label queries
    uint64_t rmq = 0;           // depth-array range-minimum probes
    uint64_t pointer_steps = 0; // next/endfirst pointer follows
    uint64_t batched_deep = 0;  // per-node structure hits inside batches

    QueryCounters& operator+=(const QueryCounters& o) {
        pred += o.pred;
        firstlabel += o.firstlabel;
        rmq += o.rmq;
        pointer_steps += o.pointer_steps;
        batched_deep += o.batched_deep;
        return *this;
    }
};

// Static predecessor/successor search over a sorted set of integers drawn
// from [0, universe). Queries return indices into the sorted set.
class PredecessorStructure {
public:
    virtual ~PredecessorStructure() = default;

    virtual size_t size() const = 0;
    virtual int64_t universe() const = 0;
    virtual int64_t value_at(size_t i) const = 0;

    // index of max{s <= x}, or nullopt
    virtual std::optional<size_t> pred_index(int64_t x, QueryCounters& ctx) const = 0;
    // index of min{s >= x}, or nullopt
    virtual std::optional<size_t> succ_index(int64_t x, QueryCounters& ctx) const = 0;

    std::optional<int64_t> pred(int64_t x, QueryCounters& ctx) const {
        auto i = pred_index(x, ctx);
        if (!i) return std::nullopt;
        return value_at(*i);
    }
    std::optional<int64_t> succ(int64_t x, QueryCounters& ctx) const {
        auto i = succ_index(x, ctx);
        if (!i) return std::nullopt;
        return value_at(*i);
    }
};

// Default implementation: binary search over the sorted array. Stands in for
// the van Emde Boas / y-fast structures; everything above only relies on the
// interface, so a genuine loglog structure can be swapped in.
class SortedArrayPredecessor final : public PredecessorStructure {
public:
    SortedArrayPredecessor(std::vector<int64_t> sorted_values, int64_t universe)
        : values_(std::move(sorted_values)), universe_(universe) {}

    size_t size() const override { return values_.size(); }
    int64_t universe() const override { return universe_; }
    int64_t value_at(size_t i) const override { return values_[i]; }

    std::optional<size_t> pred_index(int64_t x, QueryCounters& ctx) const override {
        ++ctx.pred;
        auto it = std::upper_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin()) return std::nullopt;
        return static_cast<size_t>(it - values_.begin() - 1);
    }

    std::optional<size_t> succ_index(int64_t x, QueryCounters& ctx) const override {
        ++ctx.pred;
        auto it = std::lower_bound(values_.begin(), values_.end(), x);
        if (it == values_.end()) return std::nullopt;
        return static_cast<size_t>(it - values_.begin());
    }

private:
    std::vector<int64_t> values_;
    int64_t universe_;
};

using PredecessorFactory =
    std::unique_ptr<PredecessorStructure> (*)(std::vector<int64_t>, int64_t);

inline std::unique_ptr<PredecessorStructure> make_sorted_array_predecessor(
    std::vector<int64_t> values, int64_t universe) {
    return std::make_unique<SortedArrayPredecessor>(std::move(values), universe);
}

} // namespace glush

#endif
