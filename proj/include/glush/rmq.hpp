#ifndef glush_rmq_hpp
#define glush_rmq_hpp

#include <cstdint>
#include <vector>

#include "glush/errors.hpp"

namespace glush {

// Sparse-table RMQ over a fixed integer array. query(l, r) returns the index
// of the minimum in the inclusive range [l, r]; ties break to the smallest
// index.
class RmqStructure {
public:
    RmqStructure() = default;

    explicit RmqStructure(std::vector<int32_t> values) : values_(std::move(values)) {
        const size_t n = values_.size();
        if (n == 0) return;
        size_t levels = 1;
        while ((size_t{1} << levels) <= n) ++levels;
        table_.resize(levels);
        table_[0].resize(n);
        for (size_t j = 0; j < n; ++j) table_[0][j] = static_cast<int32_t>(j);
        for (size_t k = 1; k < levels; ++k) {
            size_t half = size_t{1} << (k - 1);
            table_[k].resize(n - (size_t{1} << k) + 1);
            for (size_t j = 0; j + (size_t{1} << k) <= n; ++j)
                table_[k][j] = pick(table_[k - 1][j], table_[k - 1][j + half]);
        }
    }

    size_t size() const { return values_.size(); }
    int32_t value_at(size_t i) const { return values_[i]; }

    int32_t query(size_t l, size_t r) const {
        if (l > r || r >= values_.size()) throw RangeError("rmq: invalid interval");
        size_t width = r - l + 1;
        size_t k = 0;
        while ((size_t{2} << k) <= width) ++k;
        return pick(table_[k][l], table_[k][r + 1 - (size_t{1} << k)]);
    }

private:
    int32_t pick(int32_t a, int32_t b) const {
        if (values_[static_cast<size_t>(a)] != values_[static_cast<size_t>(b)])
            return values_[static_cast<size_t>(a)] <= values_[static_cast<size_t>(b)] ? a : b;
        return a <= b ? a : b;
    }

    std::vector<int32_t> values_;
    std::vector<std::vector<int32_t>> table_;
};

} // namespace glush

#endif
