#ifndef glush_matcher_hpp
#define glush_matcher_hpp

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "glush/engine.hpp"
#include "glush/oracle.hpp"

namespace glush {

struct MatchReport {
    bool accepted = false;
    int64_t n = 0; // text length in characters
    int32_t m = 0; // number of positions
    uint64_t density = 0;
    std::vector<int64_t> step_sizes; // n + 1 entries
    QueryCounters counters;
    int64_t micros = 0;
};

// Everything derived from one pattern, immutable after compile() and safe
// to share across threads.
class CompiledPattern {
public:
    static std::unique_ptr<CompiledPattern> compile(std::string_view pattern);

    const ParseTree& tree() const { return tree_; }
    const AnalysisTables& tables() const { return tables_; }
    const Engine& engine() const { return *engine_; }
    int32_t num_positions() const { return tree_.num_positions(); }
    bool nullable() const { return tables_.nullable[static_cast<size_t>(tree_.root)] != 0; }

    // start-state transitions: first(R) filtered by character
    const std::vector<int32_t>* first_by_char(char32_t c) const {
        auto it = first_by_char_.find(c);
        return it == first_by_char_.end() ? nullptr : &it->second;
    }
    bool is_last(int32_t rank) const { return last_bitmap_[static_cast<size_t>(rank)] != 0; }

    // One simulation over the text, keeping two state sets alive.
    MatchReport run(std::u32string_view text) const;
    MatchReport run_utf8(std::string_view text) const;

private:
    CompiledPattern() = default;

    ParseTree tree_;
    AnalysisTables tables_;
    std::unique_ptr<InternalIndex> index_;
    std::unique_ptr<LcaStructure> lca_;
    std::unique_ptr<FirstLabelStructure> firstlabel_;
    std::unique_ptr<Engine> engine_;
    std::map<char32_t, std::vector<int32_t>> first_by_char_;
    std::vector<char> last_bitmap_;
};

MatchReport match(std::string_view pattern, std::string_view text);
MatchReport density_profile(std::string_view pattern, std::string_view text);

} // namespace glush

#endif
