#ifndef glush_oracle_hpp
#define glush_oracle_hpp

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "glush/analysis.hpp"
#include "glush/parse_tree.hpp"

namespace glush {

// Explicit position automaton built directly from the definition. State 0 is
// the start state p0; state r+1 is the position of rank r. Deliberately
// naive: this is the ground truth the engine is tested against.
struct OracleAutomaton {
    int32_t num_states = 0; // m + 1
    // transitions grouped by (source, character) into sorted target sets
    std::map<std::pair<int32_t, char32_t>, std::vector<int32_t>> edges;
    std::vector<int32_t> accepting; // sorted

    const std::vector<int32_t>* targets(int32_t state, char32_t c) const {
        auto it = edges.find({state, c});
        return it == edges.end() ? nullptr : &it->second;
    }
    bool is_accepting(int32_t s) const {
        return std::binary_search(accepting.begin(), accepting.end(), s);
    }
};

struct OracleRun {
    bool accepted = false;
    std::vector<std::vector<int32_t>> state_sets; // n+1 sets, states
    uint64_t density = 0;                         // sum of set sizes
};

OracleAutomaton build_oracle(const ParseTree& tree, const AnalysisTables& tables);

// Union of single-state transitions over a sorted state set. Throws
// ContractError if `states` is not strictly increasing.
std::vector<int32_t> oracle_delta(const OracleAutomaton& a,
                                  const std::vector<int32_t>& states, char32_t c);

OracleRun oracle_match(const OracleAutomaton& a, std::u32string_view text);
OracleRun oracle_match_utf8(const OracleAutomaton& a, std::string_view text);

// Lenient UTF-8 decode for subject texts: bytes that do not form a valid
// scalar value become private sentinels that match no pattern character.
std::u32string decode_text(std::string_view bytes);

} // namespace glush

#endif
