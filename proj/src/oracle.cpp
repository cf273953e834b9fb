#include "glush/oracle.hpp"

#include <algorithm>

#include "glush/errors.hpp"

namespace glush {

OracleAutomaton build_oracle(const ParseTree& tree, const AnalysisTables& tables) {
    OracleAutomaton a;
    const int32_t m = tree.num_positions();
    if (m > 0 && tables.follow.empty())
        throw ContractError("build_oracle: tables were built without follow sets");
    a.num_states = m + 1;
    auto add_edge = [&](int32_t src, int32_t rank) {
        char32_t c = tree.label_of_position(rank);
        a.edges[{src, c}].push_back(rank + 1);
    };
    for (int32_t q : tables.first[static_cast<size_t>(tree.root)]) add_edge(0, q);
    for (int32_t p = 0; p < m; ++p)
        for (int32_t q : tables.follow[static_cast<size_t>(p)]) add_edge(p + 1, q);
    for (auto& [key, targets] : a.edges) {
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    }
    for (int32_t p : tables.last[static_cast<size_t>(tree.root)]) a.accepting.push_back(p + 1);
    std::sort(a.accepting.begin(), a.accepting.end());
    if (tables.nullable[static_cast<size_t>(tree.root)])
        a.accepting.insert(a.accepting.begin(), 0);
    return a;
}

std::vector<int32_t> oracle_delta(const OracleAutomaton& a,
                                  const std::vector<int32_t>& states, char32_t c) {
    for (size_t i = 0; i + 1 < states.size(); ++i)
        if (states[i] >= states[i + 1])
            throw ContractError("oracle_delta: state set must be strictly increasing");
    std::vector<int32_t> out;
    for (int32_t s : states) {
        if (const auto* t = a.targets(s, c)) out.insert(out.end(), t->begin(), t->end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

OracleRun oracle_match(const OracleAutomaton& a, std::u32string_view text) {
    OracleRun run;
    run.state_sets.reserve(text.size() + 1);
    run.state_sets.push_back({0});
    for (char32_t c : text)
        run.state_sets.push_back(oracle_delta(a, run.state_sets.back(), c));
    for (const auto& s : run.state_sets) run.density += s.size();
    for (int32_t s : run.state_sets.back())
        if (a.is_accepting(s)) run.accepted = true;
    return run;
}

OracleRun oracle_match_utf8(const OracleAutomaton& a, std::string_view text) {
    return oracle_match(a, decode_text(text));
}

std::u32string decode_text(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        char32_t c;
        if (decode_utf8(bytes, i, c)) {
            out.push_back(c);
        } else {
            // lone byte sentinel in a lacuna of the scalar value space
            out.push_back(0x110000u + static_cast<unsigned char>(bytes[i]));
            ++i;
        }
    }
    return out;
}

} // namespace glush
