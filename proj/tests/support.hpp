#ifndef glush_tests_support_hpp
#define glush_tests_support_hpp

#include <random>
#include <set>
#include <string>
#include <vector>

#include "glush/analysis.hpp"
#include "glush/oracle.hpp"
#include "glush/parse_tree.hpp"

namespace glush::testing {

// ---------------------------------------------------------------------------
// Random pattern generator. Fully parenthesized output so any tree shape can
// occur, not just the parser's left-leaning default.

struct GenOptions {
    int max_positions = 12;
    int alphabet = 2;      // characters 'a', 'b', ...
    double epsilon_p = 0.08;
    double star_p = 0.3;
    int max_depth = 8;
};

class PatternGen {
public:
    PatternGen(uint64_t seed, GenOptions opt = {}) : rng_(seed), opt_(opt) {}

    std::string next() {
        int budget = 1 + static_cast<int>(rng_() % static_cast<uint64_t>(opt_.max_positions));
        return gen(budget, 0);
    }

    std::mt19937_64& rng() { return rng_; }

private:
    double coin() { return std::uniform_real_distribution<>(0, 1)(rng_); }

    std::string literal() {
        char c = static_cast<char>('a' + static_cast<int>(rng_() % static_cast<uint64_t>(opt_.alphabet)));
        return std::string(1, c);
    }

    std::string gen(int budget, int depth) {
        if (budget <= 0) return "()";
        if (depth >= opt_.max_depth || budget == 1) {
            if (coin() < opt_.epsilon_p) return "()";
            std::string atom = literal();
            while (coin() < opt_.star_p / 2) atom = "(" + atom + ")*";
            return atom;
        }
        double r = coin();
        if (r < opt_.epsilon_p) return "()";
        if (r < 0.35) {
            std::string atom = literal();
            if (coin() < opt_.star_p) atom = "(" + atom + ")*";
            return atom;
        }
        if (r < 0.55) return "(" + gen(budget, depth + 1) + ")*";
        int lhs = 1 + static_cast<int>(rng_() % static_cast<uint64_t>(budget));
        if (lhs >= budget) lhs = budget - 1;
        if (lhs < 1) lhs = 1;
        std::string a = gen(lhs, depth + 1);
        std::string b = gen(budget - lhs, depth + 1);
        if (coin() < 0.5) return "(" + a + b + ")";
        return "(" + a + "|" + b + ")";
    }

    std::mt19937_64 rng_;
    GenOptions opt_;
};

// Every pattern with at most `max_nodes` parse-tree nodes over {a, b}.
inline void enumerate_patterns(int max_nodes, std::vector<std::string>& out) {
    std::vector<std::vector<std::string>> by_size(static_cast<size_t>(max_nodes) + 1);
    if (max_nodes >= 1) by_size[1] = {"a", "b", "()"};
    for (int n = 2; n <= max_nodes; ++n) {
        for (const auto& sub : by_size[static_cast<size_t>(n - 1)])
            by_size[static_cast<size_t>(n)].push_back("(" + sub + ")*");
        for (int l = 1; l <= n - 2; ++l)
            for (const auto& a : by_size[static_cast<size_t>(l)])
                for (const auto& b : by_size[static_cast<size_t>(n - 1 - l)]) {
                    by_size[static_cast<size_t>(n)].push_back("(" + a + b + ")");
                    by_size[static_cast<size_t>(n)].push_back("(" + a + "|" + b + ")");
                }
    }
    for (auto& bucket : by_size)
        for (auto& p : bucket) out.push_back(std::move(p));
}

// ---------------------------------------------------------------------------
// Language expansion: all strings of length <= limit, straight off the
// grammar. Independent of the automaton machinery.

inline std::set<std::u32string> language(const ParseTree& t, NodeId v, size_t limit) {
    const Node& nd = t.at(v);
    std::set<std::u32string> out;
    switch (nd.kind) {
    case NodeKind::Epsilon:
        out.insert(U"");
        break;
    case NodeKind::Literal:
        if (limit >= 1) out.insert(std::u32string(1, nd.ch));
        break;
    case NodeKind::Union: {
        out = language(t, nd.left, limit);
        for (auto& s : language(t, nd.right, limit)) out.insert(s);
        break;
    }
    case NodeKind::Concat: {
        auto ls = language(t, nd.left, limit);
        auto rs = language(t, nd.right, limit);
        for (const auto& a : ls)
            for (const auto& b : rs)
                if (a.size() + b.size() <= limit) out.insert(a + b);
        break;
    }
    case NodeKind::Star: {
        auto base = language(t, nd.left, limit);
        out.insert(U"");
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<std::u32string> add;
            for (const auto& a : out)
                for (const auto& b : base)
                    if (!b.empty() && a.size() + b.size() <= limit) {
                        auto s = a + b;
                        if (!out.count(s)) add.push_back(std::move(s));
                    }
            for (auto& s : add) {
                out.insert(std::move(s));
                grew = true;
            }
        }
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force transition machinery, straight from the definitions.

inline bool is_proper_ancestor(const ParseTree& t, NodeId u, NodeId v) {
    return u != v && t.is_ancestor(u, v);
}

// firstextent(rank) as an explicit node set
inline std::set<NodeId> brute_first_extent(const ParseTree& t, const AnalysisTables& tb,
                                           int32_t rank) {
    std::set<NodeId> out;
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v)
        if (std::binary_search(tb.first[static_cast<size_t>(v)].begin(),
                               tb.first[static_cast<size_t>(v)].end(), rank))
            out.insert(v);
    return out;
}

inline std::set<NodeId> brute_last_extent(const ParseTree& t, const AnalysisTables& tb,
                                          int32_t rank) {
    std::set<NodeId> out;
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v)
        if (std::binary_search(tb.last[static_cast<size_t>(v)].begin(),
                               tb.last[static_cast<size_t>(v)].end(), rank))
            out.insert(v);
    return out;
}

inline bool set_contains(const std::vector<int32_t>& sorted, int32_t x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

inline bool intersects(const std::vector<int32_t>& sorted, const std::vector<int32_t>& other) {
    for (int32_t x : other)
        if (set_contains(sorted, x)) return true;
    return false;
}

inline bool subset_of(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
    for (int32_t x : a)
        if (!set_contains(b, x)) return false;
    return true;
}

// internal transitions by definition
inline std::vector<int32_t> brute_delta_concat(const ParseTree& t, const AnalysisTables& tb,
                                               NodeId v, char32_t c) {
    std::vector<int32_t> out;
    const auto* pos = t.positions_of_char(c);
    if (!pos || t.kind(v) != NodeKind::Concat) return out;
    for (int32_t q : *pos)
        if (set_contains(tb.first[static_cast<size_t>(t.right(v))], q)) out.push_back(q);
    return out;
}

inline std::vector<int32_t> brute_delta_star(const ParseTree& t, const AnalysisTables& tb,
                                             NodeId v, char32_t c) {
    std::vector<int32_t> out;
    NodeId anchor = t.star_anchor(v);
    const auto* pos = t.positions_of_char(c);
    if (!pos || anchor == kNoNode) return out;
    for (int32_t q : *pos)
        if (set_contains(tb.first[static_cast<size_t>(anchor)], q)) out.push_back(q);
    return out;
}

struct BruteTransitionNodes {
    std::vector<NodeId> n_concat, n_star;         // all transition nodes
    std::vector<NodeId> rel_concat, rel_star;     // relevant ones
};

inline BruteTransitionNodes brute_transition_nodes(const ParseTree& t, const AnalysisTables& tb,
                                                   const std::vector<int32_t>& P, char32_t c) {
    BruteTransitionNodes out;
    const auto* pos = t.positions_of_char(c);
    if (!pos) return out;
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
        if (t.kind(v) == NodeKind::Concat) {
            if (intersects(tb.last[static_cast<size_t>(t.left(v))], P) &&
                intersects(tb.first[static_cast<size_t>(t.right(v))], *pos))
                out.n_concat.push_back(v);
        }
    }
    // star transition nodes: anchors of lcas of (p in P, q in Pos_c) that
    // are in lastextent(P) and firstextent(Pos_c)
    std::set<NodeId> star_set;
    for (int32_t p : P)
        for (int32_t q : *pos) {
            NodeId a = t.positions[static_cast<size_t>(p)];
            NodeId b = t.positions[static_cast<size_t>(q)];
            NodeId l = a;
            while (!t.is_ancestor(l, b)) l = t.parent(l);
            NodeId u = t.star_anchor(l); // lcas are never Star nodes themselves
            if (u == kNoNode) continue;
            if (!intersects(tb.last[static_cast<size_t>(u)], P)) continue;
            if (!intersects(tb.first[static_cast<size_t>(u)], *pos)) continue;
            star_set.insert(u);
        }
    out.n_star.assign(star_set.begin(), star_set.end());

    for (NodeId v : out.n_concat) {
        bool dominated = false;
        for (NodeId u : out.n_concat)
            if (is_proper_ancestor(t, u, v) &&
                subset_of(tb.first[static_cast<size_t>(t.right(v))],
                          tb.first[static_cast<size_t>(t.right(u))]))
                dominated = true;
        if (!dominated) out.rel_concat.push_back(v);
    }
    for (NodeId v : out.n_star) {
        bool dominated = false;
        for (NodeId u : out.n_star)
            if (is_proper_ancestor(t, u, v) &&
                subset_of(tb.first[static_cast<size_t>(v)], tb.first[static_cast<size_t>(u)]))
                dominated = true;
        if (!dominated) out.rel_star.push_back(v);
    }
    return out;
}

// positions as oracle states and back
inline std::vector<int32_t> ranks_to_states(const std::vector<int32_t>& ranks) {
    std::vector<int32_t> out;
    out.reserve(ranks.size());
    for (int32_t r : ranks) out.push_back(r + 1);
    return out;
}

inline std::vector<int32_t> states_to_ranks(const std::vector<int32_t>& states) {
    std::vector<int32_t> out;
    for (int32_t s : states)
        if (s > 0) out.push_back(s - 1);
    return out;
}

// random strictly increasing subset of 0..m-1
inline std::vector<int32_t> random_position_set(std::mt19937_64& rng, int32_t m) {
    std::vector<int32_t> out;
    if (m == 0) return out;
    double keep = std::uniform_real_distribution<>(0.08, 0.7)(rng);
    for (int32_t r = 0; r < m; ++r)
        if (std::uniform_real_distribution<>(0, 1)(rng) < keep) out.push_back(r);
    if (out.empty()) out.push_back(static_cast<int32_t>(rng() % static_cast<uint64_t>(m)));
    return out;
}

// The worked running example, with explicit grouping
// pinning the exact tree shape the fixtures assume:
//   v1 = Concat(v2, v3)   v2 = Concat(a1, v4)   v3 = Union(b, c)
//   v4 = Concat(v5, v6)   v5 = Star(a2)         v6 = Star(v7)
//   v7 = Concat(a3, v8)   v8 = Concat(b4, a5)
inline const char* kRunningExample = "(a((a*)(a(ba))*))(b|c)";

struct ExampleNodes {
    NodeId v1, v2, v3, v4, v5, v6, v7, v8;
};

inline ExampleNodes example_nodes(const ParseTree& t) {
    ExampleNodes f;
    f.v1 = t.root;
    f.v2 = t.left(f.v1);
    f.v3 = t.right(f.v1);
    f.v4 = t.right(f.v2);
    f.v5 = t.left(f.v4);
    f.v6 = t.right(f.v4);
    f.v7 = t.left(f.v6);
    f.v8 = t.right(f.v7);
    return f;
}

} // namespace glush::testing

#endif
