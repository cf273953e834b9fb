#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "glush/engine.hpp"
#include "glush/errors.hpp"
#include "glush/matcher.hpp"
#include "glush/oracle.hpp"
#include "support.hpp"

using namespace glush;
using namespace glush::testing;

namespace {

struct Fixture {
    ParseTree tree;
    AnalysisTables tables;
    InternalIndex index;
    LcaStructure lca;
    FirstLabelStructure firstlabel;
    Engine engine;
    explicit Fixture(const std::string& pattern)
        : tree(parse(pattern)),
          tables(analyze(tree)),
          index(tree, tables),
          lca(tree),
          firstlabel(tree, tables),
          engine(tree, tables, index, lca, firstlabel) {}
};

// defining predicates of the pointer families, evaluated by ancestor scans
NodeId brute_next_concat(const Fixture& fx, NodeId v, char32_t c) {
    for (NodeId u = fx.tree.parent(v); u != kNoNode; u = fx.tree.parent(u)) {
        if (fx.tree.kind(u) != NodeKind::Concat) continue;
        if (!fx.tree.is_ancestor(fx.tree.left(u), v)) continue;
        if (!fx.tables.has_label(u, c)) continue;
        if (!brute_delta_concat(fx.tree, fx.tables, u, c).empty()) return u;
    }
    return kNoNode;
}

NodeId brute_next_star(const Fixture& fx, NodeId v, char32_t c) {
    for (NodeId u = fx.tree.parent(v); u != kNoNode; u = fx.tree.parent(u)) {
        if (fx.tree.kind(u) != NodeKind::Star) continue;
        if (!fx.tables.has_label(u, c)) continue;
        if (!brute_delta_star(fx.tree, fx.tables, u, c).empty()) return u;
    }
    return kNoNode;
}

NodeId brute_endfirst_star(const Fixture& fx, NodeId v, char32_t c) {
    NodeId best = kNoNode;
    for (NodeId u = fx.tree.parent(v); u != kNoNode; u = fx.tree.parent(u)) {
        if (fx.tree.kind(u) != NodeKind::Star) continue;
        if (!fx.tables.has_label(u, c)) continue;
        if (subset_of(fx.tables.first[static_cast<size_t>(v)],
                      fx.tables.first[static_cast<size_t>(u)]))
            best = u;
    }
    return best;
}

NodeId brute_endlast_star(const Fixture& fx, NodeId v) {
    NodeId best = kNoNode;
    for (NodeId u = fx.tree.parent(v); u != kNoNode; u = fx.tree.parent(u)) {
        if (fx.tree.kind(u) != NodeKind::Star) continue;
        if (subset_of(fx.tables.last[static_cast<size_t>(v)],
                      fx.tables.last[static_cast<size_t>(u)]))
            best = u;
    }
    return best;
}

std::vector<int32_t> union_of(const Fixture& fx, const std::vector<NodeId>& nodes, char32_t c,
                              bool concat) {
    std::vector<int32_t> out;
    for (NodeId v : nodes) {
        auto part = concat ? brute_delta_concat(fx.tree, fx.tables, v, c)
                           : brute_delta_star(fx.tree, fx.tables, v, c);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// induced subtree of P and all its ancestors, compacted: the expected node
// set of the transition tree
std::set<NodeId> brute_compact_nodes(const ParseTree& t, const std::vector<int32_t>& P) {
    std::set<NodeId> closure;
    for (int32_t r : P)
        for (NodeId v = t.positions[static_cast<size_t>(r)]; v != kNoNode; v = t.parent(v))
            closure.insert(v);
    std::set<NodeId> out;
    for (NodeId v : closure) {
        if (t.at(v).pos >= 0) {
            out.insert(v); // a leaf of the induced tree
            continue;
        }
        int kids = 0;
        if (t.left(v) != kNoNode && closure.count(t.left(v))) ++kids;
        if (t.right(v) != kNoNode && closure.count(t.right(v))) ++kids;
        if (kids == 2) out.insert(v); // branching
    }
    return out;
}

} // namespace

TEST_CASE("engine: no pointers in a pattern without labeled internal nodes") {
    Fixture fx("a");
    CHECK(fx.engine.next_concat(fx.tree.root, U'a') == kNoNode);
    CHECK(fx.engine.endlast_star(fx.tree.root) == kNoNode);
}

TEST_CASE("engine: root concat has no next pointer") {
    Fixture fx("(a*)(a*)");
    // the root concat is labeled a; nothing above it
    CHECK(fx.tables.has_label(fx.tree.root, U'a'));
    CHECK(fx.engine.next_concat(fx.tree.root, U'a') == kNoNode);
}

TEST_CASE("engine: pointer families equal brute-force ancestor scans") {
    PatternGen gen(13000, {.max_positions = 20, .alphabet = 3});
    for (int i = 0; i < 300; ++i) {
        Fixture fx(gen.next());
        const auto& t = fx.tree;
        if (t.num_positions() > 60) continue;
        for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
            if (t.at(v).is_leaf()) continue;
            if (t.kind(v) == NodeKind::Star)
                CHECK(fx.engine.endlast_star(v) == brute_endlast_star(fx, v));
            for (char32_t c : fx.tables.node_labels[static_cast<size_t>(v)]) {
                CHECK(fx.engine.next_concat(v, c) == brute_next_concat(fx, v, c));
                CHECK(fx.engine.next_star(v, c) == brute_next_star(fx, v, c));
                if (t.kind(v) == NodeKind::Star)
                    CHECK(fx.engine.endfirst_star(v, c) == brute_endfirst_star(fx, v, c));
            }
        }
    }
}

TEST_CASE("engine: transition tree for a singleton") {
    Fixture fx(kRunningExample);
    TransitionTree t;
    fx.engine.build_transition_tree({2}, t);
    CHECK(t.nodes.size() == 1);
    CHECK(t.segments.size() == 1);
    CHECK(t.nodes[0].rnode == fx.tree.positions[2]);
    CHECK(!t.nodes[0].branching);
    CHECK(t.top_rnode(0) == kNoNode); // runs to the root
}

TEST_CASE("engine: transition tree branching node for {p2, p5} is v4") {
    Fixture fx(kRunningExample);
    auto f = example_nodes(fx.tree);
    TransitionTree t;
    fx.engine.build_transition_tree({1, 4}, t);
    REQUIRE(t.nodes.size() == 3);
    bool found = false;
    for (const auto& tn : t.nodes)
        if (tn.branching && tn.rnode == f.v4) found = true;
    CHECK(found);
}

TEST_CASE("engine: transition tree contract errors") {
    Fixture fx(kRunningExample);
    TransitionTree t;
    CHECK_THROWS_AS(fx.engine.build_transition_tree({}, t), ContractError);
    CHECK_THROWS_AS(fx.engine.build_transition_tree({3, 1}, t), ContractError);
    CHECK_THROWS_AS(fx.engine.build_transition_tree({1, 1}, t), ContractError);
    CHECK_THROWS_AS(fx.engine.build_transition_tree({99}, t), ContractError);
}

TEST_CASE("engine: transition tree shape and flags against brute force") {
    PatternGen gen(13001, {.max_positions = 16, .alphabet = 2});
    for (int i = 0; i < 400; ++i) {
        Fixture fx(gen.next());
        const auto& tree = fx.tree;
        if (tree.num_positions() == 0) continue;
        auto P = random_position_set(gen.rng(), tree.num_positions());
        TransitionTree t;
        fx.engine.build_transition_tree(P, t);

        // node set
        std::set<NodeId> got;
        for (const auto& tn : t.nodes) got.insert(tn.rnode);
        CHECK(got == brute_compact_nodes(tree, P));
        CHECK(t.nodes.size() <= 2 * P.size() - 1);

        // lastextent(P) membership as a predicate
        auto in_le = [&](NodeId u) {
            for (int32_t p : P)
                if (set_contains(fx.tables.last[static_cast<size_t>(u)], p)) return true;
            return false;
        };

        for (size_t i2 = 0; i2 < t.nodes.size(); ++i2) {
            const auto& tn = t.nodes[i2];
            // highest lastextent annotation
            NodeId expect_h = kNoNode;
            for (int32_t p : P) {
                if (!tree.is_ancestor(tn.rnode, tree.positions[static_cast<size_t>(p)])) continue;
                NodeId top = fx.tables.le_top[static_cast<size_t>(p)];
                if (expect_h == kNoNode || tree.depth(top) < tree.depth(expect_h)) expect_h = top;
            }
            CHECK(tn.highest_le == expect_h);

            if (tn.branching) {
                bool live = tree.kind(tn.rnode) == NodeKind::Concat && in_le(tree.left(tn.rnode));
                CHECK(tn.oplive == live);

                // weak domination per definition, dominators range over all
                // live nodes whose left child is in lastextent(P)
                bool expect_w = false, expect_o = false;
                for (NodeId u = 0; u < static_cast<NodeId>(tree.size()); ++u) {
                    if (tree.kind(u) != NodeKind::Concat) continue;
                    if (!is_proper_ancestor(tree, u, tn.rnode)) continue;
                    if (!in_le(tree.left(u))) continue;
                    if (subset_of(fx.tables.first[static_cast<size_t>(tn.rnode)],
                                  fx.tables.first[static_cast<size_t>(tree.right(u))]))
                        expect_w = true;
                    if (tree.kind(tn.rnode) == NodeKind::Concat &&
                        subset_of(
                            fx.tables.first[static_cast<size_t>(tree.right(tn.rnode))],
                            fx.tables.first[static_cast<size_t>(tree.right(u))]))
                        expect_o = true;
                }
                CHECK(tn.wodom == expect_w);
                CHECK(tn.odom == expect_o);
            }
        }

        // star segments per definition
        for (size_t s = 0; s < t.segments.size(); ++s) {
            const auto& bot = t.nodes[static_cast<size_t>(t.segments[s].bot)];
            NodeId ps = tree.parent_star(bot.rnode);
            bool expect = false;
            if (ps != kNoNode && in_le(ps)) {
                NodeId top = t.top_rnode(s);
                bool on_seg = tree.is_ancestor(ps, bot.rnode) &&
                              (top == kNoNode || tree.depth(ps) > tree.depth(top));
                expect = on_seg;
            }
            CHECK(t.segments[s].star_segment == expect);
        }
    }
}

TEST_CASE("engine: collect concat nodes on the example, P={p1}, a") {
    Fixture fx(kRunningExample);
    auto f = example_nodes(fx.tree);
    TransitionTree t;
    fx.engine.build_transition_tree({0}, t);
    QueryCounters ctx;
    auto m = fx.engine.collect_concat_nodes(t, U'a', ctx);
    CHECK(m == std::vector<NodeId>{f.v2});
}

TEST_CASE("engine: no concat nodes in a star-only pattern") {
    Fixture fx("a*");
    TransitionTree t;
    fx.engine.build_transition_tree({0}, t);
    QueryCounters ctx;
    CHECK(fx.engine.collect_concat_nodes(t, U'a', ctx).empty());
}

TEST_CASE("engine: star collection covers the loop back into aba") {
    Fixture fx(kRunningExample);
    TransitionTree t;
    fx.engine.build_transition_tree({4}, t); // P = {p5}
    QueryCounters ctx;
    auto m = fx.engine.collect_star_nodes(t, U'a', ctx);
    CHECK(union_of(fx, m, U'a', false) == std::vector<int32_t>{2}); // {p3}
}

TEST_CASE("engine: (a*)(a*) splits between star and concat parts") {
    Fixture fx("(a*)(a*)");
    TransitionTree t;
    fx.engine.build_transition_tree({0}, t); // P = {p1}
    QueryCounters ctx;
    auto ms = fx.engine.collect_star_nodes(t, U'a', ctx);
    CHECK(union_of(fx, ms, U'a', false) == std::vector<int32_t>{0});
    auto mc = fx.engine.collect_concat_nodes(t, U'a', ctx);
    CHECK(union_of(fx, mc, U'a', true) == std::vector<int32_t>{1});
}

TEST_CASE("engine: fixtures for full state-set transitions") {
    Fixture fx(kRunningExample);
    QueryCounters ctx;
    CHECK(fx.engine.state_set_transition({4}, U'b', ctx) == std::vector<int32_t>{5});
    CHECK(fx.engine.state_set_transition({}, U'b', ctx).empty());
    CHECK_THROWS_AS(fx.engine.state_set_transition({2, 1}, U'a', ctx), ContractError);

    Fixture quad("a*a*a*a*");
    CHECK(quad.engine.state_set_transition({1}, U'a', ctx) ==
          std::vector<int32_t>{1, 2, 3});
}

TEST_CASE("engine: transitions match the oracle on random instances") {
    PatternGen gen(13002, {.max_positions = 20, .alphabet = 4});
    Fixture* last = nullptr;
    int checked = 0;
    for (int i = 0; i < 600; ++i) {
        Fixture fx(gen.next());
        (void)last;
        const auto& tree = fx.tree;
        if (tree.num_positions() == 0 || tree.num_positions() > 60) continue;
        auto oracle = build_oracle(tree, fx.tables);
        for (int k = 0; k < 6; ++k) {
            auto P = random_position_set(gen.rng(), tree.num_positions());
            char32_t c = static_cast<char32_t>(U'a' + gen.rng()() % 4);
            QueryCounters ctx;
            auto got = fx.engine.state_set_transition(P, c, ctx);
            auto expect = states_to_ranks(oracle_delta(oracle, ranks_to_states(P), c));
            CHECK(got == expect);
            ++checked;
        }
    }
    CHECK(checked > 2000);
}

TEST_CASE("engine: every pair realizes a concat or star case at the lca") {
    PatternGen gen(13003, {.max_positions = 14, .alphabet = 2});
    for (int i = 0; i < 150; ++i) {
        Fixture fx(gen.next());
        const auto& tree = fx.tree;
        if (tree.num_positions() == 0) continue;
        auto oracle = build_oracle(tree, fx.tables);
        for (int32_t p = 0; p < tree.num_positions(); ++p) {
            for (char32_t c : {U'a', U'b'}) {
                auto next = states_to_ranks(oracle_delta(oracle, {p + 1}, c));
                for (int32_t q : next) {
                    NodeId a = tree.positions[static_cast<size_t>(p)];
                    NodeId b = tree.positions[static_cast<size_t>(q)];
                    NodeId l = a;
                    while (!tree.is_ancestor(l, b)) l = tree.parent(l);
                    bool concat_case =
                        tree.kind(l) == NodeKind::Concat &&
                        set_contains(fx.tables.last[static_cast<size_t>(tree.left(l))], p) &&
                        set_contains(fx.tables.first[static_cast<size_t>(tree.right(l))], q);
                    bool star_case = false;
                    NodeId anchor = tree.star_anchor(l);
                    if (anchor != kNoNode)
                        star_case =
                            set_contains(fx.tables.last[static_cast<size_t>(anchor)], p) &&
                            set_contains(fx.tables.first[static_cast<size_t>(anchor)], q);
                    CHECK((concat_case || star_case));
                }
            }
        }
    }
}

TEST_CASE("engine: collected concat nodes cover the relevant ones") {
    PatternGen gen(13004, {.max_positions = 16, .alphabet = 3});
    for (int i = 0; i < 400; ++i) {
        Fixture fx(gen.next());
        const auto& tree = fx.tree;
        if (tree.num_positions() == 0) continue;
        auto P = random_position_set(gen.rng(), tree.num_positions());
        char32_t c = static_cast<char32_t>(U'a' + gen.rng()() % 3);
        auto brute = brute_transition_nodes(tree, fx.tables, P, c);
        TransitionTree t;
        fx.engine.build_transition_tree(P, t);
        QueryCounters ctx;
        auto mc = fx.engine.collect_concat_nodes(t, c, ctx);
        for (NodeId v : brute.rel_concat)
            CHECK(std::find(mc.begin(), mc.end(), v) != mc.end());
        CHECK(union_of(fx, mc, c, true) == union_of(fx, brute.rel_concat, c, true));
        for (NodeId v : mc) CHECK(!brute_delta_concat(tree, fx.tables, v, c).empty());
        // every transition node the walk skipped is genuinely dominated
        for (NodeId v : brute.n_concat) {
            if (std::find(mc.begin(), mc.end(), v) != mc.end()) continue;
            bool dominated = false;
            for (NodeId u : brute.n_concat)
                if (is_proper_ancestor(tree, u, v) &&
                    subset_of(fx.tables.first[static_cast<size_t>(tree.right(v))],
                              fx.tables.first[static_cast<size_t>(tree.right(u))]))
                    dominated = true;
            CHECK(dominated);
        }
        auto ms = fx.engine.collect_star_nodes(t, c, ctx);
        CHECK(union_of(fx, ms, c, false) == union_of(fx, brute.rel_star, c, false));
        for (NodeId v : ms) CHECK(!brute_delta_star(tree, fx.tables, v, c).empty());
    }
}

TEST_CASE("engine: star collection is empty without star nodes") {
    Fixture fx("(ab|ba)(a|b)");
    TransitionTree t;
    fx.engine.build_transition_tree({0, 2}, t);
    QueryCounters ctx;
    CHECK(fx.engine.collect_star_nodes(t, U'a', ctx).empty());
    CHECK(fx.engine.collect_star_nodes(t, U'b', ctx).empty());
}

TEST_CASE("engine: counter bounds on random instances") {
    PatternGen gen(13005, {.max_positions = 20, .alphabet = 3});
    for (int i = 0; i < 300; ++i) {
        Fixture fx(gen.next());
        const auto& tree = fx.tree;
        if (tree.num_positions() == 0 || tree.num_positions() > 60) continue;
        for (int k = 0; k < 4; ++k) {
            auto P = random_position_set(gen.rng(), tree.num_positions());
            char32_t c = static_cast<char32_t>(U'a' + gen.rng()() % 3);
            QueryCounters ctx;
            auto out = fx.engine.state_set_transition(P, c, ctx);
            size_t p = P.size(), o = out.size();
            CHECK(ctx.firstlabel <= 4 * p);
            CHECK(ctx.pred <= 4 * p);
            CHECK(ctx.rmq <= 8 * (p + o + 1));
            CHECK(ctx.pointer_steps <= 8 * (p + o));
        }
    }
}
