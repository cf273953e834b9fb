#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "glush/errors.hpp"
#include "glush/internal_index.hpp"
#include "support.hpp"

using namespace glush;
using namespace glush::testing;

namespace {

struct Fixture {
    ParseTree tree;
    AnalysisTables tables;
    InternalIndex index;
    explicit Fixture(const std::string& pattern)
        : tree(parse(pattern)), tables(analyze(tree)), index(tree, tables) {}
};

std::vector<int32_t> subtree_scan(const ParseTree& t, NodeId v, char32_t c) {
    std::vector<int32_t> out;
    const auto* pos = t.positions_of_char(c);
    if (!pos) return out;
    for (int32_t r : *pos)
        if (t.is_ancestor(v, t.positions[static_cast<size_t>(r)])) out.push_back(r);
    return out;
}

} // namespace

TEST_CASE("index: example arrays for character a") {
    Fixture fx(kRunningExample);
    const auto* arr = fx.index.arrays(U'a');
    REQUIRE(arr);
    CHECK(arr->ranks == std::vector<int32_t>{0, 1, 2, 4}); // p1 p2 p3 p5
    auto f = example_nodes(fx.tree);
    // tops of the first extents: p1 reaches the root, p2/p3 stop at v4, p5 at itself
    CHECK(arr->fe_tops == std::vector<NodeId>{f.v1, f.v4, f.v4, fx.tree.positions[4]});
}

TEST_CASE("index: single letter pattern") {
    Fixture fx("b");
    CHECK(fx.index.arrays(U'a') == nullptr);
    const auto* arr = fx.index.arrays(U'b');
    REQUIRE(arr);
    CHECK(arr->ranks == std::vector<int32_t>{0});
}

TEST_CASE("index: example range of right(v2) is positions p2,p3,p5") {
    Fixture fx(kRunningExample);
    auto f = example_nodes(fx.tree);
    QueryCounters ctx;
    auto range = fx.index.right_descendant_range(f.v2, U'a', ctx);
    REQUIRE(range.has_value());
    CHECK(range->lo == 1);
    CHECK(range->hi == 3); // indices 2..4 in one-based terms
    const auto* arr = fx.index.arrays(U'a');
    std::vector<int32_t> covered(arr->ranks.begin() + range->lo,
                                 arr->ranks.begin() + range->hi + 1);
    CHECK(covered == std::vector<int32_t>{1, 2, 4}); // p2, p3, p5
    CHECK(ctx.pred == 0); // v2 is labeled a, the range is stored
}

TEST_CASE("index: descendant range is empty when the character is absent below") {
    Fixture fx(kRunningExample);
    auto f = example_nodes(fx.tree);
    QueryCounters ctx;
    CHECK(!fx.index.descendant_range(f.v4, U'c', ctx).has_value());
    CHECK(!fx.index.descendant_range(f.v3, U'a', ctx).has_value());
}

TEST_CASE("index: stored and searched ranges equal the subtree scan") {
    PatternGen gen(11000, {.max_positions = 20, .alphabet = 3});
    for (int i = 0; i < 300; ++i) {
        Fixture fx(gen.next());
        const auto& t = fx.tree;
        for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
            if (t.at(v).is_leaf()) continue;
            for (char32_t c : {U'a', U'b', U'c'}) {
                const auto* arr = fx.index.arrays(c);
                QueryCounters ctx;
                auto range = fx.index.descendant_range(v, c, ctx);
                auto expect = subtree_scan(t, v, c);
                if (!range) {
                    CHECK(expect.empty());
                } else {
                    REQUIRE(arr);
                    std::vector<int32_t> got(arr->ranks.begin() + range->lo,
                                             arr->ranks.begin() + range->hi + 1);
                    CHECK(got == expect);
                }
                if (t.kind(v) == NodeKind::Concat) {
                    auto rrange = fx.index.right_descendant_range(v, c, ctx);
                    auto rexpect = subtree_scan(t, t.right(v), c);
                    if (!rrange) {
                        CHECK(rexpect.empty());
                    } else {
                        std::vector<int32_t> got(arr->ranks.begin() + rrange->lo,
                                                 arr->ranks.begin() + rrange->hi + 1);
                        CHECK(got == rexpect);
                    }
                }
            }
        }
    }
}

TEST_CASE("index: example internal transitions") {
    Fixture fx(kRunningExample);
    auto f = example_nodes(fx.tree);
    QueryCounters ctx;
    CHECK(fx.index.delta_concat(f.v4, U'a', ctx) == std::vector<int32_t>{2});       // {p3}
    CHECK(fx.index.delta_concat(f.v1, U'c', ctx) == std::vector<int32_t>{6});       // {p7}
    CHECK(fx.index.delta_concat(f.v2, U'a', ctx) == std::vector<int32_t>{1, 2});    // {p2,p3}
    CHECK(fx.index.delta_star(f.v7, U'a', ctx) == std::vector<int32_t>{2});         // {p3}
    CHECK(fx.index.delta_star(f.v8, U'a', ctx) == std::vector<int32_t>{2});         // {p3}
    CHECK_THROWS_AS(fx.index.delta_concat(f.v6, U'a', ctx), ContractError);
}

TEST_CASE("index: star transition edge cases") {
    Fixture fx("ab"); // no star anywhere
    QueryCounters ctx;
    CHECK(fx.index.delta_star(fx.tree.positions[0], U'a', ctx).empty());

    Fixture star("a*");
    CHECK(star.index.delta_star(star.tree.positions[0], U'a', ctx) ==
          std::vector<int32_t>{0});
}

TEST_CASE("index: internal transitions equal the definition on random patterns") {
    PatternGen gen(11001, {.max_positions = 20, .alphabet = 4});
    for (int i = 0; i < 400; ++i) {
        Fixture fx(gen.next());
        const auto& t = fx.tree;
        if (t.num_positions() > 60) continue;
        for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
            for (char32_t c : {U'a', U'b', U'c', U'd'}) {
                QueryCounters ctx;
                if (t.kind(v) == NodeKind::Concat) {
                    auto got = fx.index.delta_concat(v, c, ctx);
                    CHECK(got == brute_delta_concat(t, fx.tables, v, c));
                    CHECK(ctx.rmq <= 2 * got.size() + 1);
                    CHECK(ctx.pred <= 2);
                    if (fx.tables.has_label(v, c)) CHECK(ctx.pred == 0);
                }
                QueryCounters ctx2;
                auto got = fx.index.delta_star(v, c, ctx2);
                CHECK(got == brute_delta_star(t, fx.tables, v, c));
                CHECK(ctx2.rmq <= 2 * got.size() + 1);
                CHECK(ctx2.pred <= 2);
                if (fx.tables.has_label(v, c)) CHECK(ctx2.pred == 0);
            }
        }
    }
}

TEST_CASE("index: ancestor test agrees with the euler intervals") {
    PatternGen gen(11002, {.max_positions = 12, .alphabet = 2});
    for (int i = 0; i < 50; ++i) {
        auto t = parse(gen.next());
        for (NodeId u = 0; u < static_cast<NodeId>(t.size()); ++u)
            for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
                bool walk = false;
                for (NodeId w = v; w != kNoNode; w = t.parent(w))
                    if (w == u) walk = true;
                CHECK(t.is_ancestor(u, v) == walk);
            }
    }
}
