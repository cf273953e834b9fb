#include "glush/analysis.hpp"

#include <algorithm>

#include "glush/lca.hpp"

namespace glush {

namespace {

std::vector<int32_t> merge_sorted(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
    std::vector<int32_t> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void add_all(std::vector<int32_t>& dst, const std::vector<int32_t>& src) {
    dst = merge_sorted(dst, src);
}

std::vector<NodeId> tin_order(const ParseTree& t) {
    std::vector<NodeId> order(t.size());
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) order[static_cast<size_t>(v)] = v;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return t.at(a).tin < t.at(b).tin; });
    return order;
}

} // namespace

AnalysisTables analyze(const ParseTree& tree, AnalyzeMode mode) {
    const size_t n = tree.size();
    const size_t m = static_cast<size_t>(tree.num_positions());
    AnalysisTables tb;
    tb.nullable.assign(n, 0);
    tb.first.assign(n, {});
    tb.last.assign(n, {});
    tb.follow.assign(mode == AnalyzeMode::full ? m : 0, {});
    tb.fe_top_node.assign(n, kNoNode);
    tb.le_top_node.assign(n, kNoNode);
    tb.fe_top.assign(m, kNoNode);
    tb.le_top.assign(m, kNoNode);
    tb.node_labels.assign(n, {});

    std::vector<NodeId> order = tin_order(tree);

    // Bottom-up: nullable, plus the explicit sets in full mode.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId v = *it;
        const Node& nd = tree.at(v);
        switch (nd.kind) {
        case NodeKind::Epsilon:
        case NodeKind::Star:
            tb.nullable[static_cast<size_t>(v)] = 1;
            break;
        case NodeKind::Literal:
            tb.nullable[static_cast<size_t>(v)] = 0;
            break;
        case NodeKind::Union:
            tb.nullable[static_cast<size_t>(v)] =
                tb.nullable[static_cast<size_t>(nd.left)] ||
                tb.nullable[static_cast<size_t>(nd.right)];
            break;
        case NodeKind::Concat:
            tb.nullable[static_cast<size_t>(v)] =
                tb.nullable[static_cast<size_t>(nd.left)] &&
                tb.nullable[static_cast<size_t>(nd.right)];
            break;
        }
    }
    if (mode == AnalyzeMode::full) {
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeId v = *it;
            const Node& nd = tree.at(v);
            auto& first = tb.first[static_cast<size_t>(v)];
            auto& last = tb.last[static_cast<size_t>(v)];
            switch (nd.kind) {
            case NodeKind::Epsilon:
                break;
            case NodeKind::Literal:
                first = {nd.pos};
                last = {nd.pos};
                break;
            case NodeKind::Union: {
                auto l = static_cast<size_t>(nd.left), r = static_cast<size_t>(nd.right);
                first = merge_sorted(tb.first[l], tb.first[r]);
                last = merge_sorted(tb.last[l], tb.last[r]);
                break;
            }
            case NodeKind::Concat: {
                auto l = static_cast<size_t>(nd.left), r = static_cast<size_t>(nd.right);
                first = tb.nullable[l] ? merge_sorted(tb.first[l], tb.first[r]) : tb.first[l];
                last = tb.nullable[r] ? merge_sorted(tb.last[r], tb.last[l]) : tb.last[r];
                for (int32_t p : tb.last[l])
                    add_all(tb.follow[static_cast<size_t>(p)], tb.first[r]);
                break;
            }
            case NodeKind::Star: {
                auto l = static_cast<size_t>(nd.left);
                first = tb.first[l];
                last = tb.last[l];
                for (int32_t p : tb.last[l])
                    add_all(tb.follow[static_cast<size_t>(p)], tb.first[l]);
                break;
            }
            }
        }
    }

    // Top-down extent tops. continues_first(v): first(v) <= first(parent(v)).
    for (NodeId v : order) {
        const Node& nd = tree.at(v);
        if (nd.parent == kNoNode) {
            tb.fe_top_node[static_cast<size_t>(v)] = v;
            tb.le_top_node[static_cast<size_t>(v)] = v;
            continue;
        }
        const Node& par = tree.at(nd.parent);
        bool cont_first, cont_last;
        switch (par.kind) {
        case NodeKind::Star:
            cont_first = cont_last = true;
            break;
        case NodeKind::Union:
            cont_first = cont_last = true;
            break;
        case NodeKind::Concat:
            if (v == par.left) {
                cont_first = true;
                cont_last = tb.nullable[static_cast<size_t>(par.right)];
            } else {
                cont_first = tb.nullable[static_cast<size_t>(par.left)];
                cont_last = true;
            }
            break;
        default:
            cont_first = cont_last = false;
            break;
        }
        tb.fe_top_node[static_cast<size_t>(v)] =
            cont_first ? tb.fe_top_node[static_cast<size_t>(nd.parent)] : v;
        tb.le_top_node[static_cast<size_t>(v)] =
            cont_last ? tb.le_top_node[static_cast<size_t>(nd.parent)] : v;
        // a subtree without positions has empty first/last sets, which are
        // contained in every ancestor's set
        if (nd.lo_pos > nd.hi_pos) {
            tb.fe_top_node[static_cast<size_t>(v)] = tree.root;
            tb.le_top_node[static_cast<size_t>(v)] = tree.root;
        }
    }
    for (size_t r = 0; r < m; ++r) {
        NodeId p = tree.positions[r];
        tb.fe_top[r] = tb.fe_top_node[static_cast<size_t>(p)];
        tb.le_top[r] = tb.le_top_node[static_cast<size_t>(p)];
    }
    if (mode == AnalyzeMode::compact) {
        // the matcher needs the root sets; they fall out of the extent tops
        for (int32_t r = 0; r < static_cast<int32_t>(m); ++r) {
            if (tb.fe_top[static_cast<size_t>(r)] == tree.root)
                tb.first[static_cast<size_t>(tree.root)].push_back(r);
            if (tb.le_top[static_cast<size_t>(r)] == tree.root)
                tb.last[static_cast<size_t>(tree.root)].push_back(r);
        }
    }

    // Labels: for each character, the lca of every consecutive pair of its
    // positions, then closed through parent_star chains. Leaves keep their
    // own character.
    {
        LcaStructure lca(tree);
        std::vector<std::vector<char32_t>> raw(n);
        for (const auto& [c, ranks] : tree.pos_by_char) {
            for (size_t k = 0; k + 1 < ranks.size(); ++k) {
                NodeId a = tree.positions[static_cast<size_t>(ranks[k])];
                NodeId b = tree.positions[static_cast<size_t>(ranks[k + 1])];
                // label the lca and close upward through star ancestors;
                // stop as soon as a node already has c (its chain is done)
                for (NodeId v = lca.lca(a, b); v != kNoNode; v = tree.parent_star(v)) {
                    auto& rl = raw[static_cast<size_t>(v)];
                    if (!rl.empty() && rl.back() == c) break;
                    rl.push_back(c);
                }
            }
        }
        for (size_t v = 0; v < n; ++v) {
            auto& rl = raw[v];
            std::sort(rl.begin(), rl.end());
            rl.erase(std::unique(rl.begin(), rl.end()), rl.end());
            tb.node_labels[v] = std::move(rl);
        }
        for (NodeId p : tree.positions) tb.node_labels[static_cast<size_t>(p)] = {tree.at(p).ch};
    }

    return tb;
}

std::vector<int32_t> follow_within(const ParseTree& tree, NodeId v, int32_t rank) {
    // Recompute the recurrences restricted to the subtree of v.
    std::vector<NodeId> order = [&] {
        std::vector<NodeId> sub;
        std::vector<NodeId> stack{v};
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            sub.push_back(u);
            const Node& nd = tree.at(u);
            if (nd.left != kNoNode) stack.push_back(nd.left);
            if (nd.right != kNoNode) stack.push_back(nd.right);
        }
        std::sort(sub.begin(), sub.end(),
                  [&](NodeId a, NodeId b) { return tree.at(a).tin > tree.at(b).tin; });
        return sub;
    }();

    std::vector<char> nullable(tree.size(), 0);
    std::vector<std::vector<int32_t>> first(tree.size()), last(tree.size());
    std::vector<int32_t> result;
    for (NodeId u : order) {
        const Node& nd = tree.at(u);
        auto ui = static_cast<size_t>(u);
        switch (nd.kind) {
        case NodeKind::Epsilon:
            nullable[ui] = 1;
            break;
        case NodeKind::Literal:
            first[ui] = last[ui] = {nd.pos};
            break;
        case NodeKind::Union: {
            auto l = static_cast<size_t>(nd.left), r = static_cast<size_t>(nd.right);
            nullable[ui] = nullable[l] || nullable[r];
            first[ui] = merge_sorted(first[l], first[r]);
            last[ui] = merge_sorted(last[l], last[r]);
            break;
        }
        case NodeKind::Concat: {
            auto l = static_cast<size_t>(nd.left), r = static_cast<size_t>(nd.right);
            nullable[ui] = nullable[l] && nullable[r];
            first[ui] = nullable[l] ? merge_sorted(first[l], first[r]) : first[l];
            last[ui] = nullable[r] ? merge_sorted(last[r], last[l]) : last[r];
            if (std::binary_search(last[l].begin(), last[l].end(), rank))
                add_all(result, first[r]);
            break;
        }
        case NodeKind::Star: {
            auto l = static_cast<size_t>(nd.left);
            nullable[ui] = 1;
            first[ui] = first[l];
            last[ui] = last[l];
            if (std::binary_search(last[l].begin(), last[l].end(), rank))
                add_all(result, first[l]);
            break;
        }
        }
    }
    return result;
}

} // namespace glush
