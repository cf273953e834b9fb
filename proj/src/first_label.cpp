#include "glush/first_label.hpp"

#include <algorithm>

namespace glush {

FirstLabelStructure::FirstLabelStructure(const ParseTree& tree, const AnalysisTables& tables)
    : tree_(&tree) {
    std::map<char32_t, std::vector<NodeId>> labeled;
    for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v)
        for (char32_t c : tables.node_labels[static_cast<size_t>(v)]) labeled[c].push_back(v);

    for (auto& [c, nodes] : labeled) {
        std::sort(nodes.begin(), nodes.end(),
                  [&](NodeId a, NodeId b) { return tree.at(a).tin < tree.at(b).tin; });
        CharIndex ci;
        ci.nodes = std::move(nodes);
        ci.parent.assign(ci.nodes.size(), -1);
        // laminar: a stack of enclosing labeled nodes in tin order
        std::vector<int32_t> stack;
        for (size_t i = 0; i < ci.nodes.size(); ++i) {
            while (!stack.empty() &&
                   !tree.is_ancestor(ci.nodes[static_cast<size_t>(stack.back())], ci.nodes[i]))
                stack.pop_back();
            ci.parent[i] = stack.empty() ? -1 : stack.back();
            stack.push_back(static_cast<int32_t>(i));
        }
        std::vector<std::pair<int64_t, std::pair<int32_t, bool>>> eps;
        eps.reserve(ci.nodes.size() * 2);
        for (size_t i = 0; i < ci.nodes.size(); ++i) {
            const Node& nd = tree.at(ci.nodes[i]);
            eps.push_back({nd.tin, {static_cast<int32_t>(i), true}});
            eps.push_back({nd.tout, {static_cast<int32_t>(i), false}});
        }
        std::sort(eps.begin(), eps.end());
        ci.endpoints.reserve(eps.size());
        ci.endpoint_of.reserve(eps.size());
        ci.is_open.reserve(eps.size());
        for (auto& [value, payload] : eps) {
            ci.endpoints.push_back(value);
            ci.endpoint_of.push_back(payload.first);
            ci.is_open.push_back(payload.second ? 1 : 0);
        }
        ci.pred = BatchedPredecessor(ci.endpoints, 2 * static_cast<int64_t>(tree.size()));
        by_char_.emplace(c, std::move(ci));
    }
}

NodeId FirstLabelStructure::labeled_parent(NodeId w, char32_t c) const {
    auto it = by_char_.find(c);
    if (it == by_char_.end()) return kNoNode;
    const CharIndex& ci = it->second;
    auto pos = std::lower_bound(ci.nodes.begin(), ci.nodes.end(), w, [&](NodeId a, NodeId b) {
        return tree_->at(a).tin < tree_->at(b).tin;
    });
    if (pos == ci.nodes.end() || *pos != w) return kNoNode;
    int32_t up = ci.parent[static_cast<size_t>(pos - ci.nodes.begin())];
    return up < 0 ? kNoNode : ci.nodes[static_cast<size_t>(up)];
}

std::optional<NodeId> FirstLabelStructure::decode(const CharIndex& ci,
                                                  std::optional<size_t> endpoint) const {
    if (!endpoint) return std::nullopt;
    int32_t which = ci.endpoint_of[*endpoint];
    if (ci.is_open[*endpoint]) return ci.nodes[static_cast<size_t>(which)];
    int32_t up = ci.parent[static_cast<size_t>(which)];
    if (up < 0) return std::nullopt;
    return ci.nodes[static_cast<size_t>(up)];
}

std::optional<NodeId> FirstLabelStructure::query(NodeId v, char32_t c, QueryCounters& ctx) const {
    ++ctx.firstlabel;
    auto it = by_char_.find(c);
    if (it == by_char_.end()) return std::nullopt;
    QueryCounters inner; // structure hits count as first-label work, not
    auto e = it->second.pred.pred_index(tree_->at(v).tin, inner); // position queries
    ctx.batched_deep += inner.batched_deep;
    return decode(it->second, e);
}

std::vector<std::optional<NodeId>> FirstLabelStructure::query_batch(const std::vector<NodeId>& vs,
                                                                    char32_t c,
                                                                    QueryCounters& ctx) const {
    ctx.firstlabel += vs.size();
    std::vector<std::optional<NodeId>> out(vs.size());
    auto it = by_char_.find(c);
    if (it == by_char_.end() || vs.empty()) return out;
    std::vector<int64_t> points;
    points.reserve(vs.size());
    for (NodeId v : vs) points.push_back(tree_->at(v).tin);
    QueryCounters inner;
    auto answers = it->second.pred.batched_pred(points, inner);
    ctx.batched_deep += inner.batched_deep;
    for (size_t i = 0; i < vs.size(); ++i) out[i] = decode(it->second, answers[i]);
    return out;
}

} // namespace glush
