#include "glush/engine.hpp"

#include <algorithm>

#include "glush/errors.hpp"

namespace glush {

namespace {

// probe whether an internal concat transition at labeled node w is nonempty:
// one RMQ on the stored right range
bool probe_concat_nonempty(const ParseTree& tree, const InternalIndex& idx, NodeId w,
                           char32_t c) {
    auto rr = idx.stored_right_range(w, c);
    if (!rr || rr->empty()) return false;
    const auto* arr = idx.arrays(c);
    int32_t j = arr->rmq.query(static_cast<size_t>(rr->lo), static_cast<size_t>(rr->hi));
    return tree.is_ancestor(arr->fe_tops[static_cast<size_t>(j)], tree.right(w));
}

bool probe_star_nonempty(const ParseTree& tree, const InternalIndex& idx, NodeId w, char32_t c) {
    auto sr = idx.stored_subtree_range(w, c);
    if (!sr || sr->empty()) return false;
    const auto* arr = idx.arrays(c);
    int32_t j = arr->rmq.query(static_cast<size_t>(sr->lo), static_cast<size_t>(sr->hi));
    return tree.is_ancestor(arr->fe_tops[static_cast<size_t>(j)], w);
}

} // namespace

size_t TransitionScratch::bytes_in_use() const {
    return t.nodes.capacity() * sizeof(TransitionTree::TNode) +
           t.segments.capacity() * sizeof(TransitionTree::Segment) +
           t.leaf_ranks.capacity() * sizeof(int32_t) + out.capacity() * sizeof(int32_t) +
           seeds.capacity() * sizeof(detail::SegmentSeeds) +
           cands.capacity() * sizeof(detail::Candidate) +
           (seed2.capacity() + seed3.capacity() + fl2.capacity() + fl3.capacity()) *
               sizeof(std::optional<NodeId>) +
           fl_nodes.capacity() * sizeof(NodeId);
}

Engine::Engine(const ParseTree& tree, const AnalysisTables& tables, const InternalIndex& index,
               const LcaStructure& lca, const FirstLabelStructure& firstlabel)
    : tree_(&tree), tables_(&tables), index_(&index), lca_(&lca), firstlabel_(&firstlabel) {
    const size_t n = tree.size();
    ptr_chars_.resize(n);
    next_concat_.resize(n);
    next_star_.resize(n);
    endfirst_star_.resize(n);
    endlast_star_.assign(n, kNoNode);

    // Pointer families, computed per character over the labeled-ancestor
    // forest in one top-down pass each. A concat pointer target qualifies
    // for v exactly when it qualifies for v's labeled ancestor below it, so
    // the chains memoize.
    for (const auto& [c, pos_ranks] : tree.pos_by_char) {
        const auto* ci = firstlabel.char_index(c);
        if (!ci) continue;
        const size_t k = ci->nodes.size();
        std::vector<NodeId> nc_dp(k, kNoNode), ns_dp(k, kNoNode);
        std::vector<int32_t> star_up(k, -1); // nearest labeled Star strictly above
        for (size_t i = 0; i < k; ++i) {
            int32_t up = ci->parent[i];
            if (up < 0) continue;
            NodeId w = ci->nodes[static_cast<size_t>(up)];
            NodeId self = ci->nodes[i];
            if (tree.kind(w) == NodeKind::Concat && tree.is_ancestor(tree.left(w), self) &&
                probe_concat_nonempty(tree, index, w, c))
                nc_dp[i] = w;
            else
                nc_dp[i] = nc_dp[static_cast<size_t>(up)];
            if (tree.kind(w) == NodeKind::Star && probe_star_nonempty(tree, index, w, c))
                ns_dp[i] = w;
            else
                ns_dp[i] = ns_dp[static_cast<size_t>(up)];
            star_up[i] = tree.kind(w) == NodeKind::Star ? up : star_up[static_cast<size_t>(up)];
        }
        for (size_t i = 0; i < k; ++i) {
            NodeId v = ci->nodes[i];
            if (tree.at(v).is_leaf()) continue;
            NodeId ef = kNoNode;
            if (tree.kind(v) == NodeKind::Star) {
                int32_t limit = tree.depth(tables.fe_top_node[static_cast<size_t>(v)]);
                for (int32_t j = star_up[i]; j >= 0; j = star_up[static_cast<size_t>(j)]) {
                    NodeId w = ci->nodes[static_cast<size_t>(j)];
                    if (tree.depth(w) < limit) break;
                    ef = w;
                }
            }
            ptr_chars_[static_cast<size_t>(v)].push_back(c);
            next_concat_[static_cast<size_t>(v)].push_back(nc_dp[i]);
            next_star_[static_cast<size_t>(v)].push_back(ns_dp[i]);
            endfirst_star_[static_cast<size_t>(v)].push_back(ef);
        }
    }
    for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
        if (tree.kind(v) != NodeKind::Star) continue;
        int32_t limit = tree.depth(tables.le_top_node[static_cast<size_t>(v)]);
        for (NodeId w = tree.parent_star(v); w != kNoNode && tree.depth(w) >= limit;
             w = tree.parent_star(w))
            endlast_star_[static_cast<size_t>(v)] = w;
    }
}

NodeId Engine::pointer_at(const std::vector<NodeId>& table, NodeId v, char32_t c) const {
    const auto& chars = ptr_chars_[static_cast<size_t>(v)];
    auto it = std::lower_bound(chars.begin(), chars.end(), c);
    if (it == chars.end() || *it != c) return kNoNode;
    return table[static_cast<size_t>(it - chars.begin())];
}

NodeId Engine::next_concat(NodeId v, char32_t c) const {
    return pointer_at(next_concat_[static_cast<size_t>(v)], v, c);
}
NodeId Engine::next_star(NodeId v, char32_t c) const {
    return pointer_at(next_star_[static_cast<size_t>(v)], v, c);
}
NodeId Engine::endfirst_star(NodeId v, char32_t c) const {
    return pointer_at(endfirst_star_[static_cast<size_t>(v)], v, c);
}
NodeId Engine::endlast_star(NodeId v) const { return endlast_star_[static_cast<size_t>(v)]; }

void Engine::build_transition_tree(const std::vector<int32_t>& ranks, TransitionTree& t) const {
    if (ranks.empty()) throw ContractError("transition tree: empty position set");
    for (size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] < 0 || ranks[i] >= tree_->num_positions())
            throw ContractError("transition tree: rank out of range");
        if (i + 1 < ranks.size() && ranks[i] >= ranks[i + 1])
            throw ContractError("transition tree: positions must be strictly increasing");
    }
    t.clear();
    t.leaf_ranks = ranks;

    const ParseTree& tree = *tree_;
    // Stack construction of the induced compact tree: leaves in order,
    // branching nodes are lcas of adjacent leaves.
    std::vector<NodeId> rnodes;
    std::vector<std::pair<NodeId, NodeId>> edges; // child -> parent, R ids
    std::vector<NodeId> stack;
    for (int32_t r : ranks) {
        NodeId leaf = tree.positions[static_cast<size_t>(r)];
        rnodes.push_back(leaf);
        if (stack.empty()) {
            stack.push_back(leaf);
            continue;
        }
        NodeId join = lca_->lca(stack.back(), leaf);
        while (stack.size() >= 2 &&
               tree.depth(stack[stack.size() - 2]) >= tree.depth(join)) {
            edges.push_back({stack.back(), stack[stack.size() - 2]});
            stack.pop_back();
        }
        if (tree.depth(stack.back()) > tree.depth(join)) {
            edges.push_back({stack.back(), join});
            stack.pop_back();
            rnodes.push_back(join);
            stack.push_back(join);
        }
        stack.push_back(leaf);
    }
    while (stack.size() >= 2) {
        edges.push_back({stack.back(), stack[stack.size() - 2]});
        stack.pop_back();
    }

    std::sort(rnodes.begin(), rnodes.end(),
              [&](NodeId a, NodeId b) { return tree.at(a).tin < tree.at(b).tin; });
    rnodes.erase(std::unique(rnodes.begin(), rnodes.end()), rnodes.end());
    auto t_index = [&](NodeId r) {
        auto it = std::lower_bound(rnodes.begin(), rnodes.end(), r, [&](NodeId a, NodeId b) {
            return tree.at(a).tin < tree.at(b).tin;
        });
        return static_cast<int32_t>(it - rnodes.begin());
    };

    t.nodes.resize(rnodes.size());
    for (size_t i = 0; i < rnodes.size(); ++i) {
        auto& tn = t.nodes[i];
        tn = TransitionTree::TNode{};
        tn.rnode = rnodes[i];
        tn.rank = tree.at(rnodes[i]).pos;
        tn.branching = tn.rank < 0;
    }
    for (auto& [child, parent] : edges)
        t.nodes[static_cast<size_t>(t_index(child))].parent = t_index(parent);
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& tn = t.nodes[i];
        if (tn.parent < 0) continue;
        auto& par = t.nodes[static_cast<size_t>(tn.parent)];
        int side = tree.is_ancestor(tree.left(par.rnode), tn.rnode) ? 0 : 1;
        par.child[side] = static_cast<int32_t>(i);
    }

    // (b) lastextent annotations, bottom-up
    for (size_t i = t.nodes.size(); i-- > 0;) {
        auto& tn = t.nodes[i];
        if (!tn.branching) tn.highest_le = tables_->le_top[static_cast<size_t>(tn.rank)];
        if (tn.parent >= 0) {
            auto& par = t.nodes[static_cast<size_t>(tn.parent)];
            if (par.highest_le == kNoNode ||
                tree.depth(tn.highest_le) < tree.depth(par.highest_le))
                par.highest_le = tn.highest_le;
        }
    }
    for (auto& tn : t.nodes) {
        if (!tn.branching || tree.kind(tn.rnode) != NodeKind::Concat || tn.child[0] < 0) continue;
        NodeId left_h = t.nodes[static_cast<size_t>(tn.child[0])].highest_le;
        tn.oplive = tree.depth(tn.rnode) + 1 >= tree.depth(left_h);
    }

    // (c) domination flags, top-down over the branching skeleton
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& tn = t.nodes[i];
        if (tn.parent >= 0) {
            const auto& par = t.nodes[static_cast<size_t>(tn.parent)];
            tn.domdepth = par.domdepth;
            if (par.oplive && tree.is_ancestor(tree.right(par.rnode), tn.rnode))
                tn.domdepth = std::max(tn.domdepth, tree.depth(par.rnode) + 1);
        }
        if (!tn.branching) continue;
        NodeId r = tn.rnode;
        tn.wodom = tn.domdepth >=
                   tree.depth(tables_->fe_top_node[static_cast<size_t>(r)]);
        if (tree.kind(r) == NodeKind::Concat)
            tn.odom = tn.domdepth >=
                      tree.depth(tables_->fe_top_node[static_cast<size_t>(tree.right(r))]);
    }

    // (d) star segments and the next star segment above
    t.segments.resize(t.nodes.size());
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& seg = t.segments[i];
        seg.bot = static_cast<int32_t>(i);
        const auto& tn = t.nodes[i];
        NodeId ps = tree.parent_star(tn.rnode);
        if (ps != kNoNode && on_segment(t, i, ps) &&
            tree.depth(ps) >= tree.depth(tn.highest_le))
            seg.star_segment = true;
    }
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& seg = t.segments[i];
        int32_t p = t.nodes[i].parent;
        if (p < 0) {
            seg.next_star_above = -1;
        } else {
            seg.next_star_above = t.segments[static_cast<size_t>(p)].star_segment
                                      ? p
                                      : t.segments[static_cast<size_t>(p)].next_star_above;
        }
    }
}

bool Engine::on_segment(const TransitionTree& t, size_t seg, NodeId x) const {
    const auto& bot = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    if (!tree_->is_ancestor(x, bot.rnode)) return false;
    if (bot.parent < 0) return true;
    return tree_->depth(x) > tree_->depth(t.nodes[static_cast<size_t>(bot.parent)].rnode);
}

bool Engine::in_le(const TransitionTree& t, size_t seg, NodeId x) const {
    const auto& bot = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    return tree_->depth(x) >= tree_->depth(bot.highest_le);
}

bool Engine::chain_viable(const TransitionTree& t, size_t seg) const {
    const auto& bot = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    return tree_->depth(bot.highest_le) <= tree_->depth(bot.rnode);
}

// ---------------------------------------------------------------------------
// Seed plan. Each segment resolves a handful of rank queries: the successor
// seed for concat chains, predecessor/successor seeds for star segments, and
// for an unlabeled live branching bot the range of its right child. Stored
// ranges at labeled bots answer everything without queries.

namespace {

struct RankQuery {
    int64_t point;
    size_t seg;
    int slot; // 0 q_concat(succ) 1 q_minus(pred) 2 q_plus(succ) 3 right_lo(succ) 4 right_hi(pred)
};

} // namespace

void Engine::compute_seeds(const TransitionTree& t, char32_t c,
                           std::vector<SegmentSeeds>& seeds, bool batched,
                           QueryCounters& ctx) const {
    const ParseTree& tree = *tree_;
    const auto* arr = index_->arrays(c);
    seeds.assign(t.segments.size(), SegmentSeeds{});
    if (!arr) return;
    const auto& ranks = arr->ranks;
    const size_t asz = ranks.size();

    thread_local std::vector<RankQuery> pending;
    pending.clear();
    auto query = [&](int64_t point, size_t seg, int slot, bool is_succ) {
        if (batched) {
            pending.push_back({point, seg, slot});
        } else {
            auto idx = is_succ ? arr->pred.succ_index(point, ctx) : arr->pred.pred_index(point, ctx);
            SegmentSeeds& s = seeds[seg];
            switch (slot) {
            case 0: s.q_concat = idx; break;
            case 1: s.q_minus = idx; break;
            case 2: s.q_plus = idx; break;
            case 3: s.pending_right_lo = idx; break;
            case 4: s.pending_right_hi = idx; break;
            }
        }
    };

    for (size_t i = 0; i < t.segments.size(); ++i) {
        const auto& tn = t.nodes[static_cast<size_t>(t.segments[i].bot)];
        const Node& br = tree.at(tn.rnode);
        SegmentSeeds& s = seeds[i];
        s.want_star = t.segments[i].star_segment;
        s.want_concat = chain_viable(t, i) || tn.oplive;
        if (!s.want_star && !s.want_concat) continue;

        if (!tn.branching) {
            int64_t r = tn.rank;
            query(r, i, 2, true); // q_plus = succ(r); q_concat derived later
            if (s.want_star) query(r, i, 1, false);
            s.derive_concat_from_plus = s.want_concat;
        } else if (tables_->has_label(tn.rnode, c)) {
            IndexRange sr = *index_->stored_subtree_range(tn.rnode, c);
            s.q_plus = sr.lo < static_cast<int32_t>(asz) ? std::optional<size_t>(sr.lo)
                                                         : std::nullopt;
            s.q_minus = sr.hi >= 0 ? std::optional<size_t>(sr.hi) : std::nullopt;
            if (tn.oplive) {
                IndexRange rr = *index_->stored_right_range(tn.rnode, c);
                s.q_concat = rr.lo < static_cast<int32_t>(asz) ? std::optional<size_t>(rr.lo)
                                                               : std::nullopt;
                if (!rr.empty()) s.bot_right_range = rr;
            } else if (s.want_concat) {
                s.q_concat = sr.hi + 1 < static_cast<int32_t>(asz)
                                 ? std::optional<size_t>(sr.hi + 1)
                                 : std::nullopt;
            }
        } else {
            if (s.want_star) {
                query(br.lo_pos, i, 2, true);
                query(br.hi_pos, i, 1, false);
            }
            if (tn.oplive) {
                const Node& rc = tree.at(br.right);
                query(rc.lo_pos, i, 3, true);
                // right range needs its high end; reuse q_minus when present
                if (s.want_star)
                    s.right_hi_from_minus = true;
                else
                    query(br.hi_pos, i, 4, false);
            } else if (s.want_concat) {
                if (s.want_star)
                    s.derive_concat_from_minus = true;
                else
                    query(br.hi_pos + 1, i, 0, true);
            }
        }
    }

    if (batched && !pending.empty()) {
        std::sort(pending.begin(), pending.end(),
                  [](const RankQuery& a, const RankQuery& b) { return a.point < b.point; });
        thread_local std::vector<int64_t> points;
        points.clear();
        points.reserve(pending.size());
        for (const auto& q : pending)
            if (points.empty() || points.back() != q.point) points.push_back(q.point);
        auto preds = arr->pred.batched_pred(points, ctx);
        for (const auto& q : pending) {
            size_t k = static_cast<size_t>(
                std::lower_bound(points.begin(), points.end(), q.point) - points.begin());
            std::optional<size_t> pi = preds[k];
            std::optional<size_t> idx;
            bool is_succ = q.slot == 0 || q.slot == 2 || q.slot == 3;
            if (is_succ) {
                if (!pi)
                    idx = asz ? std::optional<size_t>(0) : std::nullopt;
                else if (static_cast<int64_t>(ranks[*pi]) == q.point)
                    idx = pi;
                else
                    idx = *pi + 1 < asz ? std::optional<size_t>(*pi + 1) : std::nullopt;
            } else {
                idx = pi;
            }
            SegmentSeeds& s = seeds[q.seg];
            switch (q.slot) {
            case 0: s.q_concat = idx; break;
            case 1: s.q_minus = idx; break;
            case 2: s.q_plus = idx; break;
            case 3: s.pending_right_lo = idx; break;
            case 4: s.pending_right_hi = idx; break;
            }
        }
    }

    // Derivations that need query results.
    for (size_t i = 0; i < t.segments.size(); ++i) {
        SegmentSeeds& s = seeds[i];
        const auto& tn = t.nodes[static_cast<size_t>(t.segments[i].bot)];
        const Node& br = tree_->at(tn.rnode);
        if (s.derive_concat_from_plus) {
            // first position strictly after a leaf bot
            if (s.q_plus) {
                size_t k = *s.q_plus;
                if (ranks[k] == tn.rank) ++k;
                s.q_concat = k < asz ? std::optional<size_t>(k) : std::nullopt;
            }
        }
        if (s.derive_concat_from_minus) {
            // first position strictly after an unlabeled branching bot
            size_t k = s.q_minus ? *s.q_minus + 1 : 0;
            s.q_concat = k < asz ? std::optional<size_t>(k) : std::nullopt;
        }
        if (s.right_hi_from_minus) s.pending_right_hi = s.q_minus;
        if (s.pending_right_lo && s.pending_right_hi &&
            ranks[*s.pending_right_lo] <= br.hi_pos && !tables_->has_label(tn.rnode, c)) {
            IndexRange rr;
            rr.lo = static_cast<int32_t>(*s.pending_right_lo);
            rr.hi = static_cast<int32_t>(*s.pending_right_hi);
            if (!rr.empty()) s.bot_right_range = rr;
        }
        if (tn.branching && !tables_->has_label(tn.rnode, c) && tn.oplive)
            s.q_concat = s.pending_right_lo;
    }
}

std::optional<NodeId> Engine::concat_seed_node(const TransitionTree& t, size_t seg, char32_t c,
                                               const SegmentSeeds& seeds) const {
    if (!seeds.want_concat || !seeds.q_concat) return std::nullopt;
    const auto* arr = index_->arrays(c);
    const auto& tn = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    int32_t qrank = arr->ranks[*seeds.q_concat];
    const Node& br = tree_->at(tn.rnode);
    if (qrank >= br.lo_pos && qrank <= br.hi_pos)
        return tn.branching && tn.oplive ? std::optional<NodeId>(tn.rnode) : std::nullopt;
    NodeId qnode = tree_->positions[static_cast<size_t>(qrank)];
    return lca_->lca(tn.rnode, qnode);
}

std::optional<NodeId> Engine::star_seed_node(const TransitionTree& t, size_t seg, char32_t c,
                                             const SegmentSeeds& seeds) const {
    if (!seeds.want_star) return std::nullopt;
    const auto* arr = index_->arrays(c);
    const auto& tn = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    const Node& br = tree_->at(tn.rnode);
    std::optional<NodeId> best;
    auto consider = [&](std::optional<size_t> qi) {
        if (!qi) return;
        int32_t qrank = arr->ranks[*qi];
        NodeId v;
        if (qrank >= br.lo_pos && qrank <= br.hi_pos)
            v = tn.rnode; // a position inside the bot: the seed is the bot itself
        else
            v = lca_->lca(tn.rnode, tree_->positions[static_cast<size_t>(qrank)]);
        if (!best || tree_->depth(v) > tree_->depth(*best)) best = v;
    };
    consider(seeds.q_minus);
    consider(seeds.q_plus);
    return best;
}

// ---------------------------------------------------------------------------

void Engine::walk_concat_segment(const TransitionTree& t, size_t seg, char32_t c,
                                 const SegmentSeeds& seeds,
                                 std::optional<NodeId> firstlabel_of_seed,
                                 std::vector<Candidate>& out, QueryCounters& ctx) const {
    const ParseTree& tree = *tree_;
    const auto& bot = t.nodes[static_cast<size_t>(t.segments[seg].bot)];
    int32_t hd = tree.depth(bot.highest_le);
    const TransitionTree::TNode* top =
        bot.parent < 0 ? nullptr : &t.nodes[static_cast<size_t>(bot.parent)];

    auto seed = concat_seed_node(t, seg, c, seeds);
    if (!seed || !on_segment(t, seg, *seed)) return;
    NodeId v = *seed;

    auto live = [&](NodeId x) {
        if (tree.kind(x) != NodeKind::Concat) return false;
        if (x == bot.rnode) return bot.oplive;
        return tree.is_ancestor(tree.left(x), bot.rnode) && tree.depth(x) + 1 >= hd;
    };

    if (!tables_->has_label(v, c) && live(v)) {
        Candidate cand;
        cand.node = v;
        cand.concat = true;
        if (v == bot.rnode) {
            cand.range_ready = true;
            cand.range = seeds.bot_right_range.value_or(IndexRange{});
        } else {
            cand.range_ready = false;
            cand.pending_lo = seeds.q_concat;
        }
        out.push_back(cand);
    }

    NodeId x = firstlabel_of_seed.value_or(kNoNode);
    while (x != kNoNode && on_segment(t, seg, x) && tree.depth(x) + 1 >= hd) {
        if (live(x)) {
            NodeId rx = tree.right(x);
            bool skip = false;
            if (top) {
                NodeId tr = top->rnode;
                if (top->oplive && tables_->in_first_extent(tree, tree.right(tr), rx))
                    skip = true; // dominated by the branching node closing this segment
                else if (top->wodom && tables_->in_first_extent(tree, tr, rx))
                    skip = true; // its cover continues above top(s)
            }
            if (!skip) {
                Candidate cand;
                cand.node = x;
                cand.concat = true;
                cand.range_ready = false; // labeled: resolved from stored ranges
                out.push_back(cand);
            }
        }
        x = next_concat(x, c);
        ++ctx.pointer_steps;
    }
}

void Engine::walk_star_segment(const TransitionTree& t, size_t seg, char32_t c,
                               const SegmentSeeds& seeds,
                               std::optional<NodeId> firstlabel_of_seed,
                               std::vector<Candidate>& out, QueryCounters& ctx) const {
    const ParseTree& tree = *tree_;
    if (!t.segments[seg].star_segment) return;

    auto seed = star_seed_node(t, seg, c, seeds);
    if (!seed || !on_segment(t, seg, *seed)) return;
    NodeId v = *seed;

    NodeId ps = tree.parent_star(v);
    if (ps != kNoNode && on_segment(t, seg, ps) && in_le(t, seg, ps) &&
        !tables_->has_label(ps, c)) {
        Candidate cand;
        cand.node = ps;
        cand.concat = false;
        cand.range_ready = false;
        out.push_back(cand);
    }

    NodeId w = firstlabel_of_seed.value_or(kNoNode);
    NodeId x = w == kNoNode ? kNoNode : tree.star_anchor(w);
    if (x != kNoNode && !tables_->has_label(x, c)) {
        // happens when w is a leaf whose star anchor carries no label (it is
        // the unlabeled candidate added above); the chain resumes at the
        // anchor of the nearest labeled ancestor
        NodeId up = firstlabel_->labeled_parent(w, c);
        x = up == kNoNode ? kNoNode : tree.star_anchor(up);
    }
    // the next star segment above, for the delegation test
    int32_t nsa = t.segments[seg].next_star_above;
    NodeId nsa_bot = nsa < 0 ? kNoNode
                             : t.nodes[static_cast<size_t>(t.segments[static_cast<size_t>(nsa)].bot)]
                                   .rnode;
    while (x != kNoNode && on_segment(t, seg, x) && in_le(t, seg, x)) {
        NodeId u = endfirst_star(x, c);
        if (u != kNoNode) {
            if (on_segment(t, seg, u) && in_le(t, seg, u)) {
                x = u; // everything between is covered by u
                ++ctx.pointer_steps;
                continue;
            }
            // u is collected by the star segment it lives on
            if (nsa_bot != kNoNode && tree.depth(u) <= tree.depth(nsa_bot)) break;
        }
        Candidate cand;
        cand.node = x;
        cand.concat = false;
        cand.range_ready = false;
        out.push_back(cand);
        x = next_star(x, c);
        ++ctx.pointer_steps;
    }
}

void Engine::resolve_ranges(std::vector<Candidate>& cands, char32_t c, bool batched,
                            QueryCounters& ctx) const {
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.node < b.node; });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const Candidate& a, const Candidate& b) {
                                return a.node == b.node && a.concat == b.concat;
                            }),
                cands.end());
    const auto* arr = index_->arrays(c);
    if (!arr) return;
    const auto& ranks = arr->ranks;
    const size_t asz = ranks.size();

    struct Slot {
        size_t cand;
        int64_t lo_point = -1, hi_point = -1;
        bool need_lo = false;
        std::optional<size_t> lo, hi;
    };
    std::vector<Slot> slots;
    for (size_t i = 0; i < cands.size(); ++i) {
        Candidate& cand = cands[i];
        if (cand.range_ready) continue;
        if (tables_->has_label(cand.node, c)) {
            auto stored = cand.concat ? index_->stored_right_range(cand.node, c)
                                      : index_->stored_subtree_range(cand.node, c);
            cand.range = stored ? *stored : IndexRange{};
            cand.range_ready = true;
            continue;
        }
        const Node& nd = tree_->at(cand.node);
        Slot s;
        s.cand = i;
        s.hi_point = nd.hi_pos;
        if (cand.concat && cand.pending_lo) {
            s.lo = cand.pending_lo; // seed position is the first one in range
        } else {
            s.need_lo = true;
            s.lo_point = cand.concat ? tree_->at(nd.right).lo_pos : nd.lo_pos;
        }
        slots.push_back(s);
    }

    auto apply = [&](Slot& s) {
        Candidate& cand = cands[s.cand];
        cand.range_ready = true;
        cand.range = IndexRange{}; // empty unless both ends resolve
        if (s.lo && s.hi && *s.lo <= *s.hi) {
            cand.range.lo = static_cast<int32_t>(*s.lo);
            cand.range.hi = static_cast<int32_t>(*s.hi);
        }
    };

    if (!batched) {
        for (auto& s : slots) {
            if (s.need_lo) s.lo = arr->pred.succ_index(s.lo_point, ctx);
            if (s.lo) s.hi = arr->pred.pred_index(s.hi_point, ctx);
            apply(s);
        }
        return;
    }

    std::vector<int64_t> points;
    for (auto& s : slots) {
        if (s.need_lo) points.push_back(s.lo_point);
        points.push_back(s.hi_point);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (!points.empty()) {
        auto preds = arr->pred.batched_pred(points, ctx);
        auto lookup = [&](int64_t p) {
            size_t k = static_cast<size_t>(std::lower_bound(points.begin(), points.end(), p) -
                                           points.begin());
            return preds[k];
        };
        for (auto& s : slots) {
            if (s.need_lo) {
                auto pi = lookup(s.lo_point);
                if (!pi)
                    s.lo = asz ? std::optional<size_t>(0) : std::nullopt;
                else if (static_cast<int64_t>(ranks[*pi]) == s.lo_point)
                    s.lo = pi;
                else
                    s.lo = *pi + 1 < asz ? std::optional<size_t>(*pi + 1) : std::nullopt;
            }
            s.hi = lookup(s.hi_point);
            apply(s);
        }
    }
}

void Engine::emit_candidates(std::vector<Candidate>& cands, char32_t c, std::vector<int32_t>& out,
                             QueryCounters& ctx) const {
    for (auto& cand : cands) {
        size_t before = out.size();
        if (!cand.range_ready) {
            auto stored = cand.concat ? index_->stored_right_range(cand.node, c)
                                      : index_->stored_subtree_range(cand.node, c);
            cand.range = stored ? *stored : IndexRange{};
            cand.range_ready = true;
        }
        if (!cand.range.empty()) {
            if (cand.concat)
                index_->emit_concat(cand.node, c, cand.range, out, ctx);
            else
                index_->emit_star_anchor(cand.node, c, cand.range, out, ctx);
        }
        cand.contributed = out.size() > before;
    }
}

std::vector<NodeId> Engine::collect_concat_nodes(const TransitionTree& t, char32_t c,
                                                 QueryCounters& ctx) const {
    std::vector<SegmentSeeds> seeds;
    compute_seeds(t, c, seeds, /*batched=*/false, ctx);
    std::vector<Candidate> cands;
    for (size_t i = 0; i < t.segments.size(); ++i) {
        auto v = concat_seed_node(t, i, c, seeds[i]);
        std::optional<NodeId> fl;
        if (v && on_segment(t, i, *v)) fl = firstlabel_->query(*v, c, ctx);
        walk_concat_segment(t, i, c, seeds[i], fl, cands, ctx);
    }
    resolve_ranges(cands, c, /*batched=*/false, ctx);
    std::vector<int32_t> sink;
    emit_candidates(cands, c, sink, ctx);
    std::vector<NodeId> nodes;
    for (const auto& cand : cands)
        if (cand.contributed) nodes.push_back(cand.node);
    return nodes;
}

std::vector<NodeId> Engine::collect_star_nodes(const TransitionTree& t, char32_t c,
                                               QueryCounters& ctx) const {
    std::vector<SegmentSeeds> seeds;
    compute_seeds(t, c, seeds, /*batched=*/false, ctx);
    std::vector<Candidate> cands;
    for (size_t i = 0; i < t.segments.size(); ++i) {
        if (!t.segments[i].star_segment) continue;
        auto v = star_seed_node(t, i, c, seeds[i]);
        std::optional<NodeId> fl;
        if (v && on_segment(t, i, *v)) fl = firstlabel_->query(*v, c, ctx);
        walk_star_segment(t, i, c, seeds[i], fl, cands, ctx);
    }
    resolve_ranges(cands, c, /*batched=*/false, ctx);
    std::vector<int32_t> sink;
    emit_candidates(cands, c, sink, ctx);
    std::vector<NodeId> nodes;
    for (const auto& cand : cands)
        if (cand.contributed) nodes.push_back(cand.node);
    return nodes;
}

std::vector<int32_t> Engine::state_set_transition(const std::vector<int32_t>& ranks, char32_t c,
                                                  QueryCounters& ctx) const {
    TransitionScratch scratch;
    return state_set_transition(ranks, c, ctx, scratch);
}

std::vector<int32_t> Engine::state_set_transition(const std::vector<int32_t>& ranks, char32_t c,
                                                  QueryCounters& ctx,
                                                  TransitionScratch& scratch) const {
    for (size_t i = 0; i + 1 < ranks.size(); ++i)
        if (ranks[i] >= ranks[i + 1])
            throw ContractError("state set transition: positions must be strictly increasing");
    scratch.out.clear();
    if (ranks.empty() || !index_->arrays(c)) return scratch.out;

    build_transition_tree(ranks, scratch.t);
    const TransitionTree& t = scratch.t;
    const size_t nseg = t.segments.size();

    auto& seeds = scratch.seeds;
    compute_seeds(t, c, seeds, /*batched=*/true, ctx);

    // First-label queries for all seed nodes in one batch. Seed nodes are
    // ancestors of their segment bots, so sorting by tin keeps the batch in
    // Euler order.
    auto& seed2 = scratch.seed2;
    auto& seed3 = scratch.seed3;
    auto& fl2 = scratch.fl2;
    auto& fl3 = scratch.fl3;
    seed2.assign(nseg, std::nullopt);
    seed3.assign(nseg, std::nullopt);
    fl2.assign(nseg, std::nullopt);
    fl3.assign(nseg, std::nullopt);
    std::vector<std::pair<int32_t, std::pair<size_t, int>>> fl_wanted; // (tin, (seg, which))
    fl_wanted.reserve(2 * nseg);
    for (size_t i = 0; i < nseg; ++i) {
        seed2[i] = concat_seed_node(t, i, c, seeds[i]);
        if (seed2[i] && !on_segment(t, i, *seed2[i])) seed2[i] = std::nullopt;
        if (seed2[i]) fl_wanted.push_back({tree_->at(*seed2[i]).tin, {i, 2}});
        if (t.segments[i].star_segment) {
            seed3[i] = star_seed_node(t, i, c, seeds[i]);
            if (seed3[i] && !on_segment(t, i, *seed3[i])) seed3[i] = std::nullopt;
            if (seed3[i]) fl_wanted.push_back({tree_->at(*seed3[i]).tin, {i, 3}});
        }
    }
    std::sort(fl_wanted.begin(), fl_wanted.end());
    auto& fl_nodes = scratch.fl_nodes;
    fl_nodes.clear();
    for (const auto& [tin, slot] : fl_wanted) {
        NodeId v = slot.second == 2 ? *seed2[slot.first] : *seed3[slot.first];
        if (fl_nodes.empty() || tree_->at(fl_nodes.back()).tin != tin) fl_nodes.push_back(v);
    }
    auto fl_answers = firstlabel_->query_batch(fl_nodes, c, ctx);
    for (const auto& [tin, slot] : fl_wanted) {
        size_t k = static_cast<size_t>(
            std::lower_bound(fl_nodes.begin(), fl_nodes.end(), tin,
                             [&](NodeId a, int32_t b) { return tree_->at(a).tin < b; }) -
            fl_nodes.begin());
        (slot.second == 2 ? fl2 : fl3)[slot.first] = fl_answers[k];
    }

    auto& cands = scratch.cands;
    cands.clear();
    for (size_t i = 0; i < nseg; ++i) {
        walk_concat_segment(t, i, c, seeds[i], fl2[i], cands, ctx);
        walk_star_segment(t, i, c, seeds[i], fl3[i], cands, ctx);
    }
    resolve_ranges(cands, c, /*batched=*/true, ctx);
    emit_candidates(cands, c, scratch.out, ctx);
    std::sort(scratch.out.begin(), scratch.out.end());
    scratch.out.erase(std::unique(scratch.out.begin(), scratch.out.end()), scratch.out.end());
    return scratch.out;
}

} // namespace glush
