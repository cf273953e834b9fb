#ifndef glush_lca_hpp
#define glush_lca_hpp

#include <utility>
#include <vector>

#include "glush/parse_tree.hpp"
#include "glush/rmq.hpp"

namespace glush {

// Constant-time lowest common ancestors from an Euler tour of the parse
// tree plus RMQ over tour depths.
class LcaStructure {
public:
    LcaStructure() = default;

    explicit LcaStructure(const ParseTree& tree) {
        entry_.assign(tree.size(), -1);
        tour_.reserve(2 * tree.size());
        std::vector<int32_t> depths;
        depths.reserve(2 * tree.size());
        auto record = [&](NodeId v) {
            if (entry_[static_cast<size_t>(v)] < 0)
                entry_[static_cast<size_t>(v)] = static_cast<int32_t>(tour_.size());
            tour_.push_back(v);
            depths.push_back(tree.depth(v));
        };
        struct Frame {
            NodeId v;
            int next_child;
        };
        std::vector<Frame> stack{{tree.root, 0}};
        record(tree.root);
        while (!stack.empty()) {
            Frame& f = stack.back();
            const Node& nd = tree.at(f.v);
            NodeId child = kNoNode;
            if (f.next_child == 0)
                child = nd.left != kNoNode ? nd.left : nd.right;
            else if (f.next_child == 1 && nd.left != kNoNode)
                child = nd.right;
            if (child != kNoNode) {
                ++f.next_child;
                stack.push_back({child, 0});
                record(child);
            } else {
                stack.pop_back();
                if (!stack.empty()) record(stack.back().v);
            }
        }
        rmq_ = RmqStructure(std::move(depths));
    }

    NodeId lca(NodeId u, NodeId v) const {
        size_t a = static_cast<size_t>(entry_[static_cast<size_t>(u)]);
        size_t b = static_cast<size_t>(entry_[static_cast<size_t>(v)]);
        if (a > b) std::swap(a, b);
        return tour_[static_cast<size_t>(rmq_.query(a, b))];
    }

private:
    std::vector<NodeId> tour_;
    std::vector<int32_t> entry_;
    RmqStructure rmq_;
};

} // namespace glush

#endif
