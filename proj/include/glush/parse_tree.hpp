#ifndef glush_parse_tree_hpp
#define glush_parse_tree_hpp

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glush/errors.hpp"

namespace glush {

using NodeId = int32_t;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind : uint8_t {
    Epsilon, // leaf, matches the empty string
    Literal, // leaf carrying one character; contributes one position
    Concat,  // two children
    Union,   // two children
    Star,    // one child, stored in `left`
};

struct Node {
    NodeKind kind = NodeKind::Epsilon;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    NodeId parent = kNoNode;
    char32_t ch = 0;       // Literal only
    int32_t pos = -1;      // Literal only: in-order position rank, 0-based
    int32_t depth = 0;     // root = 0
    int32_t tin = 0;       // Euler interval: [tin, tout], tin of u <= tin of
    int32_t tout = 0;      //   descendants, tout >= their tout
    int32_t lo_pos = 0;    // in-order rank interval of positions in the
    int32_t hi_pos = -1;   //   subtree; empty iff lo_pos > hi_pos
    NodeId parent_star = kNoNode; // lowest proper Star ancestor

    bool is_leaf() const {
        return kind == NodeKind::Epsilon || kind == NodeKind::Literal;
    }
};

// Binary syntax tree of a regex. Positions are the Literal leaves in
// left-to-right order; `positions[r]` is the node whose rank is r.
struct ParseTree {
    std::vector<Node> nodes;
    NodeId root = kNoNode;
    std::vector<NodeId> positions;
    std::map<char32_t, std::vector<int32_t>> pos_by_char; // ranks, increasing

    int32_t num_positions() const { return static_cast<int32_t>(positions.size()); }
    size_t size() const { return nodes.size(); }

    const Node& at(NodeId v) const { return nodes[static_cast<size_t>(v)]; }
    NodeKind kind(NodeId v) const { return at(v).kind; }
    NodeId left(NodeId v) const { return at(v).left; }
    NodeId right(NodeId v) const { return at(v).right; }
    NodeId parent(NodeId v) const { return at(v).parent; }
    int32_t depth(NodeId v) const { return at(v).depth; }
    NodeId parent_star(NodeId v) const { return at(v).parent_star; }

    // Star nodes anchor at themselves; everything else at its lowest proper
    // Star ancestor. This is the node whose first set an internal
    // star-transition draws from.
    NodeId star_anchor(NodeId v) const {
        return kind(v) == NodeKind::Star ? v : parent_star(v);
    }

    bool is_ancestor(NodeId u, NodeId v) const { // ancestor-or-self
        return at(u).tin <= at(v).tin && at(v).tout <= at(u).tout;
    }

    char32_t label_of_position(int32_t rank) const {
        return at(positions[static_cast<size_t>(rank)]).ch;
    }

    const std::vector<int32_t>* positions_of_char(char32_t c) const {
        auto it = pos_by_char.find(c);
        return it == pos_by_char.end() ? nullptr : &it->second;
    }

    // Fills parent/depth/tin/tout/lo_pos/hi_pos/parent_star and the position
    // arrays. Called once after the node vector is assembled.
    void finalize();

    // Parenthesized dump used by tests and error messages.
    std::string to_string() const;
};

// Decodes one UTF-8 scalar value. Returns false on malformed input.
bool decode_utf8(std::string_view s, size_t& i, char32_t& out);
void append_utf8(std::string& out, char32_t c);

// Grammar:  alt = cat ('|' cat)* ; cat = rep* ; rep = atom '*'* ;
//           atom = literal | '(' alt ')' ;
//           literal = '\' any-char | any char not in "()|*\"
// Empty alternative or group is an Epsilon leaf. Union and concatenation
// associate to the left; '*' binds tightest.
ParseTree parse(std::string_view pattern);

} // namespace glush

#endif
