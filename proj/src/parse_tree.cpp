#include "glush/parse_tree.hpp"

#include <algorithm>

namespace glush {

bool decode_utf8(std::string_view s, size_t& i, char32_t& out) {
    if (i >= s.size()) return false;
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    int extra;
    char32_t cp;
    if (b0 < 0x80) {
        out = b0;
        ++i;
        return true;
    } else if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        return false;
    }
    if (i + static_cast<size_t>(extra) >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
        unsigned char b = static_cast<unsigned char>(s[i + static_cast<size_t>(k)]);
        if ((b & 0xC0) != 0x80) return false;
        cp = (cp << 6) | (b & 0x3F);
    }
    static const char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += static_cast<size_t>(extra) + 1;
    out = cp;
    return true;
}

void append_utf8(std::string& out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

namespace {

constexpr int kMaxNesting = 4096;

struct Parser {
    std::string_view src;
    size_t i = 0; // byte offset
    int depth = 0;
    ParseTree tree;

    [[noreturn]] void fail(const std::string& msg, size_t at) { throw SyntaxError(msg, at); }

    bool eof() const { return i >= src.size(); }
    char peek() const { return src[i]; }

    NodeId make(NodeKind k, NodeId l = kNoNode, NodeId r = kNoNode, char32_t c = 0) {
        Node n;
        n.kind = k;
        n.left = l;
        n.right = r;
        n.ch = c;
        tree.nodes.push_back(n);
        return static_cast<NodeId>(tree.nodes.size() - 1);
    }

    NodeId parse_alt() {
        NodeId node = parse_cat();
        while (!eof() && peek() == '|') {
            ++i;
            NodeId rhs = parse_cat();
            node = make(NodeKind::Union, node, rhs);
        }
        return node;
    }

    NodeId parse_cat() {
        NodeId node = kNoNode;
        while (!eof() && peek() != '|' && peek() != ')') {
            NodeId factor = parse_rep();
            node = node == kNoNode ? factor : make(NodeKind::Concat, node, factor);
        }
        return node == kNoNode ? make(NodeKind::Epsilon) : node;
    }

    NodeId parse_rep() {
        NodeId node = parse_atom();
        while (!eof() && peek() == '*') {
            ++i;
            node = make(NodeKind::Star, node);
        }
        return node;
    }

    NodeId parse_atom() {
        size_t at = i;
        char c = peek();
        if (c == '(') {
            if (++depth > kMaxNesting) fail("groups nested too deeply", at);
            ++i;
            NodeId inner = parse_alt();
            if (eof() || peek() != ')') fail("unbalanced parenthesis", i);
            ++i;
            --depth;
            return inner;
        }
        if (c == '*') fail("star with no operand", at);
        if (c == ')') fail("unexpected ')'", at);
        char32_t cp = 0;
        if (c == '\\') {
            ++i;
            if (eof()) fail("dangling escape", at);
            if (!decode_utf8(src, i, cp)) fail("invalid UTF-8 in pattern", i);
            return make(NodeKind::Literal, kNoNode, kNoNode, cp);
        }
        if (!decode_utf8(src, i, cp)) fail("invalid UTF-8 in pattern", i);
        return make(NodeKind::Literal, kNoNode, kNoNode, cp);
    }
};

} // namespace

ParseTree parse(std::string_view pattern) {
    Parser p;
    p.src = pattern;
    if (pattern.empty()) {
        p.make(NodeKind::Epsilon);
        p.tree.root = 0;
    } else {
        p.tree.root = p.parse_alt();
        if (!p.eof()) {
            if (p.peek() == ')') p.fail("unbalanced parenthesis", p.i);
            p.fail("trailing input", p.i);
        }
    }
    p.tree.finalize();
    return std::move(p.tree);
}

void ParseTree::finalize() {
    positions.clear();
    pos_by_char.clear();
    // Iterative DFS assigning parent/depth/Euler interval, and position
    // ranks in in-order (left subtree before right).
    int32_t clock = 0;
    struct Frame {
        NodeId v;
        int stage;
    };
    std::vector<Frame> stack;
    nodes[static_cast<size_t>(root)].parent = kNoNode;
    nodes[static_cast<size_t>(root)].depth = 0;
    stack.push_back({root, 0});
    while (!stack.empty()) {
        Frame f = stack.back();
        Node& n = nodes[static_cast<size_t>(f.v)];
        if (f.stage == 0) {
            stack.back().stage = 1;
            n.tin = clock++;
            if (n.kind == NodeKind::Literal) {
                n.pos = static_cast<int32_t>(positions.size());
                positions.push_back(f.v);
                pos_by_char[n.ch].push_back(n.pos);
            }
            for (NodeId c : {n.right, n.left}) { // left ends up on top
                if (c != kNoNode) {
                    nodes[static_cast<size_t>(c)].parent = f.v;
                    nodes[static_cast<size_t>(c)].depth = n.depth + 1;
                    stack.push_back({c, 0});
                }
            }
        } else {
            n.tout = clock++;
            stack.pop_back();
        }
    }
    // lo_pos/hi_pos and parent_star; node indices are not ordered by depth,
    // so walk in tin order (parents before children) and in reverse for the
    // bottom-up rank intervals.
    std::vector<NodeId> order;
    order.reserve(nodes.size());
    for (NodeId v = 0; v < static_cast<NodeId>(nodes.size()); ++v) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return nodes[static_cast<size_t>(a)].tin < nodes[static_cast<size_t>(b)].tin;
    });
    for (NodeId v : order) {
        Node& n = nodes[static_cast<size_t>(v)];
        if (n.parent == kNoNode) {
            n.parent_star = kNoNode;
        } else {
            const Node& p = nodes[static_cast<size_t>(n.parent)];
            n.parent_star = p.kind == NodeKind::Star ? n.parent : p.parent_star;
        }
    }
    // rank intervals: bottom-up
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node& n = nodes[static_cast<size_t>(*it)];
        if (n.kind == NodeKind::Literal) {
            n.lo_pos = n.hi_pos = n.pos;
        } else if (n.kind == NodeKind::Epsilon) {
            n.lo_pos = 0;
            n.hi_pos = -1;
        } else {
            const Node& l = nodes[static_cast<size_t>(n.left)];
            if (n.kind == NodeKind::Star) {
                n.lo_pos = l.lo_pos;
                n.hi_pos = l.hi_pos;
            } else {
                const Node& r = nodes[static_cast<size_t>(n.right)];
                bool le = l.lo_pos > l.hi_pos, re = r.lo_pos > r.hi_pos;
                if (le && re) {
                    n.lo_pos = 0;
                    n.hi_pos = -1;
                } else if (le) {
                    n.lo_pos = r.lo_pos;
                    n.hi_pos = r.hi_pos;
                } else if (re) {
                    n.lo_pos = l.lo_pos;
                    n.hi_pos = l.hi_pos;
                } else {
                    n.lo_pos = l.lo_pos;
                    n.hi_pos = r.hi_pos;
                }
            }
        }
    }
}

namespace {
void dump(const ParseTree& t, NodeId v, std::string& out) {
    const Node& n = t.at(v);
    switch (n.kind) {
    case NodeKind::Epsilon:
        out += "()";
        break;
    case NodeKind::Literal:
        append_utf8(out, n.ch);
        break;
    case NodeKind::Star:
        out += "(";
        dump(t, n.left, out);
        out += ")*";
        break;
    case NodeKind::Concat:
        out += "(";
        dump(t, n.left, out);
        dump(t, n.right, out);
        out += ")";
        break;
    case NodeKind::Union:
        out += "(";
        dump(t, n.left, out);
        out += "|";
        dump(t, n.right, out);
        out += ")";
        break;
    }
}
} // namespace

std::string ParseTree::to_string() const {
    std::string out;
    dump(*this, root, out);
    return out;
}

} // namespace glush
