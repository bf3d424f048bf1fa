#include "gtc/tree.hpp"

#include <algorithm>
#include <cassert>

namespace gtc {

RootedTree RootedTree::single_leaf(std::string label) {
    TreeBuilder b;
    b.add_root_leaf(std::move(label));
    return std::move(b).build();
}

VertexId RootedTree::leaf_by_label(std::string_view name) const {
    auto it = leaf_index_.find(std::string(name));
    return it == leaf_index_.end() ? kNoVertex : it->second;
}

std::vector<VertexId> RootedTree::leaves() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < size(); ++v)
        if (is_leaf(v)) out.push_back(v);
    return out;
}

int RootedTree::num_leaves() const {
    int n = 0;
    for (VertexId v = 0; v < size(); ++v)
        if (is_leaf(v)) ++n;
    return n;
}

std::vector<std::string> RootedTree::leaf_labels() const {
    std::vector<std::string> out;
    for (VertexId v = 0; v < size(); ++v)
        if (is_leaf(v)) out.push_back(label_[v]);
    return out;
}

std::vector<std::string> RootedTree::sorted_leaf_labels() const {
    auto out = leaf_labels();
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexId> RootedTree::preorder() const {
    std::vector<VertexId> order;
    order.reserve(size());
    std::vector<VertexId> stack{root_};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        const auto& ch = children_[v];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
}

std::vector<VertexId> RootedTree::postorder() const {
    auto order = preorder();
    std::reverse(order.begin(), order.end());
    return order;
}

bool RootedTree::is_ancestor_naive(VertexId ancestor, VertexId x) const {
    for (VertexId v = x; v != kNoVertex; v = parent_[v])
        if (v == ancestor) return true;
    return false;
}

VertexId TreeBuilder::add_vertex(VertexId parent, std::string label) {
    VertexId id = static_cast<VertexId>(parent_.size());
    parent_.push_back(parent);
    children_.emplace_back();
    label_.push_back(std::move(label));
    if (parent != kNoVertex) children_[parent].push_back(id);
    return id;
}

VertexId TreeBuilder::add_root() {
    if (root_ != kNoVertex) throw input_error("tree already has a root");
    root_ = add_vertex(kNoVertex, "");
    return root_;
}

VertexId TreeBuilder::add_root_leaf(std::string label) {
    if (root_ != kNoVertex) throw input_error("tree already has a root");
    root_ = add_vertex(kNoVertex, std::move(label));
    return root_;
}

VertexId TreeBuilder::add_internal(VertexId parent) {
    return add_vertex(parent, "");
}

VertexId TreeBuilder::add_leaf(VertexId parent, std::string label) {
    if (label.empty()) throw input_error("leaf label must be non-empty");
    return add_vertex(parent, std::move(label));
}

RootedTree TreeBuilder::build() && {
    if (root_ == kNoVertex) throw input_error("cannot build an empty tree");
    RootedTree t;
    t.parent_ = std::move(parent_);
    t.children_ = std::move(children_);
    t.label_ = std::move(label_);
    t.root_ = root_;
    for (VertexId v = 0; v < t.size(); ++v) {
        bool leaf = t.children_[v].empty();
        if (leaf && t.label_[v].empty())
            throw input_error("leaf without a label (vertex " + std::to_string(v) + ")");
        if (!leaf && !t.label_[v].empty())
            throw input_error("internal vertex carries a leaf label: " + t.label_[v]);
        if (leaf) {
            auto [it, inserted] = t.leaf_index_.emplace(t.label_[v], v);
            if (!inserted) throw input_error("duplicate leaf label: " + t.label_[v]);
        }
    }
    return t;
}

LcaIndex::LcaIndex(const RootedTree& tree) {
    int n = tree.size();
    first_occ_.assign(n, -1);
    euler_.reserve(2 * n);
    depth_.reserve(2 * n);

    // Iterative Euler tour.
    struct Frame {
        VertexId v;
        int child = 0;
    };
    std::vector<Frame> stack;
    std::vector<int> vdepth(n, 0);
    stack.push_back({tree.root(), 0});
    first_occ_[tree.root()] = 0;
    euler_.push_back(tree.root());
    depth_.push_back(0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& ch = tree.children(f.v);
        if (f.child < static_cast<int>(ch.size())) {
            VertexId c = ch[f.child++];
            vdepth[c] = vdepth[f.v] + 1;
            first_occ_[c] = static_cast<int>(euler_.size());
            euler_.push_back(c);
            depth_.push_back(vdepth[c]);
            stack.push_back({c, 0});
        } else {
            stack.pop_back();
            if (!stack.empty()) {
                euler_.push_back(stack.back().v);
                depth_.push_back(vdepth[stack.back().v]);
            }
        }
    }

    int m = static_cast<int>(euler_.size());
    log2_.assign(m + 1, 0);
    for (int i = 2; i <= m; ++i) log2_[i] = log2_[i / 2] + 1;
    int levels = log2_[m] + 1;
    table_.assign(levels, std::vector<int>(m));
    for (int i = 0; i < m; ++i) table_[0][i] = i;
    for (int k = 1; k < levels; ++k) {
        int span = 1 << k;
        for (int i = 0; i + span <= m; ++i) {
            int a = table_[k - 1][i];
            int b = table_[k - 1][i + span / 2];
            table_[k][i] = depth_[a] <= depth_[b] ? a : b;
        }
    }
}

int LcaIndex::euler_min(int l, int r) const {
    int k = log2_[r - l + 1];
    int a = table_[k][l];
    int b = table_[k][r - (1 << k) + 1];
    return depth_[a] <= depth_[b] ? a : b;
}

VertexId LcaIndex::lca(VertexId a, VertexId b) const {
    int l = first_occ_[a], r = first_occ_[b];
    if (l > r) std::swap(l, r);
    return euler_[euler_min(l, r)];
}

VertexId LcaIndex::lca(const std::vector<VertexId>& xs) const {
    if (xs.empty()) throw input_error("lca of an empty vertex set");
    VertexId acc = xs.front();
    for (size_t i = 1; i < xs.size(); ++i) acc = lca(acc, xs[i]);
    return acc;
}

VertexId lca(const RootedTree& tree, const std::vector<VertexId>& xs) {
    if (xs.empty()) throw input_error("lca of an empty vertex set");
    for (VertexId v : xs)
        if (v < 0 || v >= tree.size()) throw input_error("unknown vertex id " + std::to_string(v));
    LcaIndex idx(tree);
    return idx.lca(xs);
}

namespace {

// Copies the subtree of `src` rooted at v into the builder, keeping only
// branches that contain marked leaves and suppressing unary vertices.
VertexId copy_restricted(const RootedTree& src, const std::vector<char>& keep_leaf,
                         const std::vector<int>& kept_below, VertexId v, TreeBuilder& b,
                         VertexId parent) {
    if (src.is_leaf(v))
        return parent == kNoVertex ? b.add_root_leaf(src.label(v)) : b.add_leaf(parent, src.label(v));
    std::vector<VertexId> live;
    for (VertexId c : src.children(v))
        if (kept_below[c] > 0) live.push_back(c);
    assert(!live.empty());
    if (live.size() == 1)  // suppress
        return copy_restricted(src, keep_leaf, kept_below, live.front(), b, parent);
    VertexId nv = parent == kNoVertex ? b.add_root() : b.add_internal(parent);
    for (VertexId c : live) copy_restricted(src, keep_leaf, kept_below, c, b, nv);
    return nv;
}

}  // namespace

RootedTree restrict_to(const RootedTree& tree, const std::vector<std::string>& labels) {
    if (labels.empty()) throw input_error("restriction to an empty leaf set");
    std::vector<char> keep(tree.size(), 0);
    for (const auto& name : labels) {
        VertexId v = tree.leaf_by_label(name);
        if (v == kNoVertex) throw input_error("unknown leaf label: " + name);
        keep[v] = 1;
    }
    std::vector<int> below(tree.size(), 0);
    for (VertexId v : tree.postorder()) {
        if (tree.is_leaf(v)) below[v] = keep[v];
        for (VertexId c : tree.children(v)) below[v] += below[c];
    }
    // Start at the lca of the kept leaves: lowest vertex covering all of them.
    VertexId top = tree.root();
    for (;;) {
        VertexId next = kNoVertex;
        for (VertexId c : tree.children(top))
            if (below[c] == below[tree.root()]) next = c;
        if (next == kNoVertex) break;
        top = next;
    }
    TreeBuilder b;
    copy_restricted(tree, keep, below, top, b, kNoVertex);
    return std::move(b).build();
}

Refinement apply_extension(const RootedTree& tree, VertexId x, const std::vector<VertexId>& group) {
    if (x < 0 || x >= tree.size()) throw input_error("unknown vertex id");
    const auto& ch = tree.children(x);
    std::vector<char> is_child(tree.size(), 0);
    for (VertexId c : ch) is_child[c] = 1;
    std::vector<char> in_group(tree.size(), 0);
    for (VertexId g : group) {
        if (g < 0 || g >= tree.size() || !is_child[g])
            throw input_error("extension group must be a subset of the children");
        in_group[g] = 1;
    }
    size_t distinct = 0;
    for (VertexId c : ch) distinct += in_group[c];
    if (distinct == ch.size()) throw input_error("extension group must be a strict subset of the children");

    if (distinct <= 1) return {tree, kNoVertex};

    RootedTree t = tree;  // ids preserved, new vertex appended
    VertexId y = static_cast<VertexId>(t.parent_.size());
    t.parent_.push_back(x);
    t.children_.emplace_back();
    t.label_.emplace_back();
    auto& xc = t.children_[x];
    std::vector<VertexId> kept;
    kept.reserve(xc.size());
    for (VertexId c : xc) {
        if (in_group[c]) {
            t.parent_[c] = y;
            t.children_[y].push_back(c);
        } else {
            kept.push_back(c);
        }
    }
    kept.push_back(y);
    xc = std::move(kept);
    return {std::move(t), y};
}

SplitResult split_refinement(const RootedTree& tree, VertexId x, const std::vector<VertexId>& part_a,
                             const std::vector<VertexId>& part_b) {
    if (x < 0 || x >= tree.size() || !is_cherry(tree, x))
        throw input_error("split refinement requires a cherry");
    if (part_a.empty() || part_b.empty()) throw input_error("split parts must be non-empty");
    std::vector<char> seen(tree.size(), 0);
    for (VertexId v : part_a) seen[v] = 1;
    for (VertexId v : part_b) {
        if (seen[v]) throw input_error("split parts must be disjoint");
        seen[v] = 2;
    }
    for (VertexId c : tree.children(x))
        if (!seen[c]) throw input_error("split parts must cover all children of the cherry");
    if (part_a.size() + part_b.size() != tree.children(x).size())
        throw input_error("split parts contain non-children");

    auto first = apply_extension(tree, x, part_a);
    VertexId rep_a = first.new_vertex != kNoVertex ? first.new_vertex : part_a.front();
    auto second = apply_extension(first.tree, x, part_b);
    VertexId rep_b = second.new_vertex != kNoVertex ? second.new_vertex : part_b.front();
    return {std::move(second.tree), rep_a, rep_b};
}

bool is_binary(const RootedTree& tree) {
    for (VertexId v = 0; v < tree.size(); ++v)
        if (tree.is_internal(v) && tree.children(v).size() != 2) return false;
    return true;
}

bool is_cherry(const RootedTree& tree, VertexId v) {
    if (!tree.is_internal(v)) return false;
    for (VertexId c : tree.children(v))
        if (!tree.is_leaf(c)) return false;
    return true;
}

bool is_almost_binary(const RootedTree& tree) {
    for (VertexId v = 0; v < tree.size(); ++v)
        if (tree.is_internal(v) && tree.children(v).size() != 2 && !is_cherry(tree, v)) return false;
    return true;
}

std::vector<VertexId> cherries(const RootedTree& tree) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < tree.size(); ++v)
        if (is_cherry(tree, v)) out.push_back(v);
    return out;
}

}  // namespace gtc
