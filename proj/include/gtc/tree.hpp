#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gtc {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

/// Thrown when an input violates a documented precondition.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RootedTree;
struct Refinement;
Refinement apply_extension(const RootedTree& tree, VertexId x, const std::vector<VertexId>& group);

// Rooted, leaf-labeled tree with dense vertex ids. Values are immutable once
// built; refinement operations return a new tree that keeps the old ids and
// appends any new vertices at the end, so bookkeeping indexed by VertexId
// stays valid across refinements.
class RootedTree {
public:
    RootedTree() = default;

    static RootedTree single_leaf(std::string label);

    VertexId root() const { return root_; }
    int size() const { return static_cast<int>(parent_.size()); }
    bool empty() const { return parent_.empty(); }

    VertexId parent(VertexId v) const { return parent_[v]; }
    const std::vector<VertexId>& children(VertexId v) const { return children_[v]; }
    bool is_leaf(VertexId v) const { return children_[v].empty(); }
    bool is_internal(VertexId v) const { return !children_[v].empty(); }
    bool is_root(VertexId v) const { return v == root_; }

    // Empty string for internal vertices; leaves always carry a label.
    const std::string& label(VertexId v) const { return label_[v]; }
    VertexId leaf_by_label(std::string_view name) const;
    bool has_leaf_label(std::string_view name) const { return leaf_by_label(name) != kNoVertex; }

    std::vector<VertexId> leaves() const;
    int num_leaves() const;
    std::vector<std::string> leaf_labels() const;         // tree order
    std::vector<std::string> sorted_leaf_labels() const;  // lexicographic

    // Children before parents / parents before children.
    std::vector<VertexId> postorder() const;
    std::vector<VertexId> preorder() const;

    // True if y lies on the root-to-x path (x == y counts).
    bool is_ancestor_naive(VertexId ancestor, VertexId x) const;

private:
    friend class TreeBuilder;
    friend Refinement apply_extension(const RootedTree&, VertexId, const std::vector<VertexId>&);

    std::vector<VertexId> parent_;
    std::vector<std::vector<VertexId>> children_;
    std::vector<std::string> label_;
    std::unordered_map<std::string, VertexId> leaf_index_;
    VertexId root_ = kNoVertex;
};

// Incremental construction; build() validates the leaf-label invariants.
class TreeBuilder {
public:
    VertexId add_root();
    VertexId add_root_leaf(std::string label);
    VertexId add_internal(VertexId parent);
    VertexId add_leaf(VertexId parent, std::string label);

    int size() const { return static_cast<int>(parent_.size()); }

    // Throws input_error on duplicate leaf labels or an unlabeled leaf.
    RootedTree build() &&;

private:
    VertexId add_vertex(VertexId parent, std::string label);

    std::vector<VertexId> parent_;
    std::vector<std::vector<VertexId>> children_;
    std::vector<std::string> label_;
    VertexId root_ = kNoVertex;
};

// Constant-time LCA queries after O(n log n) preprocessing (Euler tour plus
// sparse-table range minimum).
class LcaIndex {
public:
    explicit LcaIndex(const RootedTree& tree);

    VertexId lca(VertexId a, VertexId b) const;
    VertexId lca(const std::vector<VertexId>& xs) const;

    int depth(VertexId v) const { return depth_[first_occ_[v]]; }
    bool is_ancestor(VertexId ancestor, VertexId x) const { return lca(ancestor, x) == ancestor; }

private:
    int euler_min(int l, int r) const;  // index into euler_ of min-depth entry

    std::vector<VertexId> euler_;
    std::vector<int> depth_;      // parallel to euler_
    std::vector<int> first_occ_;  // per vertex
    std::vector<std::vector<int>> table_;
    std::vector<int> log2_;
};

// Result of a refinement; ids of the input tree are unchanged, new internal
// vertices (if any) are appended.
struct Refinement {
    RootedTree tree;
    VertexId new_vertex = kNoVertex;  // kNoVertex when the tree is unchanged
};

struct SplitResult {
    RootedTree tree;
    VertexId rep_a = kNoVertex;  // child of x covering part A (the leaf itself for singletons)
    VertexId rep_b = kNoVertex;
};

// lca over a non-empty set of vertices; builds a transient index, so prefer
// LcaIndex when querying repeatedly.
VertexId lca(const RootedTree& tree, const std::vector<VertexId>& xs);

// Minimal subtree connecting the leaves labeled by `labels`, unary vertices
// suppressed. Fresh ids, labels preserved.
RootedTree restrict_to(const RootedTree& tree, const std::vector<std::string>& labels);

// apply_extension (declared above) inserts a new vertex grouping `group`
// below x; identity when |group| <= 1.

// Resolves a cherry x by partitioning its children into two non-empty parts.
SplitResult split_refinement(const RootedTree& tree, VertexId x,
                             const std::vector<VertexId>& part_a,
                             const std::vector<VertexId>& part_b);

bool is_binary(const RootedTree& tree);
bool is_almost_binary(const RootedTree& tree);
bool is_cherry(const RootedTree& tree, VertexId v);
std::vector<VertexId> cherries(const RootedTree& tree);

}  // namespace gtc
