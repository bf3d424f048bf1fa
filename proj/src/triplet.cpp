#include "gtc/triplet.hpp"

#include <algorithm>

namespace gtc {

Triplet Triplet::make(std::string a, std::string b, std::string c) {
    if (a == b || a == c || b == c) throw input_error("triplet labels must be pairwise distinct");
    if (b < a) std::swap(a, b);
    return Triplet{std::move(a), std::move(b), std::move(c)};
}

TripletSet displayed_triplets(const RootedTree& tree) {
    auto leaves = tree.leaves();
    LcaIndex idx(tree);
    TripletSet out;
    for (size_t i = 0; i < leaves.size(); ++i) {
        for (size_t j = i + 1; j < leaves.size(); ++j) {
            for (size_t k = j + 1; k < leaves.size(); ++k) {
                VertexId a = leaves[i], b = leaves[j], c = leaves[k];
                VertexId ab = idx.lca(a, b), ac = idx.lca(a, c), bc = idx.lca(b, c);
                int dab = idx.depth(ab), dac = idx.depth(ac), dbc = idx.depth(bc);
                // Two of the three lcas coincide; the deeper odd one names the
                // cherry pair. All equal means the triple resolves to a star.
                if (dab == dac && dab == dbc) continue;
                if (dab > dac)
                    out.insert(Triplet::make(tree.label(a), tree.label(b), tree.label(c)));
                else if (dac > dab)
                    out.insert(Triplet::make(tree.label(a), tree.label(c), tree.label(b)));
                else
                    out.insert(Triplet::make(tree.label(b), tree.label(c), tree.label(a)));
            }
        }
    }
    return out;
}

bool displays(const RootedTree& tree, const LcaIndex& idx, const Triplet& t) {
    VertexId a = tree.leaf_by_label(t.first);
    VertexId b = tree.leaf_by_label(t.second);
    VertexId c = tree.leaf_by_label(t.out);
    if (a == kNoVertex || b == kNoVertex || c == kNoVertex)
        throw input_error("triplet label is not a leaf of the tree: " + t.str());
    return displays_leaves(idx, a, b, c);
}

bool displays_leaves(const LcaIndex& idx, VertexId a, VertexId b, VertexId c) {
    VertexId ab = idx.lca(a, b), ac = idx.lca(a, c), bc = idx.lca(b, c);
    return idx.depth(ab) > idx.depth(ac) && ac == bc;
}

bool agrees(const RootedTree& tree, const TripletSet& r) {
    LcaIndex idx(tree);
    for (const Triplet& t : r) {
        if (displays(tree, idx, Triplet{std::min(t.first, t.out), std::max(t.first, t.out), t.second}))
            return false;
        if (displays(tree, idx, Triplet{std::min(t.second, t.out), std::max(t.second, t.out), t.first}))
            return false;
    }
    return true;
}

}  // namespace gtc
