#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gtc/gene_tree.hpp"
#include "gtc/newick.hpp"
#include "gtc/tree.hpp"

namespace fixtures {

// Assembles the three parallel arrays a GeneTree wants while building.
class GeneTreeBuilder {
public:
    gtc::VertexId add_root(gtc::Event e) {
        gtc::VertexId v = builder_.add_root();
        push(e, false);
        return v;
    }
    gtc::VertexId add_internal(gtc::VertexId parent, gtc::Event e, bool transfer_edge = false) {
        gtc::VertexId v = builder_.add_internal(parent);
        push(e, transfer_edge);
        return v;
    }
    gtc::VertexId add_leaf(gtc::VertexId parent, const std::string& gene,
                           const std::string& species, bool transfer_edge = false) {
        gtc::VertexId v = parent == gtc::kNoVertex ? builder_.add_root_leaf(gene)
                                                   : builder_.add_leaf(parent, gene);
        push(gtc::Event::leaf, transfer_edge);
        sigma_[gene] = species;
        return v;
    }

    gtc::GeneTree build() {
        return gtc::GeneTree(std::move(builder_).build(), std::move(events_),
                             std::move(transfer_), sigma_);
    }

private:
    void push(gtc::Event e, bool transfer_edge) {
        events_.push_back(e);
        transfer_.push_back(transfer_edge ? 1 : 0);
    }

    gtc::TreeBuilder builder_;
    std::vector<gtc::Event> events_;
    std::vector<char> transfer_;
    std::map<std::string, std::string> sigma_;
};

// Four species, informative set exactly {AB|D, AC|D}. From the star the
// solver needs exactly two refinements, first ({A,B,C},{D}); of the three
// displaying binary trees, (((A,B),C),D) is consistent while the other two
// have cyclic timing graphs.
inline const char* worked_example_newick() {
    return "(((b6@B,(d5@D,(a5@A,b5@B)[&ev=s,tr=1])[&ev=t,tr=1])[&ev=t],c6@C[&tr=1])[&ev=t],"
           "((a4@A,c4@C)[&ev=s],d4@D[&tr=1])[&ev=t])[&ev=d];";
}

inline gtc::GeneTree worked_example() { return gtc::parse_gene_tree(worked_example_newick()); }

// Root transfer vertex with duplication caterpillars of p and q distinct
// species on the plain and transferred side; no speciation vertices, so the
// informative set comes from the transfer edge alone.
inline gtc::GeneTree single_transfer_instance(int p, int q) {
    GeneTreeBuilder b;
    gtc::VertexId root = b.add_root(gtc::Event::transfer);
    int counter = 0;
    auto chain = [&](gtc::VertexId parent, int count, const std::string& prefix,
                     bool transfer_edge) {
        gtc::VertexId at = parent;
        bool flag = transfer_edge;
        for (int i = 0; i + 1 < count; ++i) {
            at = b.add_internal(at, gtc::Event::duplication, flag);
            flag = false;
            b.add_leaf(at, "g" + std::to_string(counter++), prefix + std::to_string(i));
        }
        b.add_leaf(at, "g" + std::to_string(counter++), prefix + std::to_string(count - 1), flag);
    };
    chain(root, p, "P", false);
    chain(root, q, "Q", true);
    return b.build();
}

// Random binary gene tree, all internal vertices speciations, leaf i in its
// own species.
inline gtc::GeneTree random_speciation_tree(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Random binary shape by leaf insertion over parent/left/right arrays.
    std::vector<int> parent{-1}, left{-1}, right{-1}, leaf{0};
    int root = 0;
    for (int next = 1; next < n; ++next) {
        int edges = static_cast<int>(parent.size());
        int pick = static_cast<int>(rng() % static_cast<std::uint64_t>(edges));  // node; root = above
        int l = static_cast<int>(parent.size());
        parent.push_back(-1); left.push_back(-1); right.push_back(-1); leaf.push_back(next);
        int m = static_cast<int>(parent.size());
        parent.push_back(-1); left.push_back(-1); right.push_back(-1); leaf.push_back(-1);
        if (pick == root) {
            left[m] = root; right[m] = l;
            parent[root] = m; parent[l] = m;
            root = m;
        } else {
            int p = parent[pick];
            (left[p] == pick ? left[p] : right[p]) = m;
            parent[m] = p;
            left[m] = pick; right[m] = l;
            parent[pick] = m; parent[l] = m;
        }
    }
    GeneTreeBuilder b;
    auto emit = [&](auto&& self, int node, gtc::VertexId out_parent) -> void {
        if (leaf[node] >= 0) {
            std::string id = std::to_string(leaf[node]);
            b.add_leaf(out_parent, "g" + id, "S" + id);
            return;
        }
        gtc::VertexId v = out_parent == gtc::kNoVertex
                              ? b.add_root(gtc::Event::speciation)
                              : b.add_internal(out_parent, gtc::Event::speciation);
        self(self, left[node], v);
        self(self, right[node], v);
    };
    emit(emit, root, gtc::kNoVertex);
    return b.build();
}

// Random leaf-labeled tree with occasional multifurcations.
inline gtc::RootedTree random_tree(int leaves, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> labels;
    for (int i = 0; i < leaves; ++i) labels.push_back("L" + std::to_string(i));
    gtc::TreeBuilder b;
    auto build = [&](auto&& self, std::vector<std::string> slice, gtc::VertexId parent) -> void {
        if (slice.size() == 1) {
            if (parent == gtc::kNoVertex)
                b.add_root_leaf(slice.front());
            else
                b.add_leaf(parent, slice.front());
            return;
        }
        gtc::VertexId v = parent == gtc::kNoVertex ? b.add_root() : b.add_internal(parent);
        int max_parts = std::min<int>(4, static_cast<int>(slice.size()));
        int parts = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_parts - 1));
        std::shuffle(slice.begin(), slice.end(), rng);
        std::vector<std::vector<std::string>> groups(parts);
        for (size_t i = 0; i < slice.size(); ++i)
            groups[i < static_cast<size_t>(parts) ? i : rng() % parts].push_back(slice[i]);
        for (auto& grp : groups) self(self, std::move(grp), v);
        return;
    };
    build(build, labels, gtc::kNoVertex);
    return std::move(b).build();
}

}  // namespace fixtures
