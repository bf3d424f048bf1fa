#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtc/gene_tree.hpp"
#include "gtc/tree.hpp"

namespace gtc {

// mu_hat: every gene vertex mapped to the lca in S of its component-restricted
// species set. Total even when no reconciliation exists.
using LcaMap = std::vector<VertexId>;

LcaMap lca_map(const GeneTree& g, const RootedTree& s, const LcaIndex& s_idx);
LcaMap lca_map(const GeneTree& g, const RootedTree& s);

// Construction rules for the timing graph on V(T) + V(S):
//   a1  every gene-tree edge, endpoints replaced by mu_hat for leaves/speciations
//   a2  every species-tree edge
//   a3  (u, mu_hat(u)) for every duplication/transfer vertex u
//   a4  (lca_S(mu_hat(u), mu_hat(v)), u) for every transfer edge (u, v)
enum class EdgeRule : std::uint8_t { a1, a2, a3, a4 };

const char* edge_rule_name(EdgeRule r);

// Directed multigraph over gene vertices [0, num_gene) and species vertices
// [num_gene, num_gene + num_species); parallel edges keep their rule tags.
struct AuxGraph {
    int num_gene = 0;
    int num_species = 0;

    struct Edge {
        int from, to;
        EdgeRule rule;
    };
    std::vector<Edge> edges;

    int num_nodes() const { return num_gene + num_species; }
    int gene_node(VertexId v) const { return v; }
    int species_node(VertexId x) const { return num_gene + x; }
    bool is_species_node(int n) const { return n >= num_gene; }
    VertexId species_of(int n) const { return n - num_gene; }

    bool has_self_loop_at_species_leaf(const RootedTree& s) const;
};

AuxGraph build_aux_graph(const GeneTree& g, const RootedTree& s, const LcaMap& mu,
                         const LcaIndex& s_idx);
AuxGraph build_aux_graph(const GeneTree& g, const RootedTree& s, const LcaMap& mu);

// Greedy in-degree-0 peeling. The member set is unique regardless of
// tie-breaking; the sequence uses the smallest rank (default: node id) first.
struct TopoSort {
    std::vector<int> sequence;
    std::vector<char> in_set;  // per node

    size_t member_count() const { return sequence.size(); }
    bool contains(int node) const { return in_set[node] != 0; }
    bool complete(int num_nodes) const { return static_cast<int>(sequence.size()) == num_nodes; }
};

TopoSort maximal_topological_sort(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                                  const std::vector<int>* tie_rank = nullptr);
TopoSort maximal_topological_sort(const AuxGraph& graph, const std::vector<int>* tie_rank = nullptr);

// Human-readable node name for certificates: gene vertices by label/event,
// species vertices by label or leaf-set clade.
std::string aux_node_name(const AuxGraph& graph, const GeneTree& g, const RootedTree& s, int node);

struct PairVerdict {
    enum class Kind { consistent, missing_triplets, cyclic };
    Kind kind = Kind::consistent;
    TripletSet missing;              // for missing_triplets
    std::vector<int> cycle_nodes;    // for cyclic: aux node ids along one cycle
    std::vector<std::string> cycle;  // same cycle, readable names

    bool consistent() const { return kind == Kind::consistent; }
};

// Consistent iff s displays every informative triplet and the timing graph is
// acyclic; otherwise carries the missing triplets or one concrete cycle.
PairVerdict check_pair(const GeneTree& g, const RootedTree& s);

}  // namespace gtc
