#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gtc/aux_graph.hpp"
#include "gtc/gene_tree.hpp"
#include "gtc/tree.hpp"

namespace gtc {

// String triplets to sorted canonical species-id triplets.
std::vector<IdTriplet> triplet_ids(const TripletSet& r, const SpeciesIndex& species);

// Leaf vertex of every species in s, indexed by species id.
std::vector<VertexId> species_leaf_map(const RootedTree& s, const SpeciesIndex& species);

// True iff s displays none of ac|b, bc|a for any ab|c in the sorted set r.
bool agrees_with_ids(const RootedTree& s, const SpeciesIndex& species,
                     const std::vector<IdTriplet>& r);

// Undirected graph on the leaf children of a cherry. An edge means the two
// species must stay together in any split of the cherry; the masks record
// which of the conditions C1..C4 produced it.
struct GoodSplitGraph {
    VertexId cherry = kNoVertex;
    std::vector<int> species;                 // sorted species ids
    std::vector<std::vector<std::uint8_t>> cond;  // cond[i][j]: bit k set = C(k+1) holds

    bool has_edge(int i, int j) const { return cond[i][j] != 0; }
    bool disconnected() const;
};

// From-scratch evaluation of C1..C4 for one cherry (the quartic-time path;
// the solver's incremental l-sets are checked against it in debug mode).
// r must be sorted.
GoodSplitGraph good_split_graph(const GeneTree& g, const TransferForest& forest,
                                const RootedTree& s, VertexId cherry, const TopoSort& q,
                                const std::vector<IdTriplet>& r, const LcaMap& mu);

// None iff connected; otherwise the component holding the smallest species
// label versus the rest.
std::optional<std::pair<std::vector<int>, std::vector<int>>> find_disconnected_bipartition(
    const GoodSplitGraph& gsg, const SpeciesIndex& species);

struct SolveOptions {
    bool naive_mode = false;    // evaluate C1..C4 from scratch instead of the l-sets
    bool verify_lsets = false;  // cross-check the l-sets against the naive path each step
    std::uint64_t shuffle_seed = 0;  // nonzero randomizes cherry order and bipartitions
};

struct SolveStep {
    std::string cherry;               // clade of the refined cherry, e.g. "{A,B,C}"
    std::vector<std::string> part_a;  // species names, sorted
    std::vector<std::string> part_b;
    std::size_t member_set_size = 0;  // |M(Q)| after this refinement
};

struct SolveTrace {
    std::size_t initial_member_set = 0;
    std::vector<SolveStep> steps;
    std::string outcome;  // solution | no_good_split | binary_inconsistent |
                          // start_tree_disagrees | leaf_self_loop
};

struct SolveResult {
    std::optional<RootedTree> species_tree;
    RootedTree final_tree;  // the solution, or the partial refinement at failure
    SolveTrace trace;

    bool solved() const { return species_tree.has_value(); }
};

// Builds a time-consistent binary species tree for g from the star tree, or
// proves none exists. Throws input_error when g violates the axioms.
SolveResult solve(const GeneTree& g, const SolveOptions& opts = {});

// Same search restricted to refinements of an almost binary start tree.
SolveResult solve_gtc(const GeneTree& g, const RootedTree& s0, const SolveOptions& opts = {});

}  // namespace gtc
