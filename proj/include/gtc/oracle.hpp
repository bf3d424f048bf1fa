#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gtc/aux_graph.hpp"
#include "gtc/gene_tree.hpp"
#include "gtc/tree.hpp"
#include "gtc/triplet.hpp"

namespace gtc {

// Visits every rooted binary tree shape on the label set exactly once
// ((2n-3)!! trees); stop early by returning false. Refuses label sets larger
// than `limit` — the count explodes.
void enumerate_binary_species_trees(const std::vector<std::string>& labels,
                                    const std::function<bool(const RootedTree&)>& visit,
                                    int limit = 8);

std::vector<RootedTree> all_binary_species_trees(const std::vector<std::string>& labels,
                                                 int limit = 8);

// Depth-first cycle detection, independent of the Kahn-style peeling used by
// check_pair.
bool has_cycle_dfs(const AuxGraph& graph);

// First enumerated binary species tree that displays the informative triplets
// with an acyclic timing graph; the ground truth for the solver at desk scale.
std::optional<RootedTree> brute_force_solve(const GeneTree& g, int limit = 8);

// Classic BUILD recursion; none iff the triplet set is incompatible.
std::optional<RootedTree> aho_build(const TripletSet& r, const std::vector<std::string>& leaves);

struct InstanceGenConfig {
    int species_count = 4;
    int gene_count_hint = 8;  // scales the cap on simulated lineages
    double dup_rate = 0.3;
    double hgt_rate = 0.2;
    double loss_rate = 0.2;
    std::uint64_t seed = 1;
};

// Simulates gene evolution along a random dated species tree (duplications,
// time-respecting transfers, losses), prunes extinct lineages and suppresses
// unary vertices. The result always passes validate_axioms; seeds whose
// collapsed history violates an axiom retry with derived sub-seeds.
GeneTree generate_instance(const InstanceGenConfig& cfg);

}  // namespace gtc
