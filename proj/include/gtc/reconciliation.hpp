#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtc/aux_graph.hpp"
#include "gtc/gene_tree.hpp"
#include "gtc/tree.hpp"

namespace gtc {

// A point in the species tree: either the vertex itself or a point on the
// edge from its parent. The position on the edge above the root (the planted
// edge) hosts duplications whose lca-map hits the root.
struct SpeciesPosition {
    VertexId vertex = kNoVertex;
    bool on_parent_edge = false;

    bool operator==(const SpeciesPosition&) const = default;
};

// p lies weakly below q / strictly below q.
bool position_le(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q);
bool position_lt(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q);
bool positions_comparable(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q);

std::string position_str(const RootedTree& s, SpeciesPosition p);

// Embedding of the gene tree into the species tree plus exact integer time
// maps. Leaves and speciations sit on vertices, duplications and transfers on
// the edge above their lca-map image.
struct Reconciliation {
    std::vector<SpeciesPosition> mu;   // per gene vertex
    std::vector<std::int64_t> tau_gene;
    std::vector<std::int64_t> tau_species;
};

// Requires check_pair(g, s) == consistent (input_error otherwise); the result
// satisfies every clause of verify_reconciliation.
Reconciliation build_reconciliation(const GeneTree& g, const RootedTree& s);

struct ReconciliationReport {
    struct Failure {
        std::string clause;  // "M1", "M2.i" ... "B2", "T-time-map", "S-time-map"
        std::string detail;
    };
    std::vector<Failure> failures;

    bool ok() const { return failures.empty(); }
};

// Checks M1, M2.i-iv, M3.i-ii, the time-map axiom on both trees, B1 and B2.
ReconciliationReport verify_reconciliation(const GeneTree& g, const RootedTree& s,
                                           const Reconciliation& r);

}  // namespace gtc
