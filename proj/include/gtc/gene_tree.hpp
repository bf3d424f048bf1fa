#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gtc/tree.hpp"
#include "gtc/triplet.hpp"

namespace gtc {

enum class Event : std::uint8_t { leaf, speciation, duplication, transfer };

char event_code(Event e);  // 'o', 's', 'd', 't'

// Dense ids for the species actually sampled by a gene tree (sorted by name,
// so ids are deterministic).
class SpeciesIndex {
public:
    SpeciesIndex() = default;
    explicit SpeciesIndex(std::vector<std::string> names);

    int count() const { return static_cast<int>(names_.size()); }
    const std::string& name(int id) const { return names_[id]; }
    const std::vector<std::string>& names() const { return names_; }
    int id_of(const std::string& name) const;  // -1 if absent

private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
};

// Event-labeled gene tree (T; t, sigma): a rooted tree over gene labels, an
// event per vertex, the set of transfer edges (recorded on the child end),
// and the gene-to-species map.
class GeneTree {
public:
    GeneTree(RootedTree tree, std::vector<Event> events, std::vector<char> transfer_edge_flags,
             const std::map<std::string, std::string>& sigma);

    const RootedTree& tree() const { return tree_; }
    Event event(VertexId v) const { return events_[v]; }
    bool is_transfer_edge_to(VertexId child) const { return transfer_edge_[child] != 0; }
    const std::vector<std::pair<VertexId, VertexId>>& transfer_edges() const { return transfer_edges_; }

    const SpeciesIndex& species() const { return species_; }
    int leaf_species(VertexId v) const { return leaf_species_[v]; }  // -1 for internal
    const std::string& species_name_of(VertexId leaf) const { return species_.name(leaf_species_[leaf]); }

    int num_leaves() const { return tree_.num_leaves(); }

private:
    RootedTree tree_;
    std::vector<Event> events_;
    std::vector<char> transfer_edge_;  // per vertex: edge (parent(v), v) is a transfer
    std::vector<std::pair<VertexId, VertexId>> transfer_edges_;
    SpeciesIndex species_;
    std::vector<int> leaf_species_;
};

struct AxiomViolation {
    std::string axiom;  // "O1", "O2", "O3a", "O3b"
    VertexId vertex = kNoVertex;
    VertexId other = kNoVertex;  // the child for edge violations
    std::string detail;
};

struct AxiomReport {
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

// The gene tree with transfer edges removed: connected components, their
// roots, and per-vertex leaf/species sets within the component.
struct TransferForest {
    std::vector<int> component;                       // per vertex
    std::vector<VertexId> comp_root;                  // per component
    std::vector<std::vector<VertexId>> leaves_below;  // per vertex, within its component
    std::vector<std::vector<int>> species_below;      // per vertex, sorted unique species ids
    std::vector<int> depth_in_comp;                   // distance from the component root

    int num_components() const { return static_cast<int>(comp_root.size()); }
};

// Checks observability axioms O1, O2, O3a, O3b and reports every violation.
AxiomReport validate_axioms(const GeneTree& g);

TransferForest transfer_forest(const GeneTree& g);

// Species-id triplet {a, b | c} in canonical form (a < b).
using IdTriplet = std::array<int, 3>;

// The species triplets forced by the event labeling: within-component
// triples whose lowest common ancestor is a speciation, plus the pairs
// separated by each transfer edge (both orientations). O(n^3); the id form
// is the workhorse (|R| reaches millions at solver scale), the labeled form
// wraps it for reports and tests.
std::vector<IdTriplet> informative_triplet_ids(const GeneTree& g, const TransferForest& forest);
TripletSet informative_triplets(const GeneTree& g);
TripletSet informative_triplets(const GeneTree& g, const TransferForest& forest);

}  // namespace gtc
