#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

#include "gtc/tree.hpp"

namespace gtc {

// Rooted triplet ab|c over leaf labels: a and b are closer to each other than
// either is to c. Canonical form keeps first <= second.
struct Triplet {
    std::string first, second, out;

    static Triplet make(std::string a, std::string b, std::string c);

    auto operator<=>(const Triplet&) const = default;

    std::string str() const { return first + second + "|" + out; }
};

class TripletSet {
public:
    TripletSet() = default;

    bool insert(Triplet t) { return set_.insert(std::move(t)).second; }
    bool contains(const Triplet& t) const { return set_.count(t) > 0; }
    size_t size() const { return set_.size(); }
    bool empty() const { return set_.empty(); }

    auto begin() const { return set_.begin(); }
    auto end() const { return set_.end(); }

    bool operator==(const TripletSet&) const = default;

private:
    std::set<Triplet> set_;
};

// All triplets displayed by the tree; O(n^3) over leaves after LCA
// preprocessing. Throws on duplicate leaf labels (TreeBuilder already rejects
// them, so this only matters for hand-built trees).
TripletSet displayed_triplets(const RootedTree& tree);

// Does the tree display ab|c? All three labels must be leaves.
bool displays(const RootedTree& tree, const LcaIndex& idx, const Triplet& t);

// Same check on leaf vertices, constant time.
bool displays_leaves(const LcaIndex& idx, VertexId a, VertexId b, VertexId c);

// True iff for every ab|c in R, neither ac|b nor bc|a is displayed.
bool agrees(const RootedTree& tree, const TripletSet& r);

}  // namespace gtc
