#include "gtc/gene_tree.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace gtc {

char event_code(Event e) {
    switch (e) {
        case Event::leaf: return 'o';
        case Event::speciation: return 's';
        case Event::duplication: return 'd';
        case Event::transfer: return 't';
    }
    return '?';
}

SpeciesIndex::SpeciesIndex(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    for (int i = 0; i < count(); ++i) index_[names_[i]] = i;
}

int SpeciesIndex::id_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

GeneTree::GeneTree(RootedTree tree, std::vector<Event> events, std::vector<char> transfer_edge_flags,
                   const std::map<std::string, std::string>& sigma)
    : tree_(std::move(tree)), events_(std::move(events)), transfer_edge_(std::move(transfer_edge_flags)) {
    int n = tree_.size();
    if (static_cast<int>(events_.size()) != n || static_cast<int>(transfer_edge_.size()) != n)
        throw input_error("event/transfer annotations do not match the tree size");

    for (VertexId v = 0; v < n; ++v) {
        if (tree_.is_leaf(v) != (events_[v] == Event::leaf))
            throw input_error("leaf event label on vertex " + std::to_string(v) +
                              " does not match its degree");
        if (transfer_edge_[v]) {
            if (tree_.is_root(v)) throw input_error("root cannot be a transfer child");
            if (events_[tree_.parent(v)] != Event::transfer)
                throw input_error("transfer edge from a non-transfer vertex (child " +
                                  std::to_string(v) + ")");
            transfer_edges_.emplace_back(tree_.parent(v), v);
        }
    }

    std::vector<std::string> species_names;
    leaf_species_.assign(n, -1);
    for (VertexId v = 0; v < n; ++v) {
        if (!tree_.is_leaf(v)) continue;
        auto it = sigma.find(tree_.label(v));
        if (it == sigma.end()) throw input_error("gene without a species: " + tree_.label(v));
        species_names.push_back(it->second);
    }
    species_ = SpeciesIndex(std::move(species_names));
    for (VertexId v = 0; v < n; ++v)
        if (tree_.is_leaf(v)) leaf_species_[v] = species_.id_of(sigma.at(tree_.label(v)));
}

TransferForest transfer_forest(const GeneTree& g) {
    const RootedTree& t = g.tree();
    int n = t.size();
    TransferForest f;
    f.component.assign(n, -1);
    f.depth_in_comp.assign(n, 0);
    f.leaves_below.assign(n, {});
    f.species_below.assign(n, {});

    for (VertexId v : t.preorder()) {
        if (t.is_root(v) || g.is_transfer_edge_to(v)) {
            f.component[v] = static_cast<int>(f.comp_root.size());
            f.comp_root.push_back(v);
            f.depth_in_comp[v] = 0;
        } else {
            f.component[v] = f.component[t.parent(v)];
            f.depth_in_comp[v] = f.depth_in_comp[t.parent(v)] + 1;
        }
    }

    for (VertexId v : t.postorder()) {
        if (t.is_leaf(v)) {
            f.leaves_below[v].push_back(v);
            f.species_below[v].push_back(g.leaf_species(v));
            continue;
        }
        for (VertexId c : t.children(v)) {
            if (g.is_transfer_edge_to(c)) continue;
            auto& lb = f.leaves_below[v];
            lb.insert(lb.end(), f.leaves_below[c].begin(), f.leaves_below[c].end());
            auto& sb = f.species_below[v];
            sb.insert(sb.end(), f.species_below[c].begin(), f.species_below[c].end());
        }
        auto& sb = f.species_below[v];
        std::sort(sb.begin(), sb.end());
        sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    }
    return f;
}

namespace {

bool disjoint_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return false;
        if (a[i] < b[j]) ++i; else ++j;
    }
    return true;
}

std::string species_set_str(const GeneTree& g, const std::vector<int>& ids) {
    std::string s = "{";
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ",";
        s += g.species().name(ids[i]);
    }
    return s + "}";
}

}  // namespace

AxiomReport validate_axioms(const GeneTree& g) {
    const RootedTree& t = g.tree();
    TransferForest f = transfer_forest(g);
    AxiomReport report;

    for (VertexId v = 0; v < t.size(); ++v) {
        if (t.is_internal(v) && t.children(v).size() < 2)
            report.violations.push_back(
                {"O1", v, kNoVertex, "internal vertex with out-degree " +
                                         std::to_string(t.children(v).size())});

        if (g.event(v) == Event::transfer) {
            int transfer = 0, plain = 0;
            for (VertexId c : t.children(v)) (g.is_transfer_edge_to(c) ? transfer : plain)++;
            if (transfer == 0 || plain == 0)
                report.violations.push_back(
                    {"O2", v, kNoVertex,
                     "transfer vertex needs both a transfer and a non-transfer out-edge (" +
                         std::to_string(transfer) + " transfer, " + std::to_string(plain) +
                         " plain)"});
        }

        if (g.event(v) == Event::speciation) {
            const auto& ch = t.children(v);
            for (size_t i = 0; i < ch.size(); ++i)
                for (size_t j = i + 1; j < ch.size(); ++j)
                    if (!disjoint_sorted(f.species_below[ch[i]], f.species_below[ch[j]]))
                        report.violations.push_back(
                            {"O3a", v, ch[j],
                             "speciation children with overlapping species sets " +
                                 species_set_str(g, f.species_below[ch[i]]) + " and " +
                                 species_set_str(g, f.species_below[ch[j]])});
        }
    }

    for (auto [x, y] : g.transfer_edges())
        if (!disjoint_sorted(f.species_below[x], f.species_below[y]))
            report.violations.push_back({"O3b", x, y,
                                         "transfer edge with overlapping species sets " +
                                             species_set_str(g, f.species_below[x]) + " and " +
                                             species_set_str(g, f.species_below[y])});

    return report;
}

std::vector<IdTriplet> informative_triplet_ids(const GeneTree& g, const TransferForest& forest) {
    const RootedTree& t = g.tree();
    LcaIndex idx(t);
    std::vector<IdTriplet> out;

    // Within-component triples with a speciation at the top. The root
    // distances of the three pairwise lcas decide the topology: two are always
    // equal and the odd deeper one names the cherry pair.
    for (int comp = 0; comp < forest.num_components(); ++comp) {
        const auto& leaves = forest.leaves_below[forest.comp_root[comp]];
        for (size_t i = 0; i < leaves.size(); ++i) {
            for (size_t j = i + 1; j < leaves.size(); ++j) {
                for (size_t k = j + 1; k < leaves.size(); ++k) {
                    VertexId a = leaves[i], b = leaves[j], c = leaves[k];
                    // Same component, so lcas agree with the full tree.
                    VertexId ab = idx.lca(a, b), ac = idx.lca(a, c), bc = idx.lca(b, c);
                    int dab = forest.depth_in_comp[ab];
                    int dac = forest.depth_in_comp[ac];
                    int dbc = forest.depth_in_comp[bc];
                    VertexId top;
                    VertexId pa, pb, pc;  // pa,pb | pc
                    if (dab == dac && dab == dbc) continue;
                    if (dab > dac) {
                        top = ac; pa = a; pb = b; pc = c;
                    } else if (dac > dab) {
                        top = ab; pa = a; pb = c; pc = b;
                    } else {
                        top = ab; pa = b; pb = c; pc = a;
                    }
                    if (g.event(top) != Event::speciation) continue;
                    int sa = g.leaf_species(pa), sb = g.leaf_species(pb), sc = g.leaf_species(pc);
                    if (sa == sb || sa == sc || sb == sc) continue;
                    if (sa > sb) std::swap(sa, sb);
                    out.push_back({sa, sb, sc});
                }
            }
        }
    }

    // Pairs separated by a transfer edge, both orientations.
    auto add_cross = [&](const std::vector<int>& pair_side, const std::vector<int>& out_side) {
        for (size_t i = 0; i < pair_side.size(); ++i)
            for (size_t j = i + 1; j < pair_side.size(); ++j)
                for (int c : out_side) {
                    if (c == pair_side[i] || c == pair_side[j]) continue;
                    out.push_back({pair_side[i], pair_side[j], c});  // sides are sorted
                }
    };
    for (auto [x, y] : g.transfer_edges()) {
        add_cross(forest.species_below[x], forest.species_below[y]);
        add_cross(forest.species_below[y], forest.species_below[x]);
    }

    // |R| reaches Theta(n^3); three stable counting passes beat a comparison
    // sort by a wide margin here.
    int ns = g.species().count();
    std::vector<IdTriplet> buf(out.size());
    auto counting_pass = [&](int key) {
        std::vector<int> count(ns + 1, 0);
        for (const IdTriplet& t : out) ++count[t[key] + 1];
        for (int i = 1; i <= ns; ++i) count[i] += count[i - 1];
        for (const IdTriplet& t : out) buf[count[t[key]]++] = t;
        out.swap(buf);
    };
    counting_pass(2);
    counting_pass(1);
    counting_pass(0);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

TripletSet informative_triplets(const GeneTree& g) {
    return informative_triplets(g, transfer_forest(g));
}

TripletSet informative_triplets(const GeneTree& g, const TransferForest& forest) {
    TripletSet out;
    for (const IdTriplet& t : informative_triplet_ids(g, forest))
        out.insert(Triplet::make(g.species().name(t[0]), g.species().name(t[1]),
                                 g.species().name(t[2])));
    return out;
}

}  // namespace gtc
