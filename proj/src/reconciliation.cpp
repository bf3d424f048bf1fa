#include "gtc/reconciliation.hpp"

#include <cassert>
#include <stdexcept>

namespace gtc {

bool position_le(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q) {
    if (p.vertex == q.vertex) return p.on_parent_edge <= q.on_parent_edge;
    return q.vertex != p.vertex && s_idx.is_ancestor(q.vertex, p.vertex);
}

bool position_lt(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q) {
    return !(p == q) && position_le(s_idx, p, q);
}

bool positions_comparable(const LcaIndex& s_idx, SpeciesPosition p, SpeciesPosition q) {
    return position_le(s_idx, p, q) || position_le(s_idx, q, p);
}

std::string position_str(const RootedTree& s, SpeciesPosition p) {
    std::string anchor = s.is_leaf(p.vertex) ? s.label(p.vertex) : "#" + std::to_string(p.vertex);
    if (!p.on_parent_edge) return anchor;
    if (s.is_root(p.vertex)) return "edge(plant," + anchor + ")";
    return "edge(#" + std::to_string(s.parent(p.vertex)) + "," + anchor + ")";
}

namespace {

bool is_event_vertex(const GeneTree& g, VertexId v) {
    return g.event(v) == Event::duplication || g.event(v) == Event::transfer;
}

}  // namespace

Reconciliation build_reconciliation(const GeneTree& g, const RootedTree& s) {
    if (!check_pair(g, s).consistent())
        throw input_error("build_reconciliation requires a consistent gene/species pair");

    const RootedTree& t = g.tree();
    LcaIndex s_idx(s);
    LcaMap mu_hat = lca_map(g, s, s_idx);

    // Order-constraint graph whose topological indices become the times.
    // Species edges keep tau_S a time map; every gene-tree edge orders the
    // aliased endpoints (the time-map axiom on T, with leaves/speciations
    // aliased to their image vertex for B1); each duplication/transfer u is
    // dated before its lca image (A3-style) and after every lca it must stay
    // incomparable with: lca(mu_hat(u), mu_hat(w)) for transfer partners and
    // for siblings under a speciation. The bracketing edge of tau(u) on the
    // root path of mu_hat(u) then satisfies B2 and the incomparability
    // clauses at once. Mapping events to the edge directly above their lca
    // image, as one might expect, is not always time-consistent: a transfer
    // chain can force an event both after and before the same speciation.
    int plant = 0;
    auto species_node = [&](VertexId x) { return 1 + static_cast<int>(x); };
    int ns = s.size(), nt = t.size();
    int num_nodes = 1 + ns + nt;
    auto alias = [&](VertexId v) {
        return is_event_vertex(g, v) ? 1 + ns + static_cast<int>(v) : species_node(mu_hat[v]);
    };

    std::vector<std::pair<int, int>> edges;
    edges.emplace_back(plant, species_node(s.root()));
    for (VertexId x = 0; x < s.size(); ++x)
        if (!s.is_root(x)) edges.emplace_back(species_node(s.parent(x)), species_node(x));

    auto add_incomparability_bound = [&](VertexId u, VertexId partner) {
        if (!is_event_vertex(g, u)) return;
        VertexId z = s_idx.lca(mu_hat[u], mu_hat[partner]);
        edges.emplace_back(species_node(z), alias(u));
    };

    for (VertexId v = 0; v < t.size(); ++v) {
        if (is_event_vertex(g, v)) edges.emplace_back(alias(v), species_node(mu_hat[v]));
        if (!t.is_root(v)) {
            int a = alias(t.parent(v)), b = alias(v);
            if (a == b) throw std::logic_error("degenerate time constraint on a consistent pair");
            edges.emplace_back(a, b);
        }
        if (g.event(v) == Event::speciation) {
            const auto& ch = t.children(v);
            for (size_t i = 0; i < ch.size(); ++i)
                for (size_t j = 0; j < ch.size(); ++j)
                    if (i != j) add_incomparability_bound(ch[i], ch[j]);
        }
    }
    for (auto [u, v] : g.transfer_edges()) {
        add_incomparability_bound(u, v);
        add_incomparability_bound(v, u);
    }

    TopoSort order = maximal_topological_sort(num_nodes, edges);
    if (!order.complete(num_nodes))
        throw std::logic_error("time constraints are cyclic on a consistent pair");

    std::vector<std::int64_t> index(num_nodes, 0);
    for (size_t i = 0; i < order.sequence.size(); ++i)
        index[order.sequence[i]] = static_cast<std::int64_t>(i);

    Reconciliation r;
    r.tau_species.resize(ns);
    for (VertexId x = 0; x < s.size(); ++x) r.tau_species[x] = index[species_node(x)];
    r.tau_gene.resize(nt);
    for (VertexId v = 0; v < t.size(); ++v) r.tau_gene[v] = index[alias(v)];

    r.mu.resize(t.size());
    for (VertexId v = 0; v < t.size(); ++v) {
        if (!is_event_vertex(g, v)) {
            r.mu[v] = {mu_hat[v], false};
            continue;
        }
        // Climb from the lca image to the edge whose interval holds tau(v).
        VertexId b = mu_hat[v];
        while (!s.is_root(b) && r.tau_species[s.parent(b)] > r.tau_gene[v]) b = s.parent(b);
        r.mu[v] = {b, true};
    }
    return r;
}

ReconciliationReport verify_reconciliation(const GeneTree& g, const RootedTree& s,
                                           const Reconciliation& r) {
    const RootedTree& t = g.tree();
    ReconciliationReport report;
    auto fail = [&](std::string clause, std::string detail) {
        report.failures.push_back({std::move(clause), std::move(detail)});
    };
    if (static_cast<int>(r.mu.size()) != t.size() ||
        static_cast<int>(r.tau_gene.size()) != t.size() ||
        static_cast<int>(r.tau_species.size()) != s.size()) {
        fail("shape", "reconciliation arrays do not match the trees");
        return report;
    }

    LcaIndex s_idx(s);
    TransferForest forest = transfer_forest(g);

    auto gene_name = [&](VertexId v) {
        return t.is_leaf(v) ? t.label(v) : "#" + std::to_string(v);
    };

    for (VertexId v = 0; v < t.size(); ++v) {
        const SpeciesPosition& p = r.mu[v];
        if (p.vertex < 0 || p.vertex >= s.size()) {
            fail("shape", "gene " + gene_name(v) + " mapped outside the species tree");
            return report;
        }
        switch (g.event(v)) {
            case Event::leaf:
                if (p.on_parent_edge || p.vertex != s.leaf_by_label(g.species_name_of(v)))
                    fail("M1", "leaf " + gene_name(v) + " maps to " + position_str(s, p) +
                                   " instead of its species " + g.species_name_of(v));
                break;
            case Event::speciation: {
                std::vector<VertexId> below;
                for (int sp : forest.species_below[v]) below.push_back(s.leaf_by_label(g.species().name(sp)));
                VertexId want = s_idx.lca(below);
                if (p.on_parent_edge || p.vertex != want)
                    fail("M2.i", "speciation " + gene_name(v) + " maps to " + position_str(s, p) +
                                     " instead of " + position_str(s, {want, false}));
                break;
            }
            case Event::duplication:
            case Event::transfer:
                if (!p.on_parent_edge)
                    fail("M2.ii", "event vertex " + gene_name(v) + " maps to the vertex " +
                                      position_str(s, p) + " rather than an edge");
                break;
        }
    }

    for (auto [x, y] : g.transfer_edges())
        if (positions_comparable(s_idx, r.mu[x], r.mu[y]))
            fail("M2.iii", "transfer edge (" + gene_name(x) + "," + gene_name(y) +
                               ") maps to comparable positions " + position_str(s, r.mu[x]) +
                               " and " + position_str(s, r.mu[y]));

    for (VertexId v = 0; v < t.size(); ++v) {
        if (g.event(v) != Event::speciation) continue;
        const auto& ch = t.children(v);
        for (size_t i = 0; i < ch.size(); ++i)
            for (size_t j = i + 1; j < ch.size(); ++j)
                if (positions_comparable(s_idx, r.mu[ch[i]], r.mu[ch[j]]))
                    fail("M2.iv", "children of speciation " + gene_name(v) +
                                      " map to comparable positions " +
                                      position_str(s, r.mu[ch[i]]) + " and " +
                                      position_str(s, r.mu[ch[j]]));
    }

    // M3 ranges over ancestor pairs inside a component (paths without
    // transfer edges).
    for (VertexId x = 0; x < t.size(); ++x) {
        for (VertexId y = t.parent(x); y != kNoVertex && forest.component[y] == forest.component[x];
             y = t.parent(y)) {
            bool both_events = is_event_vertex(g, x) && is_event_vertex(g, y);
            if (both_events) {
                if (!position_le(s_idx, r.mu[x], r.mu[y]))
                    fail("M3.i", gene_name(x) + " below " + gene_name(y) + " but " +
                                     position_str(s, r.mu[x]) + " is not weakly below " +
                                     position_str(s, r.mu[y]));
            } else if (!position_lt(s_idx, r.mu[x], r.mu[y])) {
                fail("M3.ii", gene_name(x) + " below " + gene_name(y) + " but " +
                                  position_str(s, r.mu[x]) + " is not strictly below " +
                                  position_str(s, r.mu[y]));
            }
        }
    }

    for (VertexId x = 0; x < s.size(); ++x)
        if (!s.is_root(x) && r.tau_species[x] <= r.tau_species[s.parent(x)])
            fail("S-time-map", "species vertex " + position_str(s, {x, false}) +
                                   " is not dated after its parent");
    for (VertexId v = 0; v < t.size(); ++v)
        if (!t.is_root(v) && r.tau_gene[v] <= r.tau_gene[t.parent(v)])
            fail("T-time-map", "gene vertex " + gene_name(v) + " is not dated after its parent");

    for (VertexId v = 0; v < t.size(); ++v) {
        const SpeciesPosition& p = r.mu[v];
        if (g.event(v) == Event::leaf || g.event(v) == Event::speciation) {
            if (r.tau_gene[v] != r.tau_species[p.vertex])
                fail("B1", "gene " + gene_name(v) + " dated " + std::to_string(r.tau_gene[v]) +
                               " but its image is dated " + std::to_string(r.tau_species[p.vertex]));
        } else {
            if (r.tau_gene[v] >= r.tau_species[p.vertex])
                fail("B2", "event " + gene_name(v) + " is not dated before " +
                               position_str(s, {p.vertex, false}));
            if (!s.is_root(p.vertex) && r.tau_gene[v] <= r.tau_species[s.parent(p.vertex)])
                fail("B2", "event " + gene_name(v) + " is not dated after " +
                               position_str(s, {s.parent(p.vertex), false}));
        }
    }

    return report;
}

}  // namespace gtc
