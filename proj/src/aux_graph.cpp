#include "gtc/aux_graph.hpp"

#include <algorithm>
#include <cassert>
#include <queue>

namespace gtc {

const char* edge_rule_name(EdgeRule r) {
    switch (r) {
        case EdgeRule::a1: return "A1";
        case EdgeRule::a2: return "A2";
        case EdgeRule::a3: return "A3";
        case EdgeRule::a4: return "A4";
    }
    return "?";
}

LcaMap lca_map(const GeneTree& g, const RootedTree& s, const LcaIndex& s_idx) {
    const RootedTree& t = g.tree();
    std::vector<VertexId> leaf_of_species(g.species().count());
    for (int id = 0; id < g.species().count(); ++id) {
        leaf_of_species[id] = s.leaf_by_label(g.species().name(id));
        if (leaf_of_species[id] == kNoVertex)
            throw input_error("species missing from the species tree: " + g.species().name(id));
    }
    LcaMap mu(t.size(), kNoVertex);
    // Bottom-up per component: mu_hat(v) folds the children that stay in the
    // component, so each vertex costs O(deg) lca queries.
    for (VertexId v : t.postorder()) {
        if (t.is_leaf(v)) {
            mu[v] = leaf_of_species[g.leaf_species(v)];
            continue;
        }
        VertexId acc = kNoVertex;
        for (VertexId c : t.children(v)) {
            if (g.is_transfer_edge_to(c)) continue;
            acc = acc == kNoVertex ? mu[c] : s_idx.lca(acc, mu[c]);
        }
        assert(acc != kNoVertex);  // species_below is never empty
        mu[v] = acc;
    }
    return mu;
}

LcaMap lca_map(const GeneTree& g, const RootedTree& s) {
    LcaIndex idx(s);
    return lca_map(g, s, idx);
}

AuxGraph build_aux_graph(const GeneTree& g, const RootedTree& s, const LcaMap& mu,
                         const LcaIndex& s_idx) {
    const RootedTree& t = g.tree();
    AuxGraph a;
    a.num_gene = t.size();
    a.num_species = s.size();

    auto substituted = [&](VertexId v) {
        Event e = g.event(v);
        if (e == Event::leaf || e == Event::speciation) return a.species_node(mu[v]);
        return a.gene_node(v);
    };

    for (VertexId v = 0; v < t.size(); ++v) {
        if (!t.is_root(v)) a.edges.push_back({substituted(t.parent(v)), substituted(v), EdgeRule::a1});
        if (g.event(v) == Event::duplication || g.event(v) == Event::transfer)
            a.edges.push_back({a.gene_node(v), a.species_node(mu[v]), EdgeRule::a3});
    }
    for (VertexId x = 0; x < s.size(); ++x)
        if (!s.is_root(x)) a.edges.push_back({a.species_node(s.parent(x)), a.species_node(x), EdgeRule::a2});
    for (auto [u, v] : g.transfer_edges())
        a.edges.push_back({a.species_node(s_idx.lca(mu[u], mu[v])), a.gene_node(u), EdgeRule::a4});
    return a;
}

AuxGraph build_aux_graph(const GeneTree& g, const RootedTree& s, const LcaMap& mu) {
    LcaIndex idx(s);
    return build_aux_graph(g, s, mu, idx);
}

bool AuxGraph::has_self_loop_at_species_leaf(const RootedTree& s) const {
    for (const Edge& e : edges)
        if (e.from == e.to && is_species_node(e.from) && s.is_leaf(species_of(e.from))) return true;
    return false;
}

TopoSort maximal_topological_sort(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                                  const std::vector<int>* tie_rank) {
    std::vector<int> in_degree(num_nodes, 0);
    std::vector<std::vector<int>> out(num_nodes);
    for (auto [from, to] : edges) {
        if (from == to) {
            // A self-loop pins its vertex forever; count it as in-degree.
            ++in_degree[to];
            continue;
        }
        out[from].push_back(to);
        ++in_degree[to];
    }

    auto rank = [&](int node) { return tie_rank ? (*tie_rank)[node] : node; };
    using Entry = std::pair<int, int>;  // (rank, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
    for (int v = 0; v < num_nodes; ++v)
        if (in_degree[v] == 0) ready.push({rank(v), v});

    TopoSort q;
    q.in_set.assign(num_nodes, 0);
    while (!ready.empty()) {
        int v = ready.top().second;
        ready.pop();
        q.sequence.push_back(v);
        q.in_set[v] = 1;
        for (int w : out[v])
            if (--in_degree[w] == 0) ready.push({rank(w), w});
    }
    return q;
}

TopoSort maximal_topological_sort(const AuxGraph& graph, const std::vector<int>* tie_rank) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(graph.edges.size());
    for (const auto& e : graph.edges) edges.emplace_back(e.from, e.to);
    return maximal_topological_sort(graph.num_nodes(), edges, tie_rank);
}

std::string aux_node_name(const AuxGraph& graph, const GeneTree& g, const RootedTree& s, int node) {
    if (!graph.is_species_node(node)) {
        VertexId v = node;
        std::string name = "gene:";
        name += g.tree().is_leaf(v) ? g.tree().label(v) : "#" + std::to_string(v);
        name += '[';
        name += event_code(g.event(v));
        name += ']';
        return name;
    }
    VertexId x = graph.species_of(node);
    if (s.is_leaf(x)) return "species:" + s.label(x);
    // Internal species vertices have no labels; name them by their clade.
    std::vector<std::string> below;
    std::vector<VertexId> stack{x};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        if (s.is_leaf(v)) below.push_back(s.label(v));
        for (VertexId c : s.children(v)) stack.push_back(c);
    }
    std::sort(below.begin(), below.end());
    std::string name = "species:{";
    for (size_t i = 0; i < below.size(); ++i) {
        if (i) name += ',';
        name += below[i];
    }
    return name + "}";
}

namespace {

// Any vertex left out of the maximal topological sort has an in-neighbor that
// is also left out; walking in-neighbors inside the residual must revisit a
// node, which closes a cycle.
std::vector<int> extract_cycle(const AuxGraph& graph, const TopoSort& q) {
    int n = graph.num_nodes();
    std::vector<std::vector<int>> in(n);
    for (const auto& e : graph.edges)
        if (!q.contains(e.from) && !q.contains(e.to)) in[e.to].push_back(e.from);
    for (auto& v : in) std::sort(v.begin(), v.end());

    int start = -1;
    for (int v = 0; v < n; ++v)
        if (!q.contains(v)) {
            start = v;
            break;
        }
    assert(start >= 0);

    std::vector<int> walk;
    std::vector<int> pos(n, -1);
    int cur = start;
    while (pos[cur] == -1) {
        pos[cur] = static_cast<int>(walk.size());
        walk.push_back(cur);
        assert(!in[cur].empty());
        cur = in[cur].front();
    }
    std::vector<int> cycle(walk.begin() + pos[cur], walk.end());
    std::reverse(cycle.begin(), cycle.end());  // the walk followed edges backwards
    return cycle;
}

}  // namespace

PairVerdict check_pair(const GeneTree& g, const RootedTree& s) {
    {
        std::vector<std::string> gene_species = g.species().names();
        std::vector<std::string> tree_species = s.sorted_leaf_labels();
        if (gene_species != tree_species)
            throw input_error("species tree leaves do not match the sampled species");
    }

    PairVerdict verdict;
    TransferForest forest = transfer_forest(g);
    LcaIndex s_idx(s);
    std::vector<VertexId> leaf_of(g.species().count(), kNoVertex);
    for (int id = 0; id < g.species().count(); ++id)
        leaf_of[id] = s.leaf_by_label(g.species().name(id));
    for (const IdTriplet& t : informative_triplet_ids(g, forest))
        if (!displays_leaves(s_idx, leaf_of[t[0]], leaf_of[t[1]], leaf_of[t[2]]))
            verdict.missing.insert(Triplet::make(g.species().name(t[0]), g.species().name(t[1]),
                                                 g.species().name(t[2])));
    if (!verdict.missing.empty()) {
        verdict.kind = PairVerdict::Kind::missing_triplets;
        return verdict;
    }

    LcaMap mu = lca_map(g, s, s_idx);
    AuxGraph aux = build_aux_graph(g, s, mu, s_idx);
    TopoSort q = maximal_topological_sort(aux);
    if (q.complete(aux.num_nodes())) return verdict;

    verdict.kind = PairVerdict::Kind::cyclic;
    verdict.cycle_nodes = extract_cycle(aux, q);
    for (int node : verdict.cycle_nodes)
        verdict.cycle.push_back(aux_node_name(aux, g, s, node));
    return verdict;
}

}  // namespace gtc
