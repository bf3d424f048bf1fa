#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gtc/aux_graph.hpp"
#include "gtc/newick.hpp"
#include "gtc/oracle.hpp"
#include "naive_oracles.hpp"

using namespace gtc;

namespace {

GeneTree minimal_transfer() {
    fixtures::GeneTreeBuilder b;
    VertexId root = b.add_root(Event::transfer);
    b.add_leaf(root, "a", "A");
    b.add_leaf(root, "b", "B", /*transfer_edge=*/true);
    return b.build();
}

std::multiset<std::tuple<int, int, int>> edge_set(const AuxGraph& a) {
    std::multiset<std::tuple<int, int, int>> out;
    for (const auto& e : a.edges) out.insert({e.from, e.to, static_cast<int>(e.rule)});
    return out;
}

}  // namespace

TEST_CASE("lca map") {
    GeneTree g = minimal_transfer();
    RootedTree s = parse_species_tree("(A,B);");
    LcaMap mu = lca_map(g, s);
    const RootedTree& t = g.tree();
    for (VertexId v = 0; v < t.size(); ++v) {
        if (!t.is_leaf(v)) continue;
        CHECK(mu[v] == s.leaf_by_label(g.species_name_of(v)));
    }
    // The transfer root keeps only its resident side: species A.
    CHECK(mu[t.root()] == s.leaf_by_label("A"));

    CHECK_THROWS_AS(lca_map(g, parse_species_tree("(A,X);")), input_error);
}

TEST_CASE("lca map on a star sends multi-species vertices to the root") {
    GeneTree g = fixtures::random_speciation_tree(5, 3);
    TreeBuilder b;
    VertexId root = b.add_root();
    for (const auto& n : g.species().names()) b.add_leaf(root, n);
    RootedTree s = std::move(b).build();
    LcaMap mu = lca_map(g, s);
    for (VertexId v = 0; v < g.tree().size(); ++v)
        if (g.tree().is_internal(v)) CHECK(mu[v] == s.root());
}

TEST_CASE("lca map agrees with folding the species set naively") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        GeneTree g = generate_instance({5, 8, 0.4, 0.4, 0.2, seed});
        std::optional<RootedTree> s = brute_force_solve(g, 6);
        if (!s) continue;
        TransferForest f = transfer_forest(g);
        LcaMap mu = lca_map(g, *s);
        for (VertexId v = 0; v < g.tree().size(); ++v) {
            std::vector<VertexId> leaves;
            for (int sp : f.species_below[v])
                leaves.push_back(s->leaf_by_label(g.species().name(sp)));
            CHECK(mu[v] == naive::lca_set(*s, leaves));
        }
    }
}

TEST_CASE("the timing graph of the minimal transfer instance") {
    GeneTree g = minimal_transfer();
    RootedTree s = parse_species_tree("(A,B);");
    AuxGraph a = build_aux_graph(g, s, lca_map(g, s));

    const RootedTree& t = g.tree();
    int tau = a.gene_node(t.root());
    int rho = a.species_node(s.root());
    int A = a.species_node(s.leaf_by_label("A"));
    int B = a.species_node(s.leaf_by_label("B"));

    std::multiset<std::tuple<int, int, int>> expect{
        {tau, A, static_cast<int>(EdgeRule::a1)},  // plain child a
        {tau, B, static_cast<int>(EdgeRule::a1)},  // transfer child b
        {rho, A, static_cast<int>(EdgeRule::a2)},
        {rho, B, static_cast<int>(EdgeRule::a2)},
        {tau, A, static_cast<int>(EdgeRule::a3)},
        {rho, tau, static_cast<int>(EdgeRule::a4)},
    };
    CHECK(edge_set(a) == expect);
    CHECK_FALSE(has_cycle_dfs(a));
    CHECK(maximal_topological_sort(a).complete(a.num_nodes()));
}

TEST_CASE("edge count stays within the per-rule bounds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneTree g = generate_instance({5, 10, 0.4, 0.5, 0.3, seed});
        std::optional<RootedTree> s = brute_force_solve(g, 6);
        if (!s) continue;
        AuxGraph a = build_aux_graph(g, *s, lca_map(g, *s));
        size_t et = g.tree().size() - 1, es = s->size() - 1;
        CHECK(a.edges.size() <= et + es + g.tree().size() + g.transfer_edges().size());
    }
}

TEST_CASE("species-to-species edges always point downward on consistent pairs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GeneTree g = generate_instance({5, 8, 0.3, 0.4, 0.2, seed});
        std::optional<RootedTree> s = brute_force_solve(g, 6);
        if (!s) continue;
        AuxGraph a = build_aux_graph(g, *s, lca_map(g, *s));
        LcaIndex idx(*s);
        for (const auto& e : a.edges) {
            if (!a.is_species_node(e.from) || !a.is_species_node(e.to)) continue;
            CHECK((e.rule == EdgeRule::a1 || e.rule == EdgeRule::a2));
            CHECK(e.from != e.to);  // no self-loops when a reconciliation exists
            CHECK(idx.is_ancestor(a.species_of(e.from), a.species_of(e.to)));
        }
    }
}

TEST_CASE("maximal topological sort") {
    SUBCASE("covers a DAG completely") {
        TopoSort q = maximal_topological_sort(4, {{0, 1}, {1, 2}, {0, 3}});
        CHECK(q.member_count() == 4);
        CHECK(q.complete(4));
    }
    SUBCASE("a two-cycle pins everything in it") {
        TopoSort q = maximal_topological_sort(2, {{0, 1}, {1, 0}});
        CHECK(q.member_count() == 0);
    }
    SUBCASE("everything downstream of a cycle stays out") {
        // 0 <-> 1, 1 -> 2 -> 3, plus free vertex 4
        TopoSort q = maximal_topological_sort(5, {{0, 1}, {1, 0}, {1, 2}, {2, 3}});
        CHECK(q.member_count() == 1);
        CHECK(q.contains(4));
        CHECK_FALSE(q.contains(2));
        CHECK_FALSE(q.contains(3));
    }
    SUBCASE("self-loops pin their vertex") {
        TopoSort q = maximal_topological_sort(2, {{0, 0}});
        CHECK(q.member_count() == 1);
        CHECK(q.contains(1));
    }
}

TEST_CASE("member set is independent of tie-breaking and matches the naive peeling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 8;
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < 14; ++i)
            edges.push_back({static_cast<int>(rng() % n), static_cast<int>(rng() % n)});

        TopoSort base = maximal_topological_sort(n, edges);
        std::set<int> base_set(base.sequence.begin(), base.sequence.end());
        CHECK(base_set == naive::member_set(n, edges));

        std::vector<int> rank(n);
        for (int i = 0; i < n; ++i) rank[i] = i;
        for (int perm = 0; perm < 5; ++perm) {
            std::shuffle(rank.begin(), rank.end(), rng);
            TopoSort shuffled = maximal_topological_sort(n, edges, &rank);
            CHECK(std::set<int>(shuffled.sequence.begin(), shuffled.sequence.end()) == base_set);
        }
    }
}

TEST_CASE("split refinements only touch in-neighborhoods below the cherry") {
    int exercised = 0;
    for (std::uint64_t seed = 60; seed <= 110; ++seed) {
        GeneTree g = generate_instance({6, 8, 0.4, 0.5, 0.2, seed});
        if (g.species().count() < 5) continue;  // need vertices outside the split cone
        // Two cherries under a binary root; split the three-leaf one.
        const auto& names = g.species().names();
        TreeBuilder b;
        VertexId root = b.add_root();
        VertexId h1 = b.add_internal(root);
        VertexId h2 = b.add_internal(root);
        for (size_t i = 0; i < names.size(); ++i) b.add_leaf(i < 3 ? h1 : h2, names[i]);
        RootedTree s = std::move(b).build();
        VertexId x = h1;
        std::vector<VertexId> part_a(s.children(x).begin(), s.children(x).begin() + 2);
        std::vector<VertexId> part_b(s.children(x).begin() + 2, s.children(x).end());
        SplitResult split = split_refinement(s, x, part_a, part_b);
        ++exercised;

        AuxGraph before = build_aux_graph(g, s, lca_map(g, s));
        AuxGraph after = build_aux_graph(g, split.tree, lca_map(g, split.tree));
        LcaIndex idx(s);
        auto in_neighbors = [](const AuxGraph& a, int node) {
            std::multiset<std::pair<int, int>> in;
            for (const auto& e : a.edges)
                if (e.to == node) in.insert({e.from, static_cast<int>(e.rule)});
            return in;
        };
        for (VertexId y = 0; y < s.size(); ++y) {
            if (idx.is_ancestor(x, y)) continue;  // y below (or equal to) the split cherry
            CHECK(in_neighbors(before, before.species_node(y)) ==
                  in_neighbors(after, after.species_node(y)));
        }
    }
    CHECK(exercised > 10);
}

TEST_CASE("check_pair") {
    SUBCASE("a speciation-only tree is consistent with its own species image") {
        GeneTree g = fixtures::random_speciation_tree(6, 5);
        // Rebuild the same topology over species names.
        std::string newick = emit_gene_newick(g);
        // crude but effective: species tree = gene tree with gene names dropped
        GeneTree reparsed = parse_gene_tree(newick);
        TreeBuilder b;
        auto copy = [&](auto&& self, VertexId v, VertexId parent) -> void {
            const RootedTree& t = reparsed.tree();
            if (t.is_leaf(v)) {
                b.add_leaf(parent, reparsed.species_name_of(v));
                return;
            }
            VertexId nv = parent == kNoVertex ? b.add_root() : b.add_internal(parent);
            for (VertexId c : t.children(v)) self(self, c, nv);
        };
        copy(copy, reparsed.tree().root(), kNoVertex);
        RootedTree s = std::move(b).build();
        CHECK(check_pair(g, s).consistent());
    }
    SUBCASE("missing triplets are reported") {
        GeneTree g = fixtures::worked_example();
        RootedTree s = parse_species_tree("((A,B),(C,D));");
        PairVerdict v = check_pair(g, s);
        CHECK(v.kind == PairVerdict::Kind::missing_triplets);
        CHECK(v.missing.contains(Triplet::make("A", "C", "D")));
    }
    SUBCASE("cycles come with a concrete certificate") {
        GeneTree g = fixtures::worked_example();
        for (const char* bad : {"(((A,C),B),D);", "(((B,C),A),D);"}) {
            PairVerdict v = check_pair(g, parse_species_tree(bad));
            REQUIRE(v.kind == PairVerdict::Kind::cyclic);
            CHECK(v.cycle_nodes.size() >= 2);
            CHECK(v.cycle.size() == v.cycle_nodes.size());
        }
        CHECK(check_pair(g, parse_species_tree("(((A,B),C),D);")).consistent());
    }
    SUBCASE("certificate cycles follow real edges") {
        GeneTree g = fixtures::worked_example();
        RootedTree s = parse_species_tree("(((A,C),B),D);");
        PairVerdict v = check_pair(g, s);
        REQUIRE(v.kind == PairVerdict::Kind::cyclic);
        AuxGraph a = build_aux_graph(g, s, lca_map(g, s));
        std::set<std::pair<int, int>> arcs;
        for (const auto& e : a.edges) arcs.insert({e.from, e.to});
        for (size_t i = 0; i < v.cycle_nodes.size(); ++i) {
            int from = v.cycle_nodes[i];
            int to = v.cycle_nodes[(i + 1) % v.cycle_nodes.size()];
            CHECK(arcs.count({from, to}) == 1);
        }
    }
    SUBCASE("leaf set mismatches are input errors") {
        GeneTree g = fixtures::worked_example();
        CHECK_THROWS_AS(check_pair(g, parse_species_tree("((A,B),C);")), input_error);
    }
    SUBCASE("agrees with the brute-force characterization on random instances") {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            GeneTree g = generate_instance({4, 8, 0.4, 0.5, 0.3, seed});
            TripletSet r = informative_triplets(g);
            for (const RootedTree& s : all_binary_species_trees(g.species().names(), 5)) {
                LcaIndex idx(s);
                bool displays_all = true;
                for (const Triplet& t : r)
                    if (!displays(s, idx, t)) {
                        displays_all = false;
                        break;
                    }
                bool cyclic = has_cycle_dfs(build_aux_graph(g, s, lca_map(g, s, idx), idx));
                CHECK(check_pair(g, s).consistent() == (displays_all && !cyclic));
            }
        }
    }
}
