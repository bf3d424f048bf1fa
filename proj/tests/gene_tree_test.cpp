#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "gtc/gene_tree.hpp"
#include "gtc/newick.hpp"
#include "gtc/oracle.hpp"
#include "naive_oracles.hpp"

using namespace gtc;

TEST_CASE("structural invariants of the gene tree") {
    // Transfer flag on a child of a non-transfer vertex is rejected outright.
    TreeBuilder tb;
    VertexId root = tb.add_root();
    tb.add_leaf(root, "a");
    tb.add_leaf(root, "b");
    CHECK_THROWS_AS(GeneTree(std::move(tb).build(),
                             {Event::speciation, Event::leaf, Event::leaf}, {0, 0, 1},
                             {{"a", "A"}, {"b", "B"}}),
                    input_error);
}

TEST_CASE("axiom validation") {
    SUBCASE("a minimal transfer instance is valid") {
        fixtures::GeneTreeBuilder b;
        VertexId root = b.add_root(Event::transfer);
        b.add_leaf(root, "a", "A");
        b.add_leaf(root, "b", "B", /*transfer_edge=*/true);
        CHECK(validate_axioms(b.build()).ok());
    }
    SUBCASE("speciation children must separate species") {
        fixtures::GeneTreeBuilder b;
        VertexId root = b.add_root(Event::speciation);
        b.add_leaf(root, "a1", "A");
        b.add_leaf(root, "a2", "A");
        AxiomReport r = validate_axioms(b.build());
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().axiom == "O3a");
    }
    SUBCASE("a transfer vertex needs a resident copy") {
        fixtures::GeneTreeBuilder b;
        VertexId root = b.add_root(Event::transfer);
        b.add_leaf(root, "a", "A", true);
        b.add_leaf(root, "b", "B", true);
        AxiomReport r = validate_axioms(b.build());
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().axiom == "O2");
    }
    SUBCASE("unary vertices violate O1 and all violations are reported") {
        fixtures::GeneTreeBuilder b;
        VertexId root = b.add_root(Event::speciation);
        VertexId mid = b.add_internal(root, Event::speciation);
        b.add_leaf(mid, "a1", "A");
        b.add_leaf(root, "a2", "A");
        AxiomReport r = validate_axioms(b.build());
        std::set<std::string> axioms;
        for (const auto& v : r.violations) axioms.insert(v.axiom);
        CHECK(axioms == std::set<std::string>{"O1", "O3a"});
    }
}

TEST_CASE("transfer forest") {
    SUBCASE("no transfers, one component") {
        GeneTree g = fixtures::random_speciation_tree(5, 77);
        TransferForest f = transfer_forest(g);
        CHECK(f.num_components() == 1);
        CHECK(f.species_below[g.tree().root()].size() == 5);
    }
    SUBCASE("one transfer edge, two components") {
        GeneTree g = fixtures::single_transfer_instance(2, 2);
        TransferForest f = transfer_forest(g);
        CHECK(f.num_components() == 2);
        CHECK(f.comp_root.front() == g.tree().root());
        CHECK(f.comp_root.back() == g.transfer_edges().front().second);
    }
    SUBCASE("component leaf sets partition the leaves") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            GeneTree g = generate_instance({5, 8, 0.4, 0.4, 0.2, seed});
            TransferForest f = transfer_forest(g);
            CHECK(f.num_components() == 1 + static_cast<int>(g.transfer_edges().size()));
            std::set<VertexId> seen;
            size_t total = 0;
            for (VertexId root : f.comp_root) {
                total += f.leaves_below[root].size();
                seen.insert(f.leaves_below[root].begin(), f.leaves_below[root].end());
            }
            CHECK(total == seen.size());
            CHECK(static_cast<int>(total) == g.num_leaves());
            // Species sets are never empty.
            for (VertexId v = 0; v < g.tree().size(); ++v)
                CHECK_FALSE(f.species_below[v].empty());
        }
    }
    SUBCASE("speciation vertices separate at least two species") {
        for (std::uint64_t seed = 20; seed <= 30; ++seed) {
            GeneTree g = generate_instance({6, 8, 0.3, 0.3, 0.3, seed});
            TransferForest f = transfer_forest(g);
            for (VertexId v = 0; v < g.tree().size(); ++v)
                if (g.event(v) == Event::speciation) CHECK(f.species_below[v].size() >= 2);
        }
    }
}

TEST_CASE("informative triplets") {
    SUBCASE("all-duplication trees force nothing") {
        fixtures::GeneTreeBuilder b;
        VertexId root = b.add_root(Event::duplication);
        VertexId l = b.add_internal(root, Event::duplication);
        b.add_leaf(l, "g0", "A");
        b.add_leaf(l, "g1", "B");
        b.add_leaf(root, "g2", "C");
        CHECK(informative_triplets(b.build()).empty());
    }
    SUBCASE("single transfer contributes C(p,2)q + C(q,2)p") {
        for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {4, 3}, {1, 5}}) {
            GeneTree g = fixtures::single_transfer_instance(p, q);
            size_t expect = static_cast<size_t>(p * (p - 1) / 2) * q +
                            static_cast<size_t>(q * (q - 1) / 2) * p;
            CHECK(informative_triplets(g).size() == expect);
        }
    }
    SUBCASE("all-speciation binary trees force every triple") {
        GeneTree g = fixtures::random_speciation_tree(5, 99);
        CHECK(informative_triplets(g).size() == 10);  // C(5,3)
    }
    SUBCASE("matches the definition on random instances") {
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            GeneTree g = generate_instance({4 + static_cast<int>(seed % 3), 10, 0.4, 0.5, 0.3, seed});
            if (g.num_leaves() > 10) continue;
            CHECK(informative_triplets(g) == naive::informative_triplets(g));
        }
    }
    SUBCASE("the worked example forces exactly its two triplets") {
        TripletSet r = informative_triplets(fixtures::worked_example());
        CHECK(r.size() == 2);
        CHECK(r.contains(Triplet::make("A", "B", "D")));
        CHECK(r.contains(Triplet::make("A", "C", "D")));
    }
}
