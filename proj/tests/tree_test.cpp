#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "gtc/newick.hpp"
#include "gtc/tree.hpp"
#include "gtc/triplet.hpp"
#include "naive_oracles.hpp"

using namespace gtc;

namespace {

RootedTree star(const std::vector<std::string>& labels) {
    TreeBuilder b;
    VertexId root = b.add_root();
    for (const auto& l : labels) b.add_leaf(root, l);
    return std::move(b).build();
}

int count_binary_vertices(const RootedTree& t) {
    int n = 0;
    for (VertexId v = 0; v < t.size(); ++v)
        if (t.is_internal(v) && t.children(v).size() == 2) ++n;
    return n;
}

}  // namespace

TEST_CASE("lca basics") {
    RootedTree t = parse_species_tree("((A,B),C);");
    LcaIndex idx(t);
    VertexId a = t.leaf_by_label("A"), b = t.leaf_by_label("B"), c = t.leaf_by_label("C");
    CHECK(lca(t, {a}) == a);
    CHECK(lca(t, {a, t.root()}) == t.root());
    CHECK(idx.lca(a, b) != t.root());
    CHECK(idx.lca(a, c) == t.root());
    CHECK_THROWS_AS(lca(t, {}), input_error);
    CHECK_THROWS_AS(lca(t, {99}), input_error);
}

TEST_CASE("lca matches the path-marking oracle on random trees") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        RootedTree t = fixtures::random_tree(50, seed);
        LcaIndex idx(t);
        auto leaves = t.leaves();
        for (size_t i = 0; i < leaves.size(); ++i)
            for (size_t j = i; j < leaves.size(); ++j)
                CHECK(idx.lca(leaves[i], leaves[j]) == naive::lca(t, leaves[i], leaves[j]));
    }
}

TEST_CASE("lca equals ancestor-set intersection on all small trees") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RootedTree t = fixtures::random_tree(1 + static_cast<int>(seed % 12), 100 + seed);
        LcaIndex idx(t);
        for (VertexId a = 0; a < t.size(); ++a)
            for (VertexId b = 0; b < t.size(); ++b) CHECK(idx.lca(a, b) == naive::lca(t, a, b));
    }
}

TEST_CASE("restriction") {
    RootedTree t = parse_species_tree("((a,b),c);");
    SUBCASE("to all leaves is the identity up to ids") {
        RootedTree r = restrict_to(t, {"a", "b", "c"});
        CHECK(emit_newick(r) == emit_newick(t));
    }
    SUBCASE("suppresses unary vertices") {
        RootedTree r = restrict_to(t, {"a", "c"});
        CHECK(emit_newick(r) == "(a,c);");
    }
    SUBCASE("rejects bad input") {
        CHECK_THROWS_AS(restrict_to(t, {}), input_error);
        CHECK_THROWS_AS(restrict_to(t, {"nope"}), input_error);
    }
}

TEST_CASE("restriction keeps exactly the triplets over the kept leaves") {
    for (std::uint64_t seed : {5u, 6u, 7u, 8u}) {
        RootedTree t = fixtures::random_tree(9, seed);
        auto labels = t.sorted_leaf_labels();
        std::vector<std::string> kept;
        for (size_t i = 0; i < labels.size(); ++i)
            if (i % 2 == 0) kept.push_back(labels[i]);
        RootedTree r = restrict_to(t, kept);

        TripletSet expect;
        std::set<std::string> kept_set(kept.begin(), kept.end());
        for (const Triplet& tr : displayed_triplets(t))
            if (kept_set.count(tr.first) && kept_set.count(tr.second) && kept_set.count(tr.out))
                expect.insert(tr);
        CHECK(displayed_triplets(r) == expect);
    }
}

TEST_CASE("displayed triplets") {
    CHECK(displayed_triplets(star({"A", "B", "C", "D"})).empty());

    RootedTree t = parse_species_tree("((A,B),C);");
    TripletSet r = displayed_triplets(t);
    CHECK(r.size() == 1);
    CHECK(r.contains(Triplet::make("A", "B", "C")));

    RootedTree caterpillar = parse_species_tree("(((A,B),C),D);");
    CHECK(displayed_triplets(caterpillar).size() == 4);  // C(4,3)
}

TEST_CASE("binary trees display all C(n,3) triplets") {
    for (int n = 4; n <= 8; ++n) {
        GeneTree g = fixtures::random_speciation_tree(n, 40 + n);
        size_t expect = static_cast<size_t>(n) * (n - 1) * (n - 2) / 6;
        CHECK(displayed_triplets(g.tree()).size() == expect);
    }
}

TEST_CASE("displayed triplets match the naive oracle") {
    for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u}) {
        RootedTree t = fixtures::random_tree(8, seed);
        CHECK(displayed_triplets(t) == naive::displayed_triplets(t));
    }
}

TEST_CASE("agreement") {
    RootedTree s = star({"A", "B", "C"});
    TripletSet incompatible;
    incompatible.insert(Triplet::make("A", "B", "C"));
    incompatible.insert(Triplet::make("B", "C", "A"));
    CHECK(agrees(s, incompatible));  // the star displays nothing

    RootedTree t = parse_species_tree("((A,C),B);");
    TripletSet r;
    r.insert(Triplet::make("A", "B", "C"));
    CHECK_FALSE(agrees(t, r));
}

TEST_CASE("displaying a set implies agreeing with it") {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        RootedTree t = fixtures::random_tree(8, seed);
        TripletSet all = displayed_triplets(t);
        TripletSet some;
        size_t i = 0;
        for (const Triplet& tr : all)
            if (i++ % 3 == 0) some.insert(tr);
        CHECK(agrees(t, some));
    }
}

TEST_CASE("extensions") {
    RootedTree s = star({"A", "B", "C", "D"});
    VertexId root = s.root();
    auto child = [&](const std::string& l) { return s.leaf_by_label(l); };

    SUBCASE("singleton group leaves the tree unchanged") {
        Refinement r = apply_extension(s, root, {child("A")});
        CHECK(r.new_vertex == kNoVertex);
        CHECK(emit_newick(r.tree) == emit_newick(s));
    }
    SUBCASE("grouping two children adds one vertex") {
        Refinement r = apply_extension(s, root, {child("A"), child("B")});
        REQUIRE(r.new_vertex != kNoVertex);
        CHECK(emit_newick(r.tree) == "((A,B),C,D);");
        CHECK(r.tree.size() == s.size() + 1);
        // Leaf set is preserved.
        CHECK(r.tree.sorted_leaf_labels() == s.sorted_leaf_labels());
    }
    SUBCASE("rejects the full set and non-children") {
        CHECK_THROWS_AS(apply_extension(s, root, {child("A"), child("B"), child("C"), child("D")}),
                        input_error);
        CHECK_THROWS_AS(apply_extension(s, root, {root}), input_error);
    }
}

namespace {

// Rebuilds `t` with the edge into `victim` contracted (children lifted).
RootedTree contract_vertex(const RootedTree& t, VertexId victim) {
    TreeBuilder b;
    auto copy = [&](auto&& self, VertexId v, VertexId parent) -> VertexId {
        if (t.is_leaf(v))
            return parent == kNoVertex ? b.add_root_leaf(t.label(v)) : b.add_leaf(parent, t.label(v));
        VertexId nv = parent == kNoVertex ? b.add_root() : b.add_internal(parent);
        for (VertexId c : t.children(v)) {
            if (c == victim) {
                for (VertexId gc : t.children(victim)) self(self, gc, nv);
            } else {
                self(self, c, nv);
            }
        }
        return nv;
    };
    copy(copy, t.root(), kNoVertex);
    return std::move(b).build();
}

}  // namespace

TEST_CASE("contracting the new edge undoes an extension") {
    for (std::uint64_t seed : {41u, 42u}) {
        RootedTree t = fixtures::random_tree(7, seed);
        // Find a vertex with at least 3 children.
        for (VertexId x = 0; x < t.size(); ++x) {
            if (t.children(x).size() < 3) continue;
            std::vector<VertexId> group(t.children(x).begin(), t.children(x).begin() + 2);
            Refinement r = apply_extension(t, x, group);
            REQUIRE(r.new_vertex != kNoVertex);
            // Triplets only grow under refinement...
            TripletSet before = displayed_triplets(t);
            TripletSet after = displayed_triplets(r.tree);
            for (const Triplet& tr : before) CHECK(after.contains(tr));
            // ...and contracting the fresh edge recovers the original tree.
            RootedTree back = contract_vertex(r.tree, r.new_vertex);
            CHECK(emit_newick(back) == emit_newick(t));
        }
    }
}

TEST_CASE("split refinement") {
    SUBCASE("resolves a four-leaf star") {
        RootedTree s = star({"A", "B", "C", "D"});
        auto leaf = [&](const std::string& l) { return s.leaf_by_label(l); };
        SplitResult r = split_refinement(s, s.root(), {leaf("A"), leaf("B"), leaf("C")}, {leaf("D")});
        CHECK(emit_newick(r.tree) == "((A,B,C),D);");
        CHECK(is_almost_binary(r.tree));
        CHECK(count_binary_vertices(r.tree) == count_binary_vertices(s) + 1);
    }
    SUBCASE("two-leaf star is already resolved") {
        RootedTree s = star({"A", "B"});
        SplitResult r = split_refinement(s, s.root(), {s.leaf_by_label("A")}, {s.leaf_by_label("B")});
        CHECK(emit_newick(r.tree) == emit_newick(s));
    }
    SUBCASE("splitting a non-binary cherry resolves it and stays almost binary") {
        for (int n = 3; n <= 6; ++n) {
            std::vector<std::string> labels;
            for (int i = 0; i < n; ++i) labels.push_back("X" + std::to_string(i));
            RootedTree s = star(labels);
            std::vector<VertexId> a, b;
            for (int i = 0; i < n; ++i)
                (i % 2 ? a : b).push_back(s.leaf_by_label(labels[i]));
            SplitResult r = split_refinement(s, s.root(), a, b);
            // x itself becomes binary; each part of size two adds a binary cherry.
            int expect = 1 + (a.size() == 2 ? 1 : 0) + (b.size() == 2 ? 1 : 0);
            CHECK(count_binary_vertices(r.tree) == count_binary_vertices(s) + expect);
            CHECK(r.tree.children(s.root()).size() == 2);
            CHECK(is_almost_binary(r.tree));
        }
    }
    SUBCASE("splitting off a singleton adds exactly one binary vertex") {
        for (int n = 4; n <= 7; ++n) {
            std::vector<std::string> labels;
            for (int i = 0; i < n; ++i) labels.push_back("X" + std::to_string(i));
            RootedTree s = star(labels);
            std::vector<VertexId> rest;
            for (int i = 1; i < n; ++i) rest.push_back(s.leaf_by_label(labels[i]));
            SplitResult r = split_refinement(s, s.root(), rest, {s.leaf_by_label(labels[0])});
            CHECK(count_binary_vertices(r.tree) == count_binary_vertices(s) + 1);
        }
    }
    SUBCASE("rejects bad parts") {
        RootedTree t = parse_species_tree("((A,B),C,D);");
        // root is not a cherry: one child is internal
        CHECK_THROWS_AS(split_refinement(t, t.root(), {t.leaf_by_label("C")}, {t.leaf_by_label("D")}),
                        input_error);
        RootedTree s = star({"A", "B", "C"});
        CHECK_THROWS_AS(split_refinement(s, s.root(), {s.leaf_by_label("A")}, {s.leaf_by_label("B")}),
                        input_error);  // C uncovered
        CHECK_THROWS_AS(split_refinement(s, s.root(), {}, {s.leaf_by_label("B")}), input_error);
    }
}

TEST_CASE("shape predicates") {
    CHECK(is_binary(star({"A", "B"})));
    RootedTree s4 = star({"A", "B", "C", "D"});
    CHECK_FALSE(is_binary(s4));
    CHECK(is_almost_binary(s4));
    CHECK(cherries(s4) == std::vector<VertexId>{s4.root()});

    RootedTree t = parse_species_tree("((A,B,C),D);");
    CHECK(is_almost_binary(t));
    CHECK_FALSE(is_binary(t));
    auto ch = cherries(t);
    REQUIRE(ch.size() == 1);
    CHECK(t.children(ch.front()).size() == 3);

    RootedTree single = RootedTree::single_leaf("A");
    CHECK(is_binary(single));
    CHECK(is_almost_binary(single));

    // Deeper multifurcation: not almost binary.
    RootedTree deep = parse_species_tree("((A,B,(C,E)),D);");
    CHECK_FALSE(is_almost_binary(deep));
}

TEST_CASE("refinement chains only add triplets") {
    RootedTree s = star({"A", "B", "C", "D", "E"});
    TripletSet seen;
    RootedTree cur = s;
    for (int step = 0; step < 2; ++step) {
        auto ch = cherries(cur);
        bool advanced = false;
        for (VertexId x : ch) {
            if (cur.children(x).size() < 3) continue;
            const auto& kids = cur.children(x);
            std::vector<VertexId> a{kids[0], kids[1]}, b(kids.begin() + 2, kids.end());
            SplitResult r = split_refinement(cur, x, a, b);
            TripletSet now = displayed_triplets(r.tree);
            for (const Triplet& t : seen) CHECK(now.contains(t));
            seen = now;
            cur = r.tree;
            advanced = true;
            break;
        }
        if (!advanced) break;
    }
}
