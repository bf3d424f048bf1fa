#include "gtc/solver.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <stdexcept>

#include "gtc/triplet.hpp"

namespace gtc {

std::vector<IdTriplet> triplet_ids(const TripletSet& r, const SpeciesIndex& species) {
    std::vector<IdTriplet> out;
    out.reserve(r.size());
    for (const Triplet& t : r) {
        int a = species.id_of(t.first), b = species.id_of(t.second), c = species.id_of(t.out);
        if (a < 0 || b < 0 || c < 0) throw input_error("triplet over unknown species: " + t.str());
        if (a > b) std::swap(a, b);
        out.push_back({a, b, c});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<VertexId> species_leaf_map(const RootedTree& s, const SpeciesIndex& species) {
    std::vector<VertexId> out(species.count(), kNoVertex);
    for (int id = 0; id < species.count(); ++id) {
        out[id] = s.leaf_by_label(species.name(id));
        if (out[id] == kNoVertex)
            throw input_error("species missing from the species tree: " + species.name(id));
    }
    return out;
}

bool agrees_with_ids(const RootedTree& s, const SpeciesIndex& species,
                     const std::vector<IdTriplet>& r) {
    LcaIndex idx(s);
    std::vector<VertexId> leaf = species_leaf_map(s, species);
    for (const IdTriplet& t : r) {
        if (displays_leaves(idx, leaf[t[0]], leaf[t[2]], leaf[t[1]])) return false;
        if (displays_leaves(idx, leaf[t[1]], leaf[t[2]], leaf[t[0]])) return false;
    }
    return true;
}

bool GoodSplitGraph::disconnected() const {
    int k = static_cast<int>(species.size());
    if (k <= 1) return false;
    std::vector<char> seen(k, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < k; ++w)
            if (!seen[w] && cond[v][w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
    }
    return visited < k;
}

namespace {

bool contains_sorted(const std::vector<int>& sorted, int x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool is_event_vertex(const GeneTree& g, VertexId v) {
    return g.event(v) == Event::duplication || g.event(v) == Event::transfer;
}

std::vector<int> cherry_species(const GeneTree& g, const RootedTree& s, VertexId cherry) {
    std::vector<int> out;
    for (VertexId c : s.children(cherry)) {
        if (!s.is_leaf(c)) throw input_error("good split graph requires a cherry");
        out.push_back(g.species().id_of(s.label(c)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

GoodSplitGraph good_split_graph(const GeneTree& g, const TransferForest& forest,
                                const RootedTree& s, VertexId cherry, const TopoSort& q,
                                const std::vector<IdTriplet>& r, const LcaMap& mu) {
    const RootedTree& t = g.tree();
    GoodSplitGraph gsg;
    gsg.cherry = cherry;
    gsg.species = cherry_species(g, s, cherry);
    int k = static_cast<int>(gsg.species.size());
    gsg.cond.assign(k, std::vector<std::uint8_t>(k, 0));

    // Gene nodes come first in the aux-node numbering, so q.in_set[v] is the
    // membership of gene vertex v.
    auto in_q = [&](VertexId v) { return q.in_set[v] != 0; };

    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            int a = gsg.species[i], b = gsg.species[j];
            std::uint8_t mask = 0;
            for (int c : gsg.species) {
                if (c == a || c == b) continue;
                if (std::binary_search(r.begin(), r.end(), IdTriplet{a, b, c})) {
                    mask |= 1u << 0;
                    break;
                }
            }
            for (VertexId v = 0; v < t.size() && !(mask & (1u << 1)); ++v) {
                if (t.is_root(v)) continue;
                VertexId u = t.parent(v);
                if (is_event_vertex(g, u) && !in_q(u) && g.event(v) == Event::speciation &&
                    contains_sorted(forest.species_below[v], a) &&
                    contains_sorted(forest.species_below[v], b))
                    mask |= 1u << 1;
            }
            for (VertexId v = 0; v < t.size() && !(mask & (1u << 2)); ++v) {
                if (t.is_root(v)) continue;
                VertexId u = t.parent(v);
                if (g.event(u) == Event::speciation && g.event(v) == Event::speciation &&
                    mu[u] == cherry && contains_sorted(forest.species_below[v], a) &&
                    contains_sorted(forest.species_below[v], b))
                    mask |= 1u << 2;
            }
            for (VertexId u = 0; u < t.size() && !(mask & (1u << 3)); ++u) {
                if (is_event_vertex(g, u) && !in_q(u) &&
                    contains_sorted(forest.species_below[u], a) &&
                    contains_sorted(forest.species_below[u], b))
                    mask |= 1u << 3;
            }
            gsg.cond[i][j] = gsg.cond[j][i] = mask;
        }
    }
    return gsg;
}

std::optional<std::pair<std::vector<int>, std::vector<int>>> find_disconnected_bipartition(
    const GoodSplitGraph& gsg, const SpeciesIndex& species) {
    int k = static_cast<int>(gsg.species.size());
    if (k <= 1) return std::nullopt;
    // Components, then the component holding the smallest label versus the rest.
    std::vector<int> comp(k, -1);
    int num_comp = 0;
    for (int start = 0; start < k; ++start) {
        if (comp[start] >= 0) continue;
        comp[start] = num_comp;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < k; ++w)
                if (comp[w] < 0 && gsg.cond[v][w]) {
                    comp[w] = num_comp;
                    stack.push_back(w);
                }
        }
        ++num_comp;
    }
    if (num_comp <= 1) return std::nullopt;

    int best = 0;  // species ids sort like their names here? ids are by sorted name, so id order = name order
    for (int i = 1; i < k; ++i)
        if (species.name(gsg.species[i]) < species.name(gsg.species[best])) best = i;
    std::vector<int> part_a, part_b;
    for (int i = 0; i < k; ++i)
        (comp[i] == comp[best] ? part_a : part_b).push_back(gsg.species[i]);
    return std::make_pair(std::move(part_a), std::move(part_b));
}

namespace {

// Triangular pair addressing over species ids, a < b.
class PairIndex {
public:
    explicit PairIndex(int n = 0) : n_(n) {}
    int rows() const { return n_ * (n_ - 1) / 2; }
    int operator()(int a, int b) const {
        if (a > b) std::swap(a, b);
        return a * (2 * n_ - a - 1) / 2 + (b - a - 1);
    }

private:
    int n_;
};

// One bitset row per species pair with a per-row population count, so
// emptiness checks are O(1) and removals O(1).
class PairBits {
public:
    void init(int rows, int items) {
        words_ = (items + 63) / 64;
        bits_.assign(static_cast<size_t>(rows) * words_, 0);
        count_.assign(rows, 0);
    }
    void set(int row, int item) {
        std::uint64_t& w = bits_[static_cast<size_t>(row) * words_ + item / 64];
        std::uint64_t bit = 1ull << (item % 64);
        if (!(w & bit)) {
            w |= bit;
            ++count_[row];
        }
    }
    void reset(int row, int item) {
        std::uint64_t& w = bits_[static_cast<size_t>(row) * words_ + item / 64];
        std::uint64_t bit = 1ull << (item % 64);
        if (w & bit) {
            w &= ~bit;
            --count_[row];
        }
    }
    bool any(int row) const { return count_[row] > 0; }

private:
    int words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<int> count_;
};

// The four witness sets behind the C1..C4 conditions, maintained
// incrementally across split refinements. For sibling species a,b the edge
// test is "any set non-empty", which mirrors a from-scratch evaluation.
class LSets {
public:
    void init(const GeneTree& g, const TransferForest& forest, const RootedTree& s,
              const std::vector<IdTriplet>& r, const LcaMap& mu, const TopoSort& q) {
        const RootedTree& t = g.tree();
        int ns = g.species().count();
        pairs_ = PairIndex(ns);
        l1_.init(pairs_.rows(), ns);
        l2_.init(pairs_.rows(), t.size());
        l3_.init(pairs_.rows(), t.size());
        l4_.init(pairs_.rows(), t.size());

        std::vector<VertexId> parent_of_species(ns);
        for (int id = 0; id < ns; ++id)
            parent_of_species[id] = s.parent(s.leaf_by_label(g.species().name(id)));

        // c must currently be a sibling leaf of both a and b.
        for (const IdTriplet& trip : r) {
            VertexId pa = parent_of_species[trip[0]];
            if (pa == parent_of_species[trip[1]] && pa == parent_of_species[trip[2]])
                l1_.set(pairs_(trip[0], trip[1]), trip[2]);
        }

        auto in_q = [&](VertexId v) { return q.in_set[v] != 0; };
        auto all_pairs_set = [&](PairBits& table, const std::vector<int>& species, VertexId item) {
            for (size_t i = 0; i < species.size(); ++i)
                for (size_t j = i + 1; j < species.size(); ++j)
                    table.set(pairs_(species[i], species[j]), item);
        };

        for (VertexId v = 0; v < t.size(); ++v) {
            if (!t.is_root(v)) {
                VertexId u = t.parent(v);
                if (is_event_vertex(g, u) && !in_q(u) && g.event(v) == Event::speciation)
                    all_pairs_set(l2_, forest.species_below[v], u);
                if (g.event(u) == Event::speciation && g.event(v) == Event::speciation) {
                    // u qualifies for the pairs below v whose current parent is mu[u]
                    for (size_t i = 0; i < forest.species_below[v].size(); ++i)
                        for (size_t j = i + 1; j < forest.species_below[v].size(); ++j) {
                            int a = forest.species_below[v][i], b = forest.species_below[v][j];
                            if (parent_of_species[a] == parent_of_species[b] &&
                                parent_of_species[a] == mu[u])
                                l3_.set(pairs_(a, b), u);
                        }
                }
            }
            if (is_event_vertex(g, v) && !in_q(v)) all_pairs_set(l4_, forest.species_below[v], v);
        }
    }

    bool edge(int a, int b) const {
        int p = pairs_(a, b);
        return l1_.any(p) || l2_.any(p) || l3_.any(p) || l4_.any(p);
    }

    // A pair in part_x got separated from every species in part_y.
    void on_separation(const std::vector<int>& part_x, const std::vector<int>& part_y) {
        for (size_t i = 0; i < part_x.size(); ++i)
            for (size_t j = i + 1; j < part_x.size(); ++j) {
                int row = pairs_(part_x[i], part_x[j]);
                for (int c : part_y) l1_.reset(row, c);
            }
    }

    // A gene vertex entered the maximal topological sort.
    void on_member_added(VertexId u, int num_species) {
        for (int a = 0; a < num_species; ++a)
            for (int b = a + 1; b < num_species; ++b) {
                int row = pairs_(a, b);
                l2_.reset(row, u);
                l4_.reset(row, u);
            }
    }

    // mu(u) moved from the split cherry x to x, x1 or x2; prune the pairs
    // whose new parent no longer matches.
    void on_mu_update(VertexId u, bool now_x1, bool now_x2, const std::vector<int>& part_a,
                      const std::vector<int>& part_b) {
        auto reset_within = [&](const std::vector<int>& part) {
            for (size_t i = 0; i < part.size(); ++i)
                for (size_t j = i + 1; j < part.size(); ++j) l3_.reset(pairs_(part[i], part[j]), u);
        };
        auto reset_across = [&]() {
            for (int a : part_a)
                for (int b : part_b) l3_.reset(pairs_(a, b), u);
        };
        if (now_x1) {
            reset_within(part_b);
            reset_across();
        } else if (now_x2) {
            reset_within(part_a);
            reset_across();
        } else {
            reset_within(part_a);
            reset_within(part_b);
            reset_across();
        }
    }

private:
    PairIndex pairs_;
    PairBits l1_, l2_, l3_, l4_;
};

std::string species_set_str(const SpeciesIndex& species, const std::vector<int>& ids) {
    std::string s = "{";
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ",";
        s += species.name(ids[i]);
    }
    return s + "}";
}

std::vector<std::string> species_names(const SpeciesIndex& species, const std::vector<int>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(species.name(id));
    return out;
}

class Solver {
public:
    Solver(const GeneTree& g, const SolveOptions& opts)
        : g_(g), opts_(opts), forest_(transfer_forest(g)), rng_(opts.shuffle_seed) {
        AxiomReport axioms = validate_axioms(g);
        if (!axioms.ok())
            throw input_error("gene tree violates the observability axioms (" +
                              axioms.violations.front().axiom + ": " +
                              axioms.violations.front().detail + ")");
        r_ = informative_triplet_ids(g, forest_);
    }

    SolveResult run_from_star() {
        TreeBuilder b;
        const auto& names = g_.species().names();
        if (names.size() == 1) {
            b.add_root_leaf(names.front());
        } else {
            VertexId root = b.add_root();
            for (const auto& n : names) b.add_leaf(root, n);
        }
        return run(std::move(b).build(), /*check_start=*/false);
    }

    SolveResult run_from(const RootedTree& s0) {
        if (s0.sorted_leaf_labels() != g_.species().names())
            throw input_error("start tree leaves do not match the sampled species");
        if (!is_almost_binary(s0)) throw input_error("start tree must be almost binary");
        return run(s0, /*check_start=*/true);
    }

private:
    SolveResult run(RootedTree start, bool check_start) {
        s_ = std::move(start);
        // Leaf ids survive refinements, so this cache stays valid as s_ grows.
        s_leaf_species_.assign(s_.size(), -1);
        for (VertexId v = 0; v < s_.size(); ++v)
            if (s_.is_leaf(v)) s_leaf_species_[v] = g_.species().id_of(s_.label(v));
        SolveResult result;

        if (check_start && !agrees_with_ids(s_, g_.species(), r_)) {
            result.trace.outcome = "start_tree_disagrees";
            result.final_tree = s_;
            return result;
        }

        recompute();
        if (check_start && aux_.has_self_loop_at_species_leaf(s_)) {
            result.trace.outcome = "leaf_self_loop";
            result.final_tree = s_;
            return result;
        }
        result.trace.initial_member_set = q_.member_count();

        if (!opts_.naive_mode) lsets_.init(g_, forest_, s_, r_, mu_, q_);

        while (!is_binary(s_)) {
            auto pick = find_good_split();
            if (!pick) break;
            apply_split(pick->first, pick->second, result.trace);
        }

        result.final_tree = s_;
        if (!is_binary(s_)) {
            result.trace.outcome = "no_good_split";
            return result;
        }
        // The loop preserves agreement, so a binary tree is a solution iff
        // the timing graph peels completely.
        if (q_.complete(aux_.num_nodes()) && agrees_with_ids(s_, g_.species(), r_)) {
            result.trace.outcome = "solution";
            result.species_tree = s_;
        } else {
            result.trace.outcome = "binary_inconsistent";
        }
        return result;
    }

    void recompute() {
        LcaIndex s_idx(s_);
        mu_ = lca_map(g_, s_, s_idx);
        aux_ = build_aux_graph(g_, s_, mu_, s_idx);
        TopoSort next = maximal_topological_sort(aux_);
        // The member set never shrinks across split refinements; ids are
        // stable, so this is a prefix-wise inclusion.
        for (size_t i = 0; i < q_.in_set.size(); ++i)
            if (q_.in_set[i] && !next.in_set[i])
                throw std::logic_error("maximal topological sort lost a member");
        q_ = std::move(next);
    }

    // Eligible cherries in scan order: non-binary, every strict ancestor
    // already a member of the topological sort.
    std::vector<VertexId> eligible_cherries() const {
        std::vector<VertexId> out;
        for (VertexId x : cherries(s_)) {
            if (s_.children(x).size() <= 2) continue;
            bool ok = true;
            for (VertexId a = s_.parent(x); a != kNoVertex; a = s_.parent(a))
                if (!q_.contains(aux_.species_node(a))) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(x);
        }
        return out;
    }

    std::optional<std::pair<VertexId, std::pair<std::vector<int>, std::vector<int>>>>
    find_good_split() {
        std::vector<VertexId> scan = eligible_cherries();
        if (opts_.shuffle_seed) std::shuffle(scan.begin(), scan.end(), rng_);
        for (VertexId x : scan) {
            GoodSplitGraph gsg = build_graph(x);
            if (opts_.verify_lsets && !opts_.naive_mode) cross_check(x, gsg);
            auto parts = pick_bipartition(gsg);
            if (parts) return std::make_pair(x, std::move(*parts));
        }
        return std::nullopt;
    }

    std::vector<int> cherry_species_ids(VertexId x) const {
        std::vector<int> out;
        out.reserve(s_.children(x).size());
        for (VertexId c : s_.children(x)) out.push_back(s_leaf_species_[c]);
        std::sort(out.begin(), out.end());
        return out;
    }

    GoodSplitGraph build_graph(VertexId x) {
        if (opts_.naive_mode) return good_split_graph(g_, forest_, s_, x, q_, r_, mu_);
        GoodSplitGraph gsg;
        gsg.cherry = x;
        gsg.species = cherry_species_ids(x);
        int k = static_cast<int>(gsg.species.size());
        gsg.cond.assign(k, std::vector<std::uint8_t>(k, 0));
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (lsets_.edge(gsg.species[i], gsg.species[j]))
                    gsg.cond[i][j] = gsg.cond[j][i] = 1;
        return gsg;
    }

    void cross_check(VertexId x, const GoodSplitGraph& incremental) {
        GoodSplitGraph naive = good_split_graph(g_, forest_, s_, x, q_, r_, mu_);
        int k = static_cast<int>(incremental.species.size());
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if ((incremental.cond[i][j] != 0) != (naive.cond[i][j] != 0))
                    throw std::logic_error(
                        "incremental edge predicate disagrees with the naive evaluation at pair " +
                        g_.species().name(incremental.species[i]) + "," +
                        g_.species().name(incremental.species[j]));
    }

    std::optional<std::pair<std::vector<int>, std::vector<int>>> pick_bipartition(
        const GoodSplitGraph& gsg) {
        if (!opts_.shuffle_seed) return find_disconnected_bipartition(gsg, g_.species());
        // Randomized mode: any disconnected bipartition is valid, so group the
        // components arbitrarily into two non-empty sides.
        int k = static_cast<int>(gsg.species.size());
        if (k <= 1) return std::nullopt;
        std::vector<int> comp(k, -1);
        int num_comp = 0;
        for (int start = 0; start < k; ++start) {
            if (comp[start] >= 0) continue;
            std::vector<int> stack{start};
            comp[start] = num_comp;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w = 0; w < k; ++w)
                    if (comp[w] < 0 && gsg.cond[v][w]) {
                        comp[w] = num_comp;
                        stack.push_back(w);
                    }
            }
            ++num_comp;
        }
        if (num_comp <= 1) return std::nullopt;
        std::vector<char> side(num_comp);
        for (;;) {
            bool has_a = false, has_b = false;
            for (int c = 0; c < num_comp; ++c) {
                side[c] = static_cast<char>(rng_() & 1);
                (side[c] ? has_a : has_b) = true;
            }
            if (has_a && has_b) break;
        }
        std::vector<int> part_a, part_b;
        for (int i = 0; i < k; ++i) (side[comp[i]] ? part_a : part_b).push_back(gsg.species[i]);
        return std::make_pair(std::move(part_a), std::move(part_b));
    }

    void apply_split(VertexId x, const std::pair<std::vector<int>, std::vector<int>>& parts,
                     SolveTrace& trace) {
        auto to_leaves = [&](const std::vector<int>& ids) {
            std::vector<VertexId> leaves;
            leaves.reserve(ids.size());
            for (int id : ids) leaves.push_back(s_.leaf_by_label(g_.species().name(id)));
            return leaves;
        };
        SolveStep step;
        step.cherry = species_set_str(g_.species(), cherry_species_ids(x));
        step.part_a = species_names(g_.species(), parts.first);
        step.part_b = species_names(g_.species(), parts.second);

        LcaMap old_mu = mu_;
        TopoSort old_q = q_;
        SplitResult split = split_refinement(s_, x, to_leaves(parts.first), to_leaves(parts.second));
        s_ = std::move(split.tree);
        recompute();

        if (!opts_.naive_mode) {
            lsets_.on_separation(parts.first, parts.second);
            lsets_.on_separation(parts.second, parts.first);
            for (VertexId u = 0; u < g_.tree().size(); ++u)
                if (q_.in_set[u] && !old_q.in_set[u])
                    lsets_.on_member_added(u, g_.species().count());
            for (VertexId u = 0; u < g_.tree().size(); ++u) {
                if (old_mu[u] != x) continue;
                bool now_x1 = mu_[u] == split.rep_a && split.rep_a != kNoVertex && !s_.is_leaf(split.rep_a);
                bool now_x2 = mu_[u] == split.rep_b && split.rep_b != kNoVertex && !s_.is_leaf(split.rep_b);
                lsets_.on_mu_update(u, now_x1, now_x2, parts.first, parts.second);
            }
        }

        step.member_set_size = q_.member_count();
        trace.steps.push_back(std::move(step));
    }

    const GeneTree& g_;
    SolveOptions opts_;
    TransferForest forest_;
    std::vector<IdTriplet> r_;
    RootedTree s_;
    std::vector<int> s_leaf_species_;
    LcaMap mu_;
    AuxGraph aux_;
    TopoSort q_;
    LSets lsets_;
    std::mt19937_64 rng_;
};

}  // namespace

SolveResult solve(const GeneTree& g, const SolveOptions& opts) {
    return Solver(g, opts).run_from_star();
}

SolveResult solve_gtc(const GeneTree& g, const RootedTree& s0, const SolveOptions& opts) {
    return Solver(g, opts).run_from(s0);
}

}  // namespace gtc
