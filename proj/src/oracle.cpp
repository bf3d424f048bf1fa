#include "gtc/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace gtc {

namespace {

// Mutable binary-tree scaffold for the leaf-insertion enumeration.
struct EnumTree {
    std::vector<int> parent, left, right, leaf;  // leaf: label index or -1
    int root = -1;

    int add(int label) {
        parent.push_back(-1);
        left.push_back(-1);
        right.push_back(-1);
        leaf.push_back(label);
        return static_cast<int>(parent.size()) - 1;
    }
};

void materialize(const EnumTree& et, const std::vector<std::string>& labels, int node,
                 TreeBuilder& b, VertexId out_parent) {
    if (et.leaf[node] >= 0) {
        if (out_parent == kNoVertex)
            b.add_root_leaf(labels[et.leaf[node]]);
        else
            b.add_leaf(out_parent, labels[et.leaf[node]]);
        return;
    }
    VertexId v = out_parent == kNoVertex ? b.add_root() : b.add_internal(out_parent);
    materialize(et, labels, et.left[node], b, v);
    materialize(et, labels, et.right[node], b, v);
}

bool enumerate_rec(EnumTree& et, const std::vector<std::string>& labels, size_t next,
                   const std::function<bool(const RootedTree&)>& visit) {
    if (next == labels.size()) {
        TreeBuilder b;
        materialize(et, labels, et.root, b, kNoVertex);
        return visit(std::move(b).build());
    }
    // Attach the next leaf onto every existing edge, then above the root.
    int count = static_cast<int>(et.parent.size());
    for (int c = 0; c < count; ++c) {
        if (et.parent[c] == -1) continue;
        int p = et.parent[c];
        bool was_left = et.left[p] == c;
        int l = et.add(static_cast<int>(next));
        int m = et.add(-1);
        et.left[m] = c;
        et.right[m] = l;
        et.parent[c] = m;
        et.parent[l] = m;
        et.parent[m] = p;
        (was_left ? et.left[p] : et.right[p]) = m;
        bool keep_going = enumerate_rec(et, labels, next + 1, visit);
        (was_left ? et.left[p] : et.right[p]) = c;
        et.parent[c] = p;
        et.parent.resize(count);
        et.left.resize(count);
        et.right.resize(count);
        et.leaf.resize(count);
        if (!keep_going) return false;
    }
    {
        int old_root = et.root;
        int l = et.add(static_cast<int>(next));
        int m = et.add(-1);
        et.left[m] = old_root;
        et.right[m] = l;
        et.parent[old_root] = m;
        et.parent[l] = m;
        et.root = m;
        bool keep_going = enumerate_rec(et, labels, next + 1, visit);
        et.root = old_root;
        et.parent[old_root] = -1;
        et.parent.resize(count);
        et.left.resize(count);
        et.right.resize(count);
        et.leaf.resize(count);
        if (!keep_going) return false;
    }
    return true;
}

}  // namespace

void enumerate_binary_species_trees(const std::vector<std::string>& labels,
                                    const std::function<bool(const RootedTree&)>& visit,
                                    int limit) {
    if (labels.empty()) throw input_error("cannot enumerate trees over an empty label set");
    if (static_cast<int>(labels.size()) > limit)
        throw input_error("refusing to enumerate " + std::to_string(labels.size()) +
                          " labels (limit " + std::to_string(limit) + ")");
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    EnumTree et;
    et.root = et.add(0);
    enumerate_rec(et, sorted, 1, visit);
}

std::vector<RootedTree> all_binary_species_trees(const std::vector<std::string>& labels, int limit) {
    std::vector<RootedTree> out;
    enumerate_binary_species_trees(labels, [&](const RootedTree& t) {
        out.push_back(t);
        return true;
    }, limit);
    return out;
}

bool has_cycle_dfs(const AuxGraph& graph) {
    int n = graph.num_nodes();
    std::vector<std::vector<int>> out(n);
    for (const auto& e : graph.edges) {
        if (e.from == e.to) return true;
        out[e.from].push_back(e.to);
    }
    std::vector<char> color(n, 0);  // 0 white, 1 on stack, 2 done
    std::vector<std::pair<int, size_t>> stack;
    for (int start = 0; start < n; ++start) {
        if (color[start]) continue;
        stack.push_back({start, 0});
        color[start] = 1;
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < out[v].size()) {
                int w = out[v][i++];
                if (color[w] == 1) return true;
                if (color[w] == 0) {
                    color[w] = 1;
                    stack.push_back({w, 0});
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

std::optional<RootedTree> brute_force_solve(const GeneTree& g, int limit) {
    TripletSet r = informative_triplets(g);
    std::optional<RootedTree> found;
    enumerate_binary_species_trees(g.species().names(), [&](const RootedTree& s) {
        LcaIndex idx(s);
        for (const Triplet& t : r)
            if (!displays(s, idx, t)) return true;
        if (has_cycle_dfs(build_aux_graph(g, s, lca_map(g, s, idx), idx))) return true;
        found = s;
        return false;
    }, limit);
    return found;
}

namespace {

VertexId aho_rec(const TripletSet& r, std::vector<std::string> leaves, TreeBuilder& b,
                 VertexId parent, bool* ok) {
    std::sort(leaves.begin(), leaves.end());
    if (leaves.size() == 1)
        return parent == kNoVertex ? b.add_root_leaf(leaves.front()) : b.add_leaf(parent, leaves.front());

    std::map<std::string, int> index;
    for (size_t i = 0; i < leaves.size(); ++i) index[leaves[i]] = static_cast<int>(i);
    std::vector<int> comp(leaves.size());
    for (size_t i = 0; i < comp.size(); ++i) comp[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (const Triplet& t : r) {
        auto a = index.find(t.first), bb = index.find(t.second), c = index.find(t.out);
        if (a == index.end() || bb == index.end() || c == index.end()) continue;
        comp[find(a->second)] = find(bb->second);
    }
    std::map<int, std::vector<std::string>> groups;
    for (size_t i = 0; i < leaves.size(); ++i) groups[find(static_cast<int>(i))].push_back(leaves[i]);
    if (groups.size() == 1) {
        *ok = false;
        return kNoVertex;
    }
    VertexId v = parent == kNoVertex ? b.add_root() : b.add_internal(parent);
    // Deterministic child order: by smallest member label.
    std::vector<std::vector<std::string>> parts;
    for (auto& [root, members] : groups) parts.push_back(std::move(members));
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (auto& part : parts) {
        aho_rec(r, std::move(part), b, v, ok);
        if (!*ok) return kNoVertex;
    }
    return v;
}

}  // namespace

std::optional<RootedTree> aho_build(const TripletSet& r, const std::vector<std::string>& leaves) {
    if (leaves.empty()) throw input_error("aho_build over an empty leaf set");
    std::vector<std::string> sorted = leaves;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    TreeBuilder b;
    bool ok = true;
    aho_rec(r, sorted, b, kNoVertex, &ok);
    if (!ok) return std::nullopt;
    return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Instance generation

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exp_draw(std::mt19937_64& rng, double rate) {
    return -std::log1p(-u01(rng)) / rate;
}

struct DatedSpeciesTree {
    struct Node {
        int parent = -1;
        int left = -1, right = -1;
        double time = 0.0;   // bifurcation time; leaves at 1.0
        std::string name;    // leaves only
    };
    std::vector<Node> nodes;
    int root = -1;

    bool is_leaf(int v) const { return nodes[v].left < 0; }
    // A branch is the edge into v, spanning (parent time, v time).
    double branch_start(int v) const { return v == root ? -0.5 : nodes[nodes[v].parent].time; }
    double branch_end(int v) const { return nodes[v].time; }

    std::vector<int> alive_at(double t) const {
        std::vector<int> out;
        for (int v = 0; v < static_cast<int>(nodes.size()); ++v)
            if (branch_start(v) < t && t < branch_end(v)) out.push_back(v);
        return out;
    }
};

DatedSpeciesTree simulate_species_tree(int k, std::mt19937_64& rng) {
    DatedSpeciesTree s;
    if (k == 1) {
        s.nodes.push_back({-1, -1, -1, 1.0, ""});
        s.root = 0;
        return s;
    }
    std::vector<double> times;
    for (int i = 0; i < k - 2; ++i) times.push_back(u01(rng));
    std::sort(times.begin(), times.end());

    s.nodes.push_back({-1, -1, -1, 0.0, ""});
    s.root = 0;
    std::vector<int> open;
    for (int side = 0; side < 2; ++side) {
        s.nodes.push_back({0, -1, -1, 1.0, ""});
        open.push_back(static_cast<int>(s.nodes.size()) - 1);
    }
    s.nodes[0].left = open[0];
    s.nodes[0].right = open[1];

    for (double t : times) {
        size_t pick = static_cast<size_t>(u01(rng) * open.size());
        if (pick >= open.size()) pick = open.size() - 1;
        int v = open[pick];
        s.nodes[v].time = t;
        for (int side = 0; side < 2; ++side) {
            s.nodes.push_back({v, -1, -1, 1.0, ""});
            int c = static_cast<int>(s.nodes.size()) - 1;
            (side == 0 ? s.nodes[v].left : s.nodes[v].right) = c;
            if (side == 0)
                open[pick] = c;
            else
                open.push_back(c);
        }
    }

    int width = 1;
    for (int x = k; x >= 10; x /= 10) ++width;
    int counter = 0;
    for (int v = 0; v < static_cast<int>(s.nodes.size()); ++v) {
        if (!s.is_leaf(v)) continue;
        std::string num = std::to_string(++counter);
        s.nodes[v].name = "S" + std::string(width - num.size(), '0') + num;
    }
    return s;
}

struct ScenarioNode {
    enum class Kind { sample, dead, speciation, duplication, transfer };
    Kind kind;
    int species = -1;                 // for samples: the species-tree leaf
    std::vector<int> children;
    std::vector<char> child_jump;     // edge to children[i] is a transfer jump
};

struct Scenario {
    std::vector<ScenarioNode> nodes;
    int root = -1;
    int cap = 0;

    int add(ScenarioNode n) {
        if (static_cast<int>(nodes.size()) >= cap) throw std::overflow_error("scenario cap");
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }
};

// Evolves one gene lineage down the branch into species vertex `sv` starting
// at time t; returns the scenario node the lineage becomes.
int simulate_gene(const DatedSpeciesTree& s, const InstanceGenConfig& cfg, std::mt19937_64& rng,
                  Scenario& sc, int sv, double t) {
    double total = cfg.dup_rate + cfg.hgt_rate + cfg.loss_rate;
    for (;;) {
        double end = s.branch_end(sv);
        double next = total > 0 ? t + exp_draw(rng, total) : end;
        if (next >= end) {
            if (s.is_leaf(sv)) return sc.add({ScenarioNode::Kind::sample, sv, {}, {}});
            ScenarioNode n{ScenarioNode::Kind::speciation, -1, {}, {}};
            int id = sc.add(std::move(n));
            int l = simulate_gene(s, cfg, rng, sc, s.nodes[sv].left, end);
            int r = simulate_gene(s, cfg, rng, sc, s.nodes[sv].right, end);
            sc.nodes[id].children = {l, r};
            sc.nodes[id].child_jump = {0, 0};
            return id;
        }
        t = next;
        double pick = u01(rng) * total;
        if (pick < cfg.loss_rate) return sc.add({ScenarioNode::Kind::dead, -1, {}, {}});
        if (pick < cfg.loss_rate + cfg.dup_rate) {
            ScenarioNode n{ScenarioNode::Kind::duplication, -1, {}, {}};
            int id = sc.add(std::move(n));
            int a = simulate_gene(s, cfg, rng, sc, sv, t);
            int b = simulate_gene(s, cfg, rng, sc, sv, t);
            sc.nodes[id].children = {a, b};
            sc.nodes[id].child_jump = {0, 0};
            return id;
        }
        // Transfer: jump to a co-existing branch, if any.
        std::vector<int> targets = s.alive_at(t);
        targets.erase(std::remove(targets.begin(), targets.end(), sv), targets.end());
        if (targets.empty()) continue;  // nothing co-exists; the event leaves no trace
        size_t pick_t = static_cast<size_t>(u01(rng) * targets.size());
        if (pick_t >= targets.size()) pick_t = targets.size() - 1;
        ScenarioNode n{ScenarioNode::Kind::transfer, -1, {}, {}};
        int id = sc.add(std::move(n));
        int resident = simulate_gene(s, cfg, rng, sc, sv, t);
        int moved = simulate_gene(s, cfg, rng, sc, targets[pick_t], t);
        sc.nodes[id].children = {resident, moved};
        sc.nodes[id].child_jump = {0, 1};
        return id;
    }
}

struct Observed {
    TreeBuilder builder;
    std::vector<Event> events;
    std::vector<char> transfer_flag;
    std::map<std::string, std::string> sigma;
    int gene_counter = 0;
};

// Emits the pruned, unary-suppressed subtree under `node`. Returns the built
// vertex and whether the path down to it crossed a transfer jump.
std::pair<VertexId, bool> emit_observed(const Scenario& sc, const DatedSpeciesTree& s,
                                        const std::vector<char>& alive, int node, Observed& out,
                                        VertexId parent, bool jump_above) {
    const ScenarioNode& n = sc.nodes[node];
    if (n.kind == ScenarioNode::Kind::sample) {
        std::string name = "g" + std::to_string(out.gene_counter++);
        out.sigma[name] = s.nodes[n.species].name;
        VertexId v = parent == kNoVertex ? out.builder.add_root_leaf(name)
                                         : out.builder.add_leaf(parent, name);
        out.events.push_back(Event::leaf);
        out.transfer_flag.push_back(0);
        return {v, jump_above};
    }
    std::vector<std::pair<int, bool>> live;
    for (size_t i = 0; i < n.children.size(); ++i)
        if (alive[n.children[i]]) live.push_back({n.children[i], n.child_jump[i] != 0});
    assert(!live.empty());
    if (live.size() == 1)
        return emit_observed(sc, s, alive, live.front().first, out, parent,
                             jump_above || live.front().second);

    VertexId v = parent == kNoVertex ? out.builder.add_root() : out.builder.add_internal(parent);
    switch (n.kind) {
        case ScenarioNode::Kind::speciation: out.events.push_back(Event::speciation); break;
        case ScenarioNode::Kind::duplication: out.events.push_back(Event::duplication); break;
        case ScenarioNode::Kind::transfer: out.events.push_back(Event::transfer); break;
        default: assert(false);
    }
    out.transfer_flag.push_back(0);
    bool self_is_transfer = n.kind == ScenarioNode::Kind::transfer;
    for (auto [child, jump] : live) {
        auto [cv, crossed] = emit_observed(sc, s, alive, child, out, v, jump);
        // A jump is only expressible under a transfer-labeled parent; hidden
        // jumps merge into the plain edge and validation decides the fate.
        out.transfer_flag[cv] = (self_is_transfer && crossed) ? 1 : 0;
    }
    return {v, jump_above};
}

GeneTree build_observed(const Scenario& sc, const DatedSpeciesTree& s) {
    std::vector<char> alive(sc.nodes.size(), 0);
    for (int v = static_cast<int>(sc.nodes.size()) - 1; v >= 0; --v) {
        const ScenarioNode& n = sc.nodes[v];
        if (n.kind == ScenarioNode::Kind::sample)
            alive[v] = 1;
        else
            for (int c : n.children) alive[v] |= alive[c];
    }
    if (!alive[sc.root]) throw std::overflow_error("everything lost");

    Observed out;
    emit_observed(sc, s, alive, sc.root, out, kNoVertex, false);
    RootedTree tree = std::move(out.builder).build();
    return GeneTree(std::move(tree), std::move(out.events), std::move(out.transfer_flag), out.sigma);
}

}  // namespace

GeneTree generate_instance(const InstanceGenConfig& cfg) {
    if (cfg.species_count < 1) throw input_error("species_count must be positive");
    if (cfg.gene_count_hint < 1) throw input_error("gene_count_hint must be positive");
    for (double rate : {cfg.dup_rate, cfg.hgt_rate, cfg.loss_rate})
        if (rate < 0.0 || rate > 1.0) throw input_error("rates must lie in [0,1]");

    constexpr int kMaxAttempts = 64;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(attempt));
        try {
            DatedSpeciesTree species = simulate_species_tree(cfg.species_count, rng);
            Scenario sc;
            sc.cap = std::max(20000, 100 * cfg.gene_count_hint);
            sc.root = simulate_gene(species, cfg, rng, sc, species.root, -0.5);
            GeneTree g = build_observed(sc, species);
            if (validate_axioms(g).ok()) return g;
        } catch (const std::overflow_error&) {
            // cap blown or everything lost; try the next derived seed
        } catch (const input_error&) {
            // collapsed history not expressible as a labeled gene tree
        }
    }
    throw input_error("instance generation failed after " + std::to_string(kMaxAttempts) +
                      " derived seeds; the configuration is degenerate");
}

}  // namespace gtc
