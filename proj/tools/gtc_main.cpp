#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gtc/newick.hpp"
#include "gtc/oracle.hpp"
#include "gtc/reconciliation.hpp"
#include "gtc/report.hpp"
#include "gtc/solver.hpp"

namespace {

constexpr int kExitPositive = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw gtc::input_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> load_map(const std::string& path) {
    if (path.empty()) return {};
    return gtc::parse_species_map(read_input(path));
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw gtc::input_error("cannot open output file: " + path);
    out << text;
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

struct CommonArgs {
    std::string map_file;
    std::string out_file;
    bool json = false;
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_map = true) {
    if (with_map)
        cmd->add_option("--map", args.map_file, "two-column gene/species table (overrides @)");
    cmd->add_option("-o,--out", args.out_file, "write the report to a file instead of stdout");
    cmd->add_flag("--json", args.json, "emit a JSON report");
    cmd->add_flag("--timings", args.timings, "include per-phase wall-clock times in the report");
}

void finish(const CommonArgs& args, nlohmann::json json_report, const std::string& text,
            const std::map<std::string, double>& timing) {
    if (args.json) {
        if (args.timings) json_report["timing_ms"] = timing;
        write_output(args.out_file, gtc::render_report(json_report));
    } else {
        std::string out = text;
        if (args.timings)
            for (const auto& [phase, ms] : timing)
                out += phase + ": " + std::to_string(ms) + " ms\n";
        write_output(args.out_file, out);
    }
}

int run_solve(const std::string& gene_file, const std::string& start_tree_file,
              bool emit_reconciliation, std::uint64_t shuffle_seed, bool naive,
              const CommonArgs& args) {
    auto t0 = std::chrono::steady_clock::now();
    gtc::GeneTree g = gtc::parse_gene_tree(read_input(gene_file), load_map(args.map_file));
    double parse_ms = ms_since(t0);

    gtc::SolveOptions opts;
    opts.shuffle_seed = shuffle_seed;
    opts.naive_mode = naive;

    auto t1 = std::chrono::steady_clock::now();
    gtc::SolveResult result;
    if (start_tree_file.empty()) {
        result = gtc::solve(g, opts);
    } else {
        gtc::RootedTree s0 = gtc::parse_species_tree(read_input(start_tree_file));
        result = gtc::solve_gtc(g, s0, opts);
    }
    double solve_ms = ms_since(t1);

    std::optional<gtc::Reconciliation> rec;
    if (result.solved() && emit_reconciliation)
        rec = gtc::build_reconciliation(g, *result.species_tree);

    std::string text;
    if (result.solved()) {
        text = gtc::emit_newick(*result.species_tree) + "\n";
        if (rec) {
            auto rj = gtc::reconciliation_json(g, *result.species_tree, *rec);
            text += rj.dump(2) + "\n";
        }
    } else {
        text = "no time-consistent species tree exists (" + result.trace.outcome + ")\n";
    }
    finish(args, gtc::solve_report(g, result, rec), text,
           {{"parse", parse_ms}, {"solve", solve_ms}});
    return result.solved() ? kExitPositive : kExitNegative;
}

int run_check(const std::string& gene_file, const std::string& species_file, const CommonArgs& args) {
    auto t0 = std::chrono::steady_clock::now();
    gtc::GeneTree g = gtc::parse_gene_tree(read_input(gene_file), load_map(args.map_file));
    gtc::RootedTree s = gtc::parse_species_tree(read_input(species_file));
    double parse_ms = ms_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    gtc::PairVerdict verdict = gtc::check_pair(g, s);
    double check_ms = ms_since(t1);

    std::string text;
    if (verdict.consistent()) {
        text = "consistent\n";
    } else if (verdict.kind == gtc::PairVerdict::Kind::missing_triplets) {
        text = "inconsistent: the species tree misses informative triplets\n";
        for (const auto& t : verdict.missing) text += "  " + t.str() + "\n";
    } else {
        text = "inconsistent: the timing graph has a cycle\n";
        for (const auto& name : verdict.cycle) text += "  " + name + "\n";
    }
    finish(args, gtc::check_report(g, s, verdict), text, {{"parse", parse_ms}, {"check", check_ms}});
    return verdict.consistent() ? kExitPositive : kExitNegative;
}

int run_triplets(const std::string& gene_file, const CommonArgs& args) {
    gtc::GeneTree g = gtc::parse_gene_tree(read_input(gene_file), load_map(args.map_file));
    gtc::TripletSet r = gtc::informative_triplets(g);
    std::string text;
    for (const auto& t : r) text += t.str() + "\n";
    finish(args, gtc::triplets_report(r), text, {});
    return kExitPositive;
}

int run_validate(const std::string& gene_file, const CommonArgs& args) {
    gtc::GeneTree g =
        gtc::parse_gene_tree(read_input(gene_file), load_map(args.map_file), /*validate=*/false);
    gtc::AxiomReport report = gtc::validate_axioms(g);
    std::string text;
    if (report.ok()) {
        text = "valid\n";
    } else {
        for (const auto& v : report.violations) text += v.axiom + ": " + v.detail + "\n";
    }
    finish(args, gtc::validate_report(report), text, {});
    return report.ok() ? kExitPositive : kExitNegative;
}

int run_oracle(const std::string& gene_file, int limit, int jobs, const CommonArgs& args) {
    gtc::GeneTree g = gtc::parse_gene_tree(read_input(gene_file), load_map(args.map_file));
    auto t0 = std::chrono::steady_clock::now();

    std::optional<gtc::RootedTree> found;
    if (jobs <= 1) {
        found = gtc::brute_force_solve(g, limit);
    } else {
        // Deterministic regardless of thread timing: the lowest-index hit wins.
        std::vector<gtc::RootedTree> all = gtc::all_binary_species_trees(g.species().names(), limit);
        gtc::TripletSet r = gtc::informative_triplets(g);
        std::atomic<size_t> best{all.size()};
        auto worker = [&](int tid) {
            for (size_t i = tid; i < all.size(); i += jobs) {
                if (i >= best.load()) continue;
                gtc::LcaIndex idx(all[i]);
                bool ok = true;
                for (const auto& t : r)
                    if (!gtc::displays(all[i], idx, t)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                if (gtc::has_cycle_dfs(gtc::build_aux_graph(g, all[i], gtc::lca_map(g, all[i], idx), idx)))
                    continue;
                size_t cur = best.load();
                while (i < cur && !best.compare_exchange_weak(cur, i)) {
                }
            }
        };
        std::vector<std::thread> pool;
        for (int tid = 0; tid < jobs; ++tid) pool.emplace_back(worker, tid);
        for (auto& th : pool) th.join();
        if (best.load() < all.size()) found = all[best.load()];
    }
    double oracle_ms = ms_since(t0);

    nlohmann::json report = {{"schema", gtc::kReportSchema},
                             {"command", "oracle"},
                             {"verdict", found ? "solution" : "no_solution"}};
    std::string text;
    if (found) {
        report["species_tree"] = gtc::emit_newick(*found);
        text = gtc::emit_newick(*found) + "\n";
    } else {
        text = "no time-consistent species tree exists (exhaustive search)\n";
    }
    finish(args, std::move(report), text, {{"oracle", oracle_ms}});
    return found ? kExitPositive : kExitNegative;
}

int run_gen(const gtc::InstanceGenConfig& cfg, const CommonArgs& args) {
    gtc::GeneTree g = gtc::generate_instance(cfg);
    std::string newick = gtc::emit_gene_newick(g);
    nlohmann::json report = {{"schema", gtc::kReportSchema},
                             {"command", "gen"},
                             {"newick", newick},
                             {"config",
                              {{"species", cfg.species_count},
                               {"genes", cfg.gene_count_hint},
                               {"dup", cfg.dup_rate},
                               {"hgt", cfg.hgt_rate},
                               {"loss", cfg.loss_rate},
                               {"seed", cfg.seed}}},
                             {"leaves", g.num_leaves()},
                             {"species_count", g.species().count()}};
    finish(args, std::move(report), newick + "\n", {});
    return kExitPositive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-consistent species trees for event-labeled gene trees"};
    app.require_subcommand(1);

    // solve
    std::string solve_gene, solve_start;
    bool solve_rec = false, solve_naive = false;
    std::uint64_t solve_shuffle = 0;
    CommonArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "construct a time-consistent species tree");
    solve_cmd->add_option("gene_tree", solve_gene, "gene tree file (extended Newick, - for stdin)")
        ->required();
    solve_cmd->add_option("--start-tree", solve_start,
                          "almost binary species tree to refine instead of the star");
    solve_cmd->add_flag("--emit-reconciliation", solve_rec,
                        "attach a verified reconciliation with time stamps");
    solve_cmd->add_option("--shuffle", solve_shuffle,
                          "randomize tie-breaking with this seed (0 = deterministic)");
    solve_cmd->add_flag("--naive", solve_naive, "evaluate split graphs from scratch each step");
    add_common(solve_cmd, solve_args);

    // check
    std::string check_gene, check_species;
    CommonArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "test one gene tree / species tree pair");
    check_cmd->add_option("gene_tree", check_gene)->required();
    check_cmd->add_option("species_tree", check_species)->required();
    add_common(check_cmd, check_args);

    // triplets
    std::string trip_gene;
    CommonArgs trip_args;
    auto* trip_cmd = app.add_subcommand("triplets", "print the informative species triplets");
    trip_cmd->add_option("gene_tree", trip_gene)->required();
    add_common(trip_cmd, trip_args);

    // validate
    std::string val_gene;
    CommonArgs val_args;
    auto* val_cmd = app.add_subcommand("validate", "check the observability axioms");
    val_cmd->add_option("gene_tree", val_gene)->required();
    add_common(val_cmd, val_args);

    // oracle
    std::string oracle_gene;
    int oracle_limit = 8, oracle_jobs = 1;
    CommonArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive search over binary species trees");
    oracle_cmd->add_option("gene_tree", oracle_gene)->required();
    oracle_cmd->add_option("--limit", oracle_limit, "largest species count to enumerate");
    oracle_cmd->add_option("--jobs", oracle_jobs, "parallel workers for the per-tree checks");
    add_common(oracle_cmd, oracle_args);

    // gen
    gtc::InstanceGenConfig gen_cfg;
    CommonArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "simulate a random event-labeled gene tree");
    gen_cmd->add_option("--species", gen_cfg.species_count, "species count")->required();
    gen_cmd->add_option("--genes", gen_cfg.gene_count_hint, "size hint (caps the simulation)");
    gen_cmd->add_option("--dup", gen_cfg.dup_rate, "duplication rate in [0,1]");
    gen_cmd->add_option("--hgt", gen_cfg.hgt_rate, "transfer rate in [0,1]");
    gen_cmd->add_option("--loss", gen_cfg.loss_rate, "loss rate in [0,1]");
    gen_cmd->add_option("--seed", gen_cfg.seed, "64-bit seed");
    add_common(gen_cmd, gen_args, /*with_map=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed())
            return run_solve(solve_gene, solve_start, solve_rec, solve_shuffle, solve_naive,
                             solve_args);
        if (check_cmd->parsed()) return run_check(check_gene, check_species, check_args);
        if (trip_cmd->parsed()) return run_triplets(trip_gene, trip_args);
        if (val_cmd->parsed()) return run_validate(val_gene, val_args);
        if (oracle_cmd->parsed()) return run_oracle(oracle_gene, oracle_limit, oracle_jobs, oracle_args);
        if (gen_cmd->parsed()) return run_gen(gen_cfg, gen_args);
    } catch (const gtc::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
