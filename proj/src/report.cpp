#include "gtc/report.hpp"

#include "gtc/newick.hpp"

namespace gtc {

namespace {

nlohmann::json trace_json(const SolveTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const SolveStep& s : trace.steps)
        steps.push_back({{"cherry", s.cherry},
                         {"part_a", s.part_a},
                         {"part_b", s.part_b},
                         {"member_set_size", s.member_set_size}});
    return {{"initial_member_set", trace.initial_member_set},
            {"refinements", trace.steps.size()},
            {"steps", std::move(steps)}};
}

nlohmann::json triplet_list(const TripletSet& r) {
    nlohmann::json out = nlohmann::json::array();
    for (const Triplet& t : r) out.push_back(t.str());
    return out;
}

}  // namespace

nlohmann::json reconciliation_json(const GeneTree& g, const RootedTree& s, const Reconciliation& r) {
    const RootedTree& t = g.tree();
    nlohmann::json genes = nlohmann::json::array();
    for (VertexId v = 0; v < t.size(); ++v) {
        nlohmann::json entry = {
            {"vertex", v},
            {"event", std::string(1, event_code(g.event(v)))},
            {"maps_to", position_str(s, r.mu[v])},
            {"time", r.tau_gene[v]},
        };
        if (t.is_leaf(v)) entry["gene"] = t.label(v);
        genes.push_back(std::move(entry));
    }
    nlohmann::json species = nlohmann::json::array();
    for (VertexId x = 0; x < s.size(); ++x)
        species.push_back({{"vertex", x},
                           {"name", position_str(s, {x, false})},
                           {"time", r.tau_species[x]}});
    return {{"gene_vertices", std::move(genes)}, {"species_vertices", std::move(species)}};
}

nlohmann::json solve_report(const GeneTree& g, const SolveResult& result,
                            const std::optional<Reconciliation>& reconciliation) {
    nlohmann::json report = {
        {"schema", kReportSchema},
        {"command", "solve"},
        {"verdict", result.solved() ? "solution" : "no_solution"},
        {"trace", trace_json(result.trace)},
        {"outcome", result.trace.outcome},
    };
    if (result.solved()) {
        report["species_tree"] = emit_newick(*result.species_tree);
        if (reconciliation)
            report["reconciliation"] = reconciliation_json(g, *result.species_tree, *reconciliation);
    } else {
        report["certificates"] = {{"final_tree", emit_newick(result.final_tree)}};
    }
    return report;
}

nlohmann::json check_report(const GeneTree& g, const RootedTree& s, const PairVerdict& verdict) {
    (void)g;
    nlohmann::json report = {
        {"schema", kReportSchema},
        {"command", "check"},
        {"species_tree", emit_newick(s)},
    };
    switch (verdict.kind) {
        case PairVerdict::Kind::consistent:
            report["verdict"] = "consistent";
            break;
        case PairVerdict::Kind::missing_triplets:
            report["verdict"] = "inconsistent_pair";
            report["certificates"] = {{"missing_triplets", triplet_list(verdict.missing)}};
            break;
        case PairVerdict::Kind::cyclic:
            report["verdict"] = "inconsistent_pair";
            report["certificates"] = {{"cycle", verdict.cycle}};
            break;
    }
    return report;
}

nlohmann::json validate_report(const AxiomReport& report) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"axiom", v.axiom}, {"vertex", v.vertex}, {"detail", v.detail}});
    return {{"schema", kReportSchema},
            {"command", "validate"},
            {"verdict", report.ok() ? "valid" : "invalid"},
            {"violations", std::move(violations)}};
}

nlohmann::json triplets_report(const TripletSet& r) {
    return {{"schema", kReportSchema},
            {"command", "triplets"},
            {"count", r.size()},
            {"triplets", triplet_list(r)}};
}

std::string render_report(const nlohmann::json& report) {
    return report.dump(2) + "\n";
}

}  // namespace gtc
