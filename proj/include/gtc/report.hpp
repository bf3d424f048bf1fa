#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "gtc/aux_graph.hpp"
#include "gtc/gene_tree.hpp"
#include "gtc/reconciliation.hpp"
#include "gtc/solver.hpp"

namespace gtc {

// Machine-readable reports, schema version 1. Keys are emitted in sorted
// order and no wall-clock data is included unless explicitly attached, so
// identical inputs produce byte-identical documents.
inline constexpr int kReportSchema = 1;

nlohmann::json solve_report(const GeneTree& g, const SolveResult& result,
                            const std::optional<Reconciliation>& reconciliation);
nlohmann::json check_report(const GeneTree& g, const RootedTree& s, const PairVerdict& verdict);
nlohmann::json validate_report(const AxiomReport& report);
nlohmann::json triplets_report(const TripletSet& r);
nlohmann::json reconciliation_json(const GeneTree& g, const RootedTree& s, const Reconciliation& r);

std::string render_report(const nlohmann::json& report);

}  // namespace gtc
