#pragma once

#include <map>
#include <string>
#include <string_view>

#include "gtc/gene_tree.hpp"
#include "gtc/tree.hpp"

namespace gtc {

// Parse failure with the 1-based line/column where it happened.
class ParseError : public input_error {
public:
    ParseError(const std::string& message, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

// Plain Newick, multifurcations allowed, unary vertices rejected. Leaf names
// are the species.
RootedTree parse_species_tree(std::string_view text);

// Extended Newick for gene trees: `[&ev=s|d|t]` names the event of an
// internal vertex, `tr=1` on a child marks the edge from its parent as a
// transfer, and leaves look like `gene@SPECIES`. An explicit gene-to-species
// map overrides the `@` suffixes.
GeneTree parse_gene_tree(std::string_view text,
                         const std::map<std::string, std::string>& species_map = {},
                         bool validate = true);

// Two-column gene/species table; '#' starts a comment.
std::map<std::string, std::string> parse_species_map(std::string_view text);

// Deterministic output: children ordered by the smallest leaf label below.
std::string emit_newick(const RootedTree& tree);
std::string emit_gene_newick(const GeneTree& g);

}  // namespace gtc
