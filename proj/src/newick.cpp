#include "gtc/newick.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace gtc {

ParseError::ParseError(const std::string& message, int line, int column)
    : input_error(message + " (line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

namespace {

struct Annotations {
    std::string ev;    // "", "s", "d", "t"
    bool transfer = false;
};

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    char take() {
        char c = peek();
        if (!eof()) {
            ++pos_;
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
        return c;
    }

    void skip_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r'))
            take();
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "' but found " + describe(), line_, col_);
        take();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message + " at " + describe(), line_, col_);
    }

    std::string name() {
        static constexpr std::string_view kStop = "(),;[]=: \t\n\r";
        std::string out;
        while (!eof() && kStop.find(peek()) == std::string_view::npos) out += take();
        if (out.empty()) fail("expected a name");
        if (peek() == ':') fail("branch lengths are not supported");
        return out;
    }

    // `[&key=value,...]`; unknown keys are errors for gene trees, ignored for
    // species trees.
    Annotations annotations(bool strict) {
        Annotations a;
        if (peek() != '[') return a;
        take();
        if (peek() == '&') take();
        for (;;) {
            skip_space();
            std::string key = name();
            skip_space();
            expect('=');
            skip_space();
            std::string value = name();
            if (key == "ev") {
                if (value != "s" && value != "d" && value != "t")
                    fail("unknown event code '" + value + "'");
                a.ev = value;
            } else if (key == "tr") {
                if (value != "0" && value != "1") fail("transfer flag must be 0 or 1");
                a.transfer = value == "1";
            } else if (strict) {
                fail("unknown annotation key '" + key + "'");
            }
            skip_space();
            if (peek() == ',') {
                take();
                continue;
            }
            expect(']');
            return a;
        }
    }

private:
    std::string describe() const {
        if (eof()) return "end of input";
        return std::string("'") + peek() + "'";
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

struct GeneParseState {
    TreeBuilder builder;
    std::vector<Event> events;
    std::vector<char> transfer_flag;
    std::map<std::string, std::string> sigma;
};

// Species trees: names on leaves, everything else ignored.
VertexId parse_species_subtree(Cursor& cur, TreeBuilder& b, VertexId parent) {
    cur.skip_space();
    if (cur.peek() == '(') {
        cur.take();
        VertexId v = parent == kNoVertex ? b.add_root() : b.add_internal(parent);
        int arity = 0;
        for (;;) {
            parse_species_subtree(cur, b, v);
            ++arity;
            cur.skip_space();
            if (cur.peek() == ',') {
                cur.take();
                continue;
            }
            break;
        }
        cur.expect(')');
        cur.skip_space();
        if (cur.peek() != '(' && cur.peek() != ')' && cur.peek() != ',' && cur.peek() != ';' &&
            cur.peek() != '[' && !cur.eof())
            cur.name();  // internal label, ignored
        cur.skip_space();
        cur.annotations(/*strict=*/false);
        if (arity < 2) cur.fail("unary vertex (suppressed form expected)");
        return v;
    }
    std::string label = cur.name();
    cur.skip_space();
    cur.annotations(/*strict=*/false);
    return parent == kNoVertex ? b.add_root_leaf(std::move(label)) : b.add_leaf(parent, std::move(label));
}

VertexId parse_gene_subtree(Cursor& cur, GeneParseState& st,
                            const std::map<std::string, std::string>& species_map, VertexId parent) {
    cur.skip_space();
    if (cur.peek() == '(') {
        cur.take();
        VertexId v = parent == kNoVertex ? st.builder.add_root() : st.builder.add_internal(parent);
        st.events.push_back(Event::speciation);  // placeholder until the annotation
        st.transfer_flag.push_back(0);
        for (;;) {
            parse_gene_subtree(cur, st, species_map, v);
            cur.skip_space();
            if (cur.peek() == ',') {
                cur.take();
                continue;
            }
            break;
        }
        cur.expect(')');
        cur.skip_space();
        Annotations a = cur.annotations(/*strict=*/true);
        if (a.ev.empty()) cur.fail("internal vertex without an event annotation [&ev=s|d|t]");
        st.events[v] = a.ev == "s"   ? Event::speciation
                       : a.ev == "d" ? Event::duplication
                                     : Event::transfer;
        st.transfer_flag[v] = a.transfer ? 1 : 0;
        return v;
    }
    std::string raw = cur.name();
    cur.skip_space();
    Annotations a = cur.annotations(/*strict=*/true);
    if (!a.ev.empty()) cur.fail("leaves carry no event annotation");
    std::string gene = raw, species;
    if (auto at = raw.find('@'); at != std::string::npos) {
        gene = raw.substr(0, at);
        species = raw.substr(at + 1);
        if (gene.empty() || species.empty()) cur.fail("malformed leaf '" + raw + "'");
    }
    if (auto it = species_map.find(gene); it != species_map.end()) species = it->second;
    if (species.empty()) cur.fail("leaf '" + gene + "' has no species (use gene@SPECIES or a map)");
    st.sigma[gene] = species;
    VertexId v = parent == kNoVertex ? st.builder.add_root_leaf(gene)
                                     : st.builder.add_leaf(parent, gene);
    st.events.push_back(Event::leaf);
    st.transfer_flag.push_back(a.transfer ? 1 : 0);
    return v;
}

}  // namespace

RootedTree parse_species_tree(std::string_view text) {
    Cursor cur(text);
    TreeBuilder b;
    parse_species_subtree(cur, b, kNoVertex);
    cur.skip_space();
    cur.expect(';');
    cur.skip_space();
    if (!cur.eof()) cur.fail("trailing characters after ';'");
    return std::move(b).build();
}

GeneTree parse_gene_tree(std::string_view text, const std::map<std::string, std::string>& species_map,
                         bool validate) {
    Cursor cur(text);
    GeneParseState st;
    parse_gene_subtree(cur, st, species_map, kNoVertex);
    cur.skip_space();
    cur.expect(';');
    cur.skip_space();
    if (!cur.eof()) cur.fail("trailing characters after ';'");
    GeneTree g(std::move(st.builder).build(), std::move(st.events), std::move(st.transfer_flag),
               st.sigma);
    if (validate) {
        AxiomReport report = validate_axioms(g);
        if (!report.ok()) {
            std::string msg = "gene tree violates the observability axioms:";
            for (const auto& v : report.violations) msg += "\n  " + v.axiom + ": " + v.detail;
            throw input_error(msg);
        }
    }
    return g;
}

std::map<std::string, std::string> parse_species_map(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::string gene, species, extra;
        if (!(fields >> gene)) continue;
        if (!(fields >> species) || (fields >> extra))
            throw ParseError("species map rows need exactly two columns", lineno, 1);
        out[gene] = species;
    }
    return out;
}

namespace {

void min_label_below(const RootedTree& t, std::vector<std::string>& out) {
    out.assign(t.size(), "");
    for (VertexId v : t.postorder()) {
        if (t.is_leaf(v)) {
            out[v] = t.label(v);
            continue;
        }
        for (VertexId c : t.children(v))
            if (out[v].empty() || out[c] < out[v]) out[v] = out[c];
    }
}

void emit_subtree(const RootedTree& t, const std::vector<std::string>& min_label,
                  const GeneTree* g, VertexId v, std::string& out) {
    if (t.is_leaf(v)) {
        out += t.label(v);
        if (g) {
            out += '@';
            out += g->species_name_of(v);
            if (g->is_transfer_edge_to(v)) out += "[&tr=1]";
        }
        return;
    }
    std::vector<VertexId> order = t.children(v);
    std::sort(order.begin(), order.end(),
              [&](VertexId a, VertexId b) { return min_label[a] < min_label[b]; });
    out += '(';
    for (size_t i = 0; i < order.size(); ++i) {
        if (i) out += ',';
        emit_subtree(t, min_label, g, order[i], out);
    }
    out += ')';
    if (g) {
        out += "[&ev=";
        out += event_code(g->event(v));
        if (g->is_transfer_edge_to(v)) out += ",tr=1";
        out += ']';
    }
}

}  // namespace

std::string emit_newick(const RootedTree& tree) {
    std::vector<std::string> min_label;
    min_label_below(tree, min_label);
    std::string out;
    emit_subtree(tree, min_label, nullptr, tree.root(), out);
    out += ';';
    return out;
}

std::string emit_gene_newick(const GeneTree& g) {
    std::vector<std::string> min_label;
    min_label_below(g.tree(), min_label);
    std::string out;
    emit_subtree(g.tree(), min_label, &g, g.tree().root(), out);
    out += ';';
    return out;
}

}  // namespace gtc
