// Command-line front end: validate, minimize and explore decompositions.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cadmin/cad1d.hpp"
#include "cadmin/gallery.hpp"
#include "cadmin/io.hpp"

using namespace cadmin;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string precision = "1/1099511627776";
    std::string mode = "certificate";
    std::string tolerance = "1/1048576";
    int samples = 8;
    std::string order = "deep-first";
    std::string json_path, dot_path;
    std::uint64_t seed = 1;
    bool strict = false;
};

Rational positive_rational(const std::string& text, const char* what) {
    Rational q;
    try {
        q = parse_rational(text);
    } catch (const std::exception&) {
        throw UsageError(std::string(what) + " is not a rational number: '" + text + "'");
    }
    if (q <= 0)
        throw UsageError(std::string(what) + " must be positive");
    return q;
}

LiftConfig make_config(const Options& o) {
    LiftConfig cfg;
    cfg.precision = positive_rational(o.precision, "--precision");
    cfg.tolerance = positive_rational(o.tolerance, "--tolerance");
    cfg.mode = o.mode == "sampled" ? LiftMode::Sampled : LiftMode::Certificate;
    cfg.order = o.order == "lex" ? RuleOrder::Lex : RuleOrder::DeepFirst;
    if (o.samples < 1)
        throw UsageError("--samples must be at least 1");
    cfg.boundary_samples = o.samples;
    cfg.seed = o.seed;
    cfg.strict = o.strict;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << text;
}

/// Writes to the path when given, otherwise to stdout.
void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
}

struct Input {
    Cad cad;
    LeafLabeling labels;
    std::optional<Formula> set;
};

Input load(const std::string& path, const LiftConfig& cfg) {
    CadDocument doc = parse_cad(read_file(path), cfg.precision);
    if (doc.set) {
        LeafLabeling computed = check_adapted(doc.cad, *doc.set, cfg.precision, 3, cfg.seed);
        if (doc.labels && *doc.labels != computed)
            throw NotAdapted(CellIndex(), "given labels", "labels computed from the set");
        return {doc.cad, computed, doc.set};
    }
    if (!doc.labels)
        throw UsageError("document has neither labels nor a set");
    return {doc.cad, *doc.labels, std::nullopt};
}

std::string pivots(const std::vector<RuleId>& log) {
    std::string s;
    for (const auto& r : log)
        s += (s.empty() ? "" : ", ") + r.to_string();
    return s;
}

int run_validate(const Input& in) {
    std::cout << "valid: " << leaf_count(in.cad) << " leaves, dimension " << in.cad.dim() << "\n";
    if (in.set)
        std::cout << "adapted to " << in.set->to_sexpr() << "\n";
    return exit_ok;
}

int run_minimize(const Input& in, const LiftConfig& cfg, const Options& o) {
    MinimalResult r = minimal(in.cad, in.labels, cfg);
    if (r.log.empty())
        std::cout << "fixed point: no reduction lifts\n";
    else
        std::cout << "applied: " << pivots(r.log) << "\n";
    std::cout << "leaves: " << leaf_count(r.cad) << "\n";
    const Formula* set = in.set ? &*in.set : nullptr;
    std::string doc = serialize_cad(r.cad, &r.labels, set);
    if (!o.json_path.empty())
        write_file(o.json_path, doc);
    else
        std::cout << doc;
    if (!o.dot_path.empty())
        write_file(o.dot_path, tree_to_dot(build_tree(r.cad, r.labels)));
    return exit_ok;
}

PosetGraph run_explore_graph(const Input& in, const LiftConfig& cfg, const Options& o) {
    PosetGraph g = explore(in.cad, in.labels, cfg);
    if (!o.dot_path.empty())
        write_file(o.dot_path, poset_to_dot(g));
    return g;
}

int run_explore(const Input& in, const LiftConfig& cfg, const Options& o) {
    PosetGraph g = run_explore_graph(in, cfg, o);
    emit(o.json_path, poset_report(g));
    return exit_ok;
}

int run_confluence(const Input& in, const LiftConfig& cfg, const Options& o) {
    PosetGraph g = run_explore_graph(in, cfg, o);
    bool confluent = is_locally_confluent(g);
    auto sinks = minimal_elements(g);
    auto least = minimum(g);
    std::cout << "nodes: " << g.nodes.size() << "\nedges: " << g.edges.size() << "\nminimal:";
    for (auto s : sinks)
        std::cout << " #" << s << " (" << g.nodes[s].blocks.size() << " leaves)";
    std::cout << "\nminimum: " << (least ? "#" + std::to_string(*least) : std::string("none"))
              << "\nconfluent: " << (confluent ? "true" : "false") << "\n";
    if (!o.json_path.empty())
        write_file(o.json_path, poset_report(g));
    return confluent ? exit_ok : exit_check;
}

int run_cad1d(const std::string& set_text, const Options& o) {
    Formula set = parse_formula(set_text);
    Cad1dResult r = minimum_cad_1d(set);
    emit(o.json_path, serialize_cad(r.cad, &r.labels, &set));
    return exit_ok;
}

int run_dot_tree(const Input& in, const Options& o) {
    emit(o.dot_path, tree_to_dot(build_tree(in.cad, in.labels)));
    return exit_ok;
}

int run_dot_poset(const Input& in, const LiftConfig& cfg, const Options& o) {
    emit(o.dot_path, poset_to_dot(explore(in.cad, in.labels, cfg)));
    return exit_ok;
}

struct GalleryActions {
    std::string name;
    bool list = false, validate = false, minimize = false, explore = false, confluence = false, export_json = false;
    std::string dot_tree, dot_poset;
};

int run_gallery(const GalleryActions& a, const LiftConfig& cfg, const Options& o) {
    if (a.list || a.name.empty()) {
        for (const auto& n : gallery_names())
            std::cout << n << "\n";
        return exit_ok;
    }
    auto names = gallery_names();
    if (std::find(names.begin(), names.end(), a.name) == names.end())
        throw UsageError("unknown gallery entry '" + a.name + "'");
    GalleryEntry e = gallery_entry(a.name);
    Input in{e.cad, e.labels, e.set};
    std::cout << e.name << ": " << e.description << "\n";
    int status = exit_ok;
    bool acted = false;
    if (a.export_json) {
        acted = true;
        emit(o.json_path, serialize_cad(e.cad, &e.labels, &e.set));
    }
    if (a.validate) {
        acted = true;
        auto bad = check_expected(e, cfg);
        for (const auto& b : bad)
            std::cout << "mismatch: " << b << "\n";
        std::cout << (bad.empty() ? "expected facts hold\n" : "expected facts violated\n");
        if (!bad.empty())
            status = exit_check;
    }
    if (a.minimize) {
        acted = true;
        MinimalResult r = minimal(e.cad, e.labels, cfg);
        if (r.log.empty())
            std::cout << "fixed point: no reduction lifts\n";
        else
            std::cout << "applied: " << pivots(r.log) << "\n";
        std::cout << "leaves: " << leaf_count(r.cad) << "\n";
        if (!o.json_path.empty() && !a.export_json)
            write_file(o.json_path, serialize_cad(r.cad, &r.labels, &e.set));
    }
    if (!a.dot_tree.empty()) {
        acted = true;
        write_file(a.dot_tree, tree_to_dot(build_tree(e.cad, e.labels)));
    }
    if (a.explore || a.confluence || !a.dot_poset.empty()) {
        acted = true;
        PosetGraph g = explore(e.cad, e.labels, cfg);
        if (!a.dot_poset.empty())
            write_file(a.dot_poset, poset_to_dot(g));
        auto least = minimum(g);
        bool confluent = is_locally_confluent(g);
        std::cout << "nodes: " << g.nodes.size() << "\nedges: " << g.edges.size()
                  << "\nminimal elements: " << minimal_elements(g).size()
                  << "\nminimum: " << (least ? "#" + std::to_string(*least) : std::string("none"))
                  << "\nconfluent: " << (confluent ? "true" : "false") << "\n";
        if (!o.json_path.empty() && !a.export_json && !a.minimize)
            write_file(o.json_path, poset_report(g));
        if (a.confluence && !confluent)
            status = exit_check;
    }
    if (!acted)
        std::cout << "leaves: " << leaf_count(e.cad) << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimize cylindrical algebraic decompositions adapted to a semi-algebraic set"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--precision", o.precision, "Evaluation precision as a rational")->capture_default_str();
    app.add_option("--mode", o.mode, "Lift evidence: certificate or sampled")
        ->check(CLI::IsMember({"certificate", "sampled"}))
        ->capture_default_str();
    app.add_option("--tolerance", o.tolerance, "Largest jump accepted as continuous")->capture_default_str();
    app.add_option("--samples", o.samples, "Probe points per check")->capture_default_str();
    app.add_option("--order", o.order, "Rule attempt order: lex or deep-first")
        ->check(CLI::IsMember({"lex", "deep-first"}))
        ->capture_default_str();
    app.add_option("--json", o.json_path, "Write the JSON output to this path");
    app.add_option("--dot", o.dot_path, "Write the DOT output to this path");
    app.add_option("--seed", o.seed, "Seed for random probes")->capture_default_str();
    app.add_flag("--strict", o.strict, "Fail on inconclusive lift evidence");

    std::string path, set_text;
    auto file_command = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("file", path, "CAD document (JSON)")->required();
        sub->fallthrough();
        return sub;
    };
    auto* validate = file_command("validate", "Check a CAD document");
    auto* minimize = file_command("minimize", "Reduce until no rule lifts");
    auto* explore_cmd = file_command("explore", "Enumerate the poset of reachable coarsenings");
    auto* confluence = file_command("confluence", "Report minimal elements and confluence");
    auto* dot_tree = file_command("dot-tree", "Emit the labelled CAD tree as DOT");
    auto* dot_poset = file_command("dot-poset", "Emit the reduction poset as DOT");
    auto* cad1d = app.add_subcommand("cad1d", "Minimum CAD of the line adapted to a set");
    cad1d->add_option("--set", set_text, "Univariate formula (s-expression in x1)")->required();
    cad1d->fallthrough();

    GalleryActions ga;
    auto* gallery = app.add_subcommand("gallery", "Built-in examples");
    gallery->add_option("name", ga.name, "Entry name; omit to list");
    gallery->add_flag("--list", ga.list, "List entry names");
    gallery->add_flag("--validate", ga.validate, "Check the entry's expected facts");
    gallery->add_flag("--minimize", ga.minimize, "Reduce until no rule lifts");
    gallery->add_flag("--explore", ga.explore, "Enumerate the poset");
    gallery->add_flag("--confluence", ga.confluence, "Exit 1 when the poset is not confluent");
    gallery->add_flag("--export", ga.export_json, "Print the entry as a CAD document");
    gallery->add_option("--dot-tree", ga.dot_tree, "Write the CAD tree as DOT");
    gallery->add_option("--dot-poset", ga.dot_poset, "Write the poset as DOT");
    gallery->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        LiftConfig cfg = make_config(o);
        if (*cad1d)
            return run_cad1d(set_text, o);
        if (*gallery)
            return run_gallery(ga, cfg, o);
        Input in = load(path, cfg);
        if (*validate)
            return run_validate(in);
        if (*minimize)
            return run_minimize(in, cfg, o);
        if (*explore_cmd)
            return run_explore(in, cfg, o);
        if (*confluence)
            return run_confluence(in, cfg, o);
        if (*dot_tree)
            return run_dot_tree(in, o);
        if (*dot_poset)
            return run_dot_poset(in, cfg, o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    }
    return exit_usage;
}
