#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kcbs/cli.hpp"
#include "kcbs/repro.hpp"

namespace fs = std::filesystem;
using kcbs::cli::CommandResult;
using kcbs::cli::json;

namespace {

struct Common {
    std::string input;
    std::string output;
    kcbs::cli::Options opt;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool needs_input = true) {
    if (needs_input) sub->add_option("-i,--input", c.input, "JSON file, or inline JSON starting with '{'")->required();
    sub->add_option("-o,--output", c.output, "output file (relative paths resolve against $KCBS_OUTPUT_DIR)");
    sub->add_option("--format", c.opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--mode", c.opt.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--tol", c.opt.tol, "float tolerance, or interval radius in exact mode");
    sub->add_option("--seed", c.seed, "seed for stochastic commands");
    sub->add_flag("--normalize", c.opt.normalize, "renormalize input vectors instead of rejecting them");
}

// Writes through a temporary file in the target directory, then renames.
void write_atomic(const std::string& name, const std::string& text) {
    fs::path path(name);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("KCBS_OUTPUT_DIR"); dir && *dir) path = fs::path(dir) / path;
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

int emit(const CommandResult& r, const Common& c) {
    const std::string text = (c.opt.format == "csv" && !r.csv.empty()) ? r.csv : r.report.dump(2) + "\n";
    if (r.exit_code == kcbs::cli::kBadInput) {
        std::cerr << "error: " << r.report.value("error", std::string("bad input")) << "\n";
    }
    if (c.output.empty()) {
        std::cout << text;
    } else {
        write_atomic(c.output, text);
    }
    return r.exit_code;
}

int repro(int only) {
    bool all = true;
    for (int id = 1; id <= kcbs::repro::kCriterionCount; ++id) {
        if (only > 0 && id != only) continue;
        const auto r = kcbs::repro::run_criterion(id);
        std::printf("%3d  %-4s  %-30s %8.2fs  %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pentagram inequality, hidden-variable certification and biphoton planning"};
    app.require_subcommand(1);
    Common c;
    std::string structure = "pentagram5";
    std::string action;
    int only = 0;

    auto* eval = app.add_subcommand("eval", "K, spin form and correlation form of a state on a pentagram");
    add_common(eval, c);
    auto* certify = app.add_subcommand("certify", "decide whether a hidden-variable model exists");
    add_common(certify, c);
    auto* cone = app.add_subcommand("cone", "enumerate the extremal rays of a context structure");
    add_common(cone, c, false);
    cone->add_option("-s,--structure", structure, "pentagram5, chsh, pair, a JSON file, or inline JSON");
    auto* expect = app.add_subcommand("expect", "expectation of a ray under a model");
    add_common(expect, c);
    auto* search = app.add_subcommand("search", "optimize a skew pentagram for a state, or scan concurrences");
    add_common(search, c);
    auto* biphoton = app.add_subcommand("biphoton", "coincidence planning and simulation");
    biphoton->add_option("action", action, "plan, simulate or sweep")->required()->check(
        CLI::IsMember({"plan", "simulate", "sweep"}));
    add_common(biphoton, c);
    auto* rep = app.add_subcommand("repro", "run the reproduction criteria and print a pass/fail table");
    rep->add_option("-c,--criterion", only, "run a single criterion")->check(CLI::Range(1, kcbs::repro::kCriterionCount));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kcbs::cli::kBadInput;
    }

    try {
        for (auto* sub : {eval, certify, cone, expect, search, biphoton}) {
            if (sub->parsed() && sub->count("--seed")) c.opt.seed = c.seed;
        }
        if (rep->parsed()) return repro(only);
        if (cone->parsed()) {
            json s = structure;
            if (structure != "pentagram5" && structure != "chsh" && structure != "pair") s = kcbs::cli::load_input(structure);
            return emit(kcbs::cli::cmd_cone(s, c.opt), c);
        }
        const json input = kcbs::cli::load_input(c.input);
        if (eval->parsed()) return emit(kcbs::cli::cmd_eval(input, c.opt), c);
        if (certify->parsed()) return emit(kcbs::cli::cmd_certify(input, c.opt), c);
        if (expect->parsed()) return emit(kcbs::cli::cmd_expect(input, c.opt), c);
        if (search->parsed()) return emit(kcbs::cli::cmd_search(input, c.opt), c);
        if (biphoton->parsed()) return emit(kcbs::cli::cmd_biphoton(action, input, c.opt), c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kcbs::cli::kBadInput;
    }
    return kcbs::cli::kFailure;
}
