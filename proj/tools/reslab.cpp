// Command-line front end: one subcommand per experiment. A JSON config file
// supplies the base settings and flags override individual keys.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reslab/cli.hpp"
#include "reslab/error.hpp"

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string preset, group_file, rect, window, output_dir;
    int lmax = 0, word_depth = 0, grid = 0, threads = -1, bins = 0, J = 0, fn_points = 0;
    long long p = 0;
    double tol = 0, beta = 0, T = 0, epsilon = 0, curve_epsilon = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<int> moduli, Ns, cayley_Ns, sandwich_range;
    std::vector<double> T_range;
};

void add_options(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--preset", f.preset, "group preset, e.g. symmetric3, cylinder(3), sl2z-pair");
    sub->add_option("--group-file", f.group_file, "JSON file with a group object");
    sub->add_option("--lmax", f.lmax, "polynomial degree per disc [4, 256]");
    sub->add_option("--word-depth", f.word_depth, "word length for geodesic tables [1, 20]");
    sub->add_option("--rect", f.rect, "re_min,re_max,im_min,im_max");
    sub->add_option("--window", f.window, "re_min,re_max,im_min,im_max");
    sub->add_option("--grid", f.grid, "grid points per axis [2, 1024]");
    sub->add_option("--tol", f.tol, "root tolerance (0, 1e-2]");
    sub->add_option("--threads", f.threads, "worker threads; 0 uses RESLAB_THREADS");
    sub->add_option_function<std::uint64_t>("--seed", [&f](const std::uint64_t& v) {
        f.seed = v;
        f.seed_set = true;
    }, "random seed");
    sub->add_option("--out", f.output_dir, "output directory");
    sub->add_option("--moduli", f.moduli, "abelian quotient moduli")->delimiter(',');
    sub->add_option("--Ns", f.Ns, "quotient orders for equidist")->delimiter(',');
    sub->add_option("--curve-epsilon", f.curve_epsilon, "implicit curve box half-width");
    sub->add_option("--bins", f.bins, "histogram bins");
    sub->add_option("--p", f.p, "prime for congruence");
    sub->add_option("--beta", f.beta, "length cutoff beta log p");
    sub->add_option("--T", f.T, "length cutoff for the character average");
    sub->add_option("--T-range", f.T_range, "min,max,step for growth fits")->delimiter(',');
    sub->add_option("--epsilon", f.epsilon, "test function width exponent");
    sub->add_option("--J", f.J, "number of boxes in the test function");
    sub->add_option("--fn-points", f.fn_points, "test function grid points");
    sub->add_option("--cayley-Ns", f.cayley_Ns, "cycle orders for the gap table")->delimiter(',');
    sub->add_option("--sandwich-range", f.sandwich_range, "min,max cycle order for the sandwich check")
        ->delimiter(',');
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw reslab::ValidationError("cli", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw reslab::ValidationError("cli", path + ": " + e.what());
    }
}

json merged_config(const std::string& experiment, const Flags& f) {
    json j = f.config.empty() ? json::object() : load_json_file(f.config);
    if (!j.is_object()) throw reslab::ValidationError("cli", "config file must hold a JSON object");
    if (j.contains("experiment") && j["experiment"] != experiment) {
        throw reslab::ValidationError("cli", "config experiment '" + j["experiment"].dump() +
                                                 "' differs from subcommand '" + experiment + "'");
    }
    j["experiment"] = experiment;
    if (!f.preset.empty() && !f.group_file.empty()) {
        throw reslab::ValidationError("cli", "--preset and --group-file are exclusive");
    }
    if (!f.preset.empty()) j["group"] = f.preset;
    if (!f.group_file.empty()) j["group"] = load_json_file(f.group_file);
    if (f.lmax) j["lmax"] = f.lmax;
    if (f.word_depth) j["word_depth"] = f.word_depth;
    if (!f.rect.empty()) j["rect"] = f.rect;
    if (!f.window.empty()) j["window"] = f.window;
    if (f.grid) j["grid"] = f.grid;
    if (f.tol != 0) j["tol"] = f.tol;
    if (f.threads >= 0) j["threads"] = f.threads;
    if (f.seed_set) j["seed"] = f.seed;
    if (!f.output_dir.empty()) j["output_dir"] = f.output_dir;
    if (!f.moduli.empty()) j["moduli"] = f.moduli;
    if (!f.Ns.empty()) j["Ns"] = f.Ns;
    if (f.curve_epsilon != 0) j["curve_epsilon"] = f.curve_epsilon;
    if (f.bins) j["bins"] = f.bins;
    if (f.p) j["p"] = f.p;
    if (f.beta != 0) j["beta"] = f.beta;
    if (f.T != 0) j["T"] = f.T;
    if (!f.T_range.empty()) j["T_range"] = f.T_range;
    if (f.epsilon != 0) j["epsilon"] = f.epsilon;
    if (f.J) j["J"] = f.J;
    if (f.fn_points) j["fn_points"] = f.fn_points;
    if (!f.cayley_Ns.empty()) j["cayley_Ns"] = f.cayley_Ns;
    if (!f.sandwich_range.empty()) j["sandwich_range"] = f.sandwich_range;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonances of Schottky surfaces and their covers"};
    app.require_subcommand(1);
    app.allow_windows_style_options(false);
    Flags flags;
    for (const auto& name : reslab::cli::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_options(sub, flags);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }
    const std::string experiment = app.get_subcommands().front()->get_name();
    try {
        const reslab::cli::ExperimentConfig cfg = reslab::cli::parse_config(merged_config(experiment, flags));
        const reslab::cli::RunResult res = reslab::cli::run(cfg);
        (res.status == 0 ? std::cout : std::cerr) << res.summary << "\n";
        return res.status;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return reslab::cli::exit_code_for(e);
    }
}
