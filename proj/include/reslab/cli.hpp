#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reslab/schottky.hpp"
#include "reslab/zeros.hpp"

namespace reslab::cli {

inline constexpr int kSchemaVersion = 1;

enum class Experiment { Validate, Delta, ZetaScan, Resonances, CoverAbelian, Equidist, Congruence, ExplicitFormula, Cayley };

const std::vector<std::string>& experiment_names();
Experiment parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

/// One experiment run. Every field has a documented range; parse_config
/// rejects unknown keys and out-of-range values with ValidationError("cli").
struct ExperimentConfig {
    Experiment experiment = Experiment::Delta;
    nlohmann::json group = "symmetric3";  ///< preset string or schema object
    int lmax = 32;                        ///< [4, 256]
    int word_depth = 8;                   ///< [1, 20]
    std::optional<Rect> rect;             ///< experiment default when absent
    int grid = 64;                        ///< [2, 1024]
    double tol = 1e-12;                   ///< (0, 1e-2]
    int threads = 0;                      ///< [0, 256]; 0 means RESLAB_THREADS or 1
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // cover-abelian / equidist
    std::vector<int> moduli;              ///< default (2, ..., 2)
    std::vector<int> Ns{8, 16, 32, 64};
    std::optional<Rect> window;           ///< default [delta - 0.1, delta + 0.02] x [-0.05, 0.05]
    double curve_epsilon = 0.1;           ///< (0, 0.5)
    int bins = 24;                        ///< [2, 1000]

    // congruence
    std::int64_t p = 101;                 ///< odd prime > 3, below 2^31
    double beta = 1.5;                    ///< (0, 2)
    double T = 6.0;                       ///< (0, 30]
    std::vector<double> T_range{4.0, 10.0, 0.25};  ///< min, max, step

    // explicit-formula
    double epsilon = 0.5;                 ///< (0, 4]
    int J = 12;                           ///< [1, 64]
    int fn_points = 1 << 16;              ///< [16, 2^22] grid points on [-1, 1]

    // cayley
    std::vector<int> cayley_Ns{64, 128, 256, 512, 1024};
    std::vector<int> sandwich_range{5, 24};  ///< inclusive N range for the sandwich check
};

ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

/// Group from a preset string, {"preset": ...}, or
/// {"m", "discs": [{"center", "radius"}], "generators": [[[a, b], [c, d]]]}.
/// Integer-valued generator entries also give the group exact integer lifts.
SchottkyGroup build_group(const nlohmann::json& g);

struct RunResult {
    int status = 0;                    ///< 0 ok, 2 validation, 3 numerical
    std::string summary;               ///< one line
    std::vector<std::string> outputs;  ///< files written, in order
};

/// Runs the experiment, writing every output atomically under output_dir.
/// Errors are caught and mapped to a status with the module's message as
/// the summary.
RunResult run(const ExperimentConfig& c);

/// 2 for ValidationError, 3 for NumericalError and anything else.
int exit_code_for(const std::exception& e);

}  // namespace reslab::cli
