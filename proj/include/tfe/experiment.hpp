// Reproducible experiment bundles: a JSON spec describes a run (initial data,
// solver, observable, fit window, target rate), run_experiment simulates,
// projects, fits and emits a deterministic pass/fail JSON report.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfe/simulator.hpp"

namespace tfe::experiment {

struct ModeRef {
    int l = 0;
    int n = 1;
    int k = 0;
};

struct Observable {
    std::string type = "mode_w";       // com | mode_w | rho_norm
    ModeRef mode;                      // projection mode for mode_w
    std::string relative_to = "vstar"; // vstar | terminal
    int nodes = 1024;                  // ball nodes for the inverse map
};

struct InitSpec {
    std::string type = "stationary"; // stationary | shift | dilate | mode | file
    double b = 0;
    double lambda = 1;
    ModeRef mode;
    double amp = 0;
    std::string path;
};

struct ExperimentSpec {
    std::string name;
    int dim = 1;
    std::string kind = "nonlinear"; // nonlinear | linear
    std::int64_t seed = 0;
    InitSpec init;
    simulator::SolverConfig solver;
    double T = 1.0;
    double snap_every = 0.02;
    Observable observable;
    simulator::RateWindow window;
    int target_l = 1;
    int target_k = 0;
    double tolerance_pct = 10.0;
    double r2_min = 0.0;
    std::vector<std::string> caveats;
    std::vector<std::pair<ModeRef, double>> linear_modes; // kind == linear
};

// parse/validate; throws std::runtime_error on malformed specs or when a
// declared target.mu contradicts the exact mu_of(l,k,N)
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::string& path);

// observable time series over a trajectory (com uses the dense per-step
// series; mode_w / rho_norm evaluate snapshots through the ball inverse map)
std::pair<std::vector<double>, std::vector<double>> observable_series(
    const simulator::Trajectory& traj, const Observable& obs, int dim);

struct ExperimentResult {
    nlohmann::json report;
    bool pass = false;
};

// run one spec; if out_dir is nonempty writes <out_dir>/<name>.report.json
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir = "");

// run many spec files (jobs in parallel), print one summary line each;
// returns a process exit code: 0 iff every report passes
int run_experiments(const std::vector<std::string>& spec_paths, const std::string& out_dir,
                    int jobs);

// trajectory directory IO (written by the simulate subcommand)
void save_trajectory(const std::string& dir, const simulator::Trajectory& traj, int dim,
                     const nlohmann::json& provenance);
simulator::Trajectory load_trajectory(const std::string& dir, int* dim = nullptr);

} // namespace tfe::experiment
