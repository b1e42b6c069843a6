// Time integration of the confined thin film equation
//   dv/dt + div(v grad Lap v) - gamma div(x v) = 0,   gamma = 2(N+2),
// as a conservative implicit finite-difference scheme (N=1 full line,
// N>=2 radial), exact linear evolution in the eigenbasis, and log-linear
// decay-rate measurement.
#pragma once

#include <vector>

#include "tfe/fields.hpp"
#include "tfe/linops.hpp"
#include "tfe/spectrum.hpp"

namespace tfe::simulator {

struct SolverConfig {
    int dim = 1;
    double xmax = 1.5;        // domain [-xmax, xmax] (line) or [0, xmax] (radial)
    double h = 1.0 / 256;
    double dt = 1e-4;         // target step; steps are clipped to snapshot times
    double newton_tol = 1e-13;
    int max_newton = 16;
};

// gamma = 2(N+2)
double gamma_of(int dim);
transform::Geometry geometry_of(int dim);

// cell-centered grid: x_i = -X + (i+1/2)h (line), r_i = (i+1/2)h (radial)
std::vector<double> make_grid(const SolverConfig& cfg);

// quadrature-free discrete functionals matched to the scheme (midpoint sums)
double discrete_mass(const transform::DropletField& v);
double discrete_com(const transform::DropletField& v);

// initial data on the solver grid
transform::DropletField init_stationary(const SolverConfig& cfg);
transform::DropletField init_shift(const SolverConfig& cfg, double b);          // N=1 only
transform::DropletField init_dilate(const SolverConfig& cfg, double lambda);    // mass-preserving
// v built from w = amp psi_{l,n,k} + mass-matching constant via the ball map
transform::DropletField init_mode(const SolverConfig& cfg, int l, int n, int k, double amp);
// sqrt(v)-spline resampling onto the solver grid (zero outside the support)
transform::DropletField resample_to_grid(const transform::DropletField& v,
                                         const SolverConfig& cfg);

// one implicit Euler step; throws on Newton failure (reduce dt)
transform::DropletField step_confined(const transform::DropletField& v, double dt,
                                      const SolverConfig& cfg);

struct Trajectory {
    std::vector<double> times;                        // snapshot times
    std::vector<transform::DropletField> snapshots;
    std::vector<double> step_times;                   // after every accepted step
    std::vector<double> step_mass;
    std::vector<double> step_com;
};

// march to T with steps of cfg.dt clipped to the requested output times;
// a failing Newton solve retries the step with halved dt (up to 8 times).
// output_times are augmented with 0 and T, sorted, deduplicated.
Trajectory evolve(const transform::DropletField& v0, double T, const SolverConfig& cfg,
                  std::vector<double> output_times = {});

// finite eigenmode expansion; coefficients evolve exactly by e^{-mu t}
struct LinearCoefficients {
    std::vector<spectrum::Eigenmode> modes;
    std::vector<double> coeffs;
};

// coefficient trajectory, one row per time
std::vector<std::vector<double>> evolve_linear(const LinearCoefficients& w0,
                                               const std::vector<double>& times);

struct RateWindow {
    double t_min = 0;
    double t_max = 1e300;
    double amp_min = 1e-9;   // fit only where |amplitude| is in [amp_min, amp_max]
    double amp_max = 1e-2;
};

struct RateReport {
    double exponent = 0;   // decay rate (minus the log-linear slope)
    double r_squared = 0;
    int samples = 0;
    double t_lo = 0;       // actual fitted time range
    double t_hi = 0;
};

// least squares on (t, log|amplitude|) inside the window; samples below the
// 1e-12 noise floor are dropped; throws if fewer than 4 samples remain
RateReport measure_rate(const std::vector<double>& times, const std::vector<double>& amps,
                        const RateWindow& window = {});

} // namespace tfe::simulator
