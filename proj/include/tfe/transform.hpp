// Coordinate changes between physical droplets, confined droplets and ball
// perturbations: the self-similar rescaling, the hodograph-type map
// z = x / sqrt(2 sqrt(v) + |x|^2) with v(x) = rho(z)^2 (1+w(z))^4 on the unit
// ball, mode amplitudes on both sides of the map, and closeness diagnostics.
#pragma once

#include "tfe/fields.hpp"
#include "tfe/linops.hpp"
#include "tfe/quadrature.hpp"
#include "tfe/spectrum.hpp"

namespace tfe::transform {

// physical u(tau, y) -> confined v(t, x); requires f.time = tau > 0
DropletField physical_to_confined(const DropletField& f, const SelfSimilarFrame& fr);
// confined v(t, x) -> physical u(tau, y); tau = exp((N+4) gamma t)
DropletField confined_to_physical(const DropletField& f, const SelfSimilarFrame& fr);

// pushforward: v((1+w(z)) z) = rho(z)^2 (1+w(z))^4; grid must stay monotone
// (requires 1 + w + z dw > 0)
DropletField w_to_v(const PerturbationField& w);

struct InverseOptions {
    double theta = 0.5;   // damping of the fixed point x <- x + theta (z s(x) - x)
    double tol = 1e-12;
    int max_iter = 200;
};

// inverse map on prescribed ball nodes; v must be confined, single-support,
// close to the stationary droplet. N=1 line or N>=2 radial.
PerturbationField v_to_w(const DropletField& v, const std::vector<double>& ball_nodes,
                         const InverseOptions& opt = {});

// uniform ball nodes for inversion/diagnostics (line: [-1,1], radial: [0,1])
std::vector<double> uniform_ball_nodes(Geometry geom, int count, double margin = 0.0);

// <psi, w>_rho for a 1-D perturbation field (line N=1 or radial with l=0),
// quadrature-exact in the eigenmode degree
double mode_amplitude_w(const PerturbationField& w, const spectrum::Eigenmode& mode);

// physical-side amplitude int (v - v_*) psi dx on the field's grid
double mode_amplitude_v(const DropletField& v, const spectrum::Eigenmode& mode);

struct Diagnostics {
    double mass = 0;
    double mass_defect = 0;          // mass - stationary mass
    double center_of_mass = 0;       // int x v dx (line geometry; 0 for radial)
    double support_lo = 0;
    double support_hi = 0;
    double lipschitz_closeness = 0;  // ||sqrt(v) - V_*||_{W^{1,inf}(supp v)}
    double slope_defect = 0;         // ||grad v + 2 x sqrt(v)||_inf
    bool perturbative = false;       // lipschitz_closeness <= 0.1 (toolkit default)
};

// smallness threshold for the perturbative regime flag (toolkit default, not sharp)
inline constexpr double kPerturbativeThreshold = 0.1;

Diagnostics diagnostics(const DropletField& v);

// constant c with int ((1+c+w)^{N+4} - 1) rho dz = 0 (mass matching for mode
// initial data); w sampled on the quadrature grid
double mass_match_constant(const spectrum::WeightedGrid& grid, const std::vector<double>& w,
                           int N);

// confined stationary droplet sampled on a grid
DropletField stationary_droplet(int N, Geometry geom, const std::vector<double>& grid);

} // namespace tfe::transform
