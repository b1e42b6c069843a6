// Confined-frame finite-volume solver: grids, prepared initial data, mass and
// center-of-mass bookkeeping, nonlinear relaxation toward the stationary
// droplet, the exact linearized semigroup, and rate extraction.
//
// Reference values and rates used below:
//   stationary mass      2|B_1|/((N+2)(N+4)):  4/15 (N=1), pi/12 (N=2),
//                        8 pi/105 (N=3)
//   shifted droplet      v(t,x) = v_*((x - b e^{-6t})^2) solves the N=1
//                        confined flow exactly (gamma = 6 pulls the center in
//                        at the bottom-eigenvalue rate), so translates make a
//                        closed-form accuracy target
//   center of mass       integral x v dx = b M against the same exact decay
//   slowest rates        mu = 6 (translate, N=1), mu = 30 (dilation, N=1)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tfe/simulator.hpp"
#include "tfe/spectrum.hpp"
#include "tfe/transform.hpp"

using namespace tfe;
using namespace tfe::simulator;
using transform::DropletField;
using transform::Geometry;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMass1 = 4.0 / 15.0;

double sup_dev_from_stationary(const DropletField& f) {
    double e = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        e = std::max(e, std::abs(f.values[i] - transform::v_star(f.grid[i] * f.grid[i])));
    return e;
}

double sup_dev_from_shift(const DropletField& f, double b) {
    double e = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        double y = f.grid[i] - b;
        e = std::max(e, std::abs(f.values[i] - transform::v_star(y * y)));
    }
    return e;
}

double max_mass_drift(const Trajectory& traj, double m0) {
    double d = 0;
    for (double m : traj.step_mass) d = std::max(d, std::abs(m - m0));
    return d;
}

} // namespace

TEST_CASE("cell-centered grids carry the confined droplet functionals") {
    CHECK(gamma_of(1) == 6.0);
    CHECK(gamma_of(2) == 8.0);
    CHECK(gamma_of(3) == 10.0);
    CHECK(geometry_of(1) == Geometry::line);
    CHECK(geometry_of(2) == Geometry::radial);
    CHECK(geometry_of(3) == Geometry::radial);

    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 64;
    auto x = make_grid(cfg);
    REQUIRE(x.size() == 192); // 2 * 1.5 * 64 cells
    CHECK(x.front() == doctest::Approx(-1.5 + 0.5 / 64).epsilon(1e-15));
    CHECK(x.back() == doctest::Approx(1.5 - 0.5 / 64).epsilon(1e-15));
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        CHECK(x[i + 1] - x[i] == doctest::Approx(1.0 / 64).epsilon(1e-12));

    SolverConfig rcfg;
    rcfg.dim = 2;
    rcfg.h = 1.0 / 64;
    auto r = make_grid(rcfg);
    REQUIRE(r.size() == 96); // [0, 1.5], first center at h/2
    CHECK(r.front() == doctest::Approx(0.5 / 64).epsilon(1e-15));

    SolverConfig bad = cfg;
    bad.h = 0;
    CHECK_THROWS_AS(make_grid(bad), std::invalid_argument);
    bad = cfg;
    bad.xmax = 0.9; // domain must contain the unit-ball support
    CHECK_THROWS_AS(make_grid(bad), std::invalid_argument);
    bad = cfg;
    bad.h = 0.5; // six cells only
    CHECK_THROWS_AS(make_grid(bad), std::invalid_argument);

    // midpoint-rule mass of the quartic droplet against the closed forms
    double exact[4] = {0, kMass1, kPi / 12.0, 8 * kPi / 105.0};
    double tol[4] = {0, 1e-10, 5e-6, 1e-9};
    for (int N = 1; N <= 3; ++N) {
        SolverConfig c;
        c.dim = N;
        c.h = 1.0 / 256;
        auto v = init_stationary(c);
        CHECK(std::abs(discrete_mass(v) - exact[N]) <= tol[N]);
    }

    // discrete center of mass: b M for a shifted droplet, identically 0 radially
    SolverConfig c1;
    c1.dim = 1;
    c1.h = 1.0 / 256;
    auto vs = init_shift(c1, 0.05);
    CHECK(std::abs(discrete_com(vs) - 0.05 * kMass1) <= 1e-8);
    CHECK(std::abs(discrete_mass(vs) - kMass1) <= 1e-10);
    SolverConfig c2;
    c2.dim = 2;
    c2.h = 1.0 / 256;
    CHECK(discrete_com(init_stationary(c2)) == 0.0);
}

TEST_CASE("prepared initial data: stationary, shifted, dilated, and mode-seeded droplets") {
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 256;

    // stationary data samples v_* exactly on the grid
    auto v0 = init_stationary(cfg);
    CHECK(sup_dev_from_stationary(v0) == 0.0);
    CHECK(v0.confined);
    CHECK(v0.time == 0.0);

    // the dilated droplet scales amplitude by lambda^{-N}, preserving mass
    auto vd = init_dilate(cfg, 1.02);
    CHECK(std::abs(discrete_mass(vd) - kMass1) <= 1e-8);
    CHECK(vd.values[vd.grid.size() / 2] < v0.values[v0.grid.size() / 2]); // flattened

    // mode-seeded data: mass is matched through the nonlinear pushforward, and
    // the first-order center of mass of w = amp psi_{1,0} is 2 amp <z,z>_rho
    double amp = 1e-3;
    auto vm = init_mode(cfg, 1, 1, 0, amp);
    CHECK(std::abs(discrete_mass(vm) - kMass1) <= 1e-11);
    CHECK(discrete_com(vm) == doctest::Approx(2 * amp * 2.0 / 15.0).epsilon(1e-4));
    CHECK(*std::min_element(vm.values.begin(), vm.values.end()) >= 0.0);

    // resampling an off-grid sampling of the stationary droplet is exact: the
    // sqrt spline reproduces the quadratic (1 - x^2)/2 and the recovered
    // support edge is pinned by the dry node at x = 1
    DropletField src;
    src.dim = 1;
    src.geom = Geometry::line;
    src.confined = true;
    int m = 1101;
    src.grid.resize(m);
    src.values.resize(m);
    for (int i = 0; i < m; ++i) {
        double xx = -1.1 + 2.2 * i / (m - 1);
        src.grid[i] = xx;
        src.values[i] = transform::v_star(xx * xx);
    }
    auto out = resample_to_grid(src, cfg);
    CHECK(sup_dev_from_stationary(out) <= 1e-12);

    // guards
    SolverConfig c2;
    c2.dim = 2;
    CHECK_THROWS_AS(init_shift(c2, 0.05), std::invalid_argument);   // line only
    CHECK_THROWS_AS(init_shift(cfg, 0.6), std::invalid_argument);   // support exits
    CHECK_THROWS_AS(init_dilate(cfg, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(init_dilate(cfg, 1.6), std::invalid_argument);  // >= xmax
    CHECK_THROWS_AS(init_mode(c2, 1, 1, 0, 1e-3), std::invalid_argument); // radial: l = 0 only
}

TEST_CASE("a stationary droplet is a discrete near-equilibrium") {
    // one implicit step of fixed dt from exact stationary data; the change is
    // dt times the spatial truncation error, dominated by the contact-line
    // cells, and shrinks by well over 2x per grid halving
    double dt = 1e-3;
    std::vector<double> hs = {1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::vector<double> errs;
    for (double h : hs) {
        SolverConfig cfg;
        cfg.dim = 1;
        cfg.h = h;
        auto v0 = init_stationary(cfg);
        auto v1 = step_confined(v0, dt, cfg);
        double e = 0;
        for (std::size_t i = 0; i < v0.values.size(); ++i)
            e = std::max(e, std::abs(v1.values[i] - v0.values[i]));
        errs.push_back(e);
        CHECK(v1.time == doctest::Approx(dt).epsilon(1e-12));
    }
    MESSAGE("one-step residuals: ", errs[0], " ", errs[1], " ", errs[2]);
    CHECK(errs[0] <= 5e-5);
    CHECK(errs[2] <= 5e-6);
    CHECK(errs[0] / errs[1] >= 2.2);
    CHECK(errs[1] / errs[2] >= 2.2);

    // radial N=2: same one-step quiescence, and the step moves no mass
    SolverConfig rcfg;
    rcfg.dim = 2;
    rcfg.h = 1.0 / 128;
    auto r0 = init_stationary(rcfg);
    auto r1 = step_confined(r0, dt, rcfg);
    double re = 0;
    for (std::size_t i = 0; i < r0.values.size(); ++i)
        re = std::max(re, std::abs(r1.values[i] - r0.values[i]));
    CHECK(re <= 3e-5);
    CHECK(std::abs(discrete_mass(r1) - discrete_mass(r0)) <= 1e-12);
}

TEST_CASE("the solver tracks the exact relaxing translate") {
    // v(t,x) = v_*((x - b e^{-6t})^2) is an exact solution; march to T = 0.25
    // with dt proportional to h^2 and compare pointwise
    double b0 = 0.05, T = 0.25;
    std::vector<double> hs = {1.0 / 64, 1.0 / 128};
    std::vector<double> errs;
    for (double h : hs) {
        SolverConfig cfg;
        cfg.dim = 1;
        cfg.h = h;
        cfg.dt = 2.6 * h * h;
        auto v0 = init_shift(cfg, b0);
        auto traj = evolve(v0, T, cfg, {});
        REQUIRE(traj.snapshots.size() == 2); // t = 0 and t = T
        const auto& vT = traj.snapshots.back();
        CHECK(vT.time == doctest::Approx(T).epsilon(1e-12));
        errs.push_back(sup_dev_from_shift(vT, b0 * std::exp(-6.0 * T)));

        // hard invariants along the way: exact mass, no negative film height
        CHECK(max_mass_drift(traj, discrete_mass(v0)) <= 1e-12);
        CHECK(*std::min_element(vT.values.begin(), vT.values.end()) >= 0.0);
    }
    MESSAGE("translate tracking errors: ", errs[0], " ", errs[1]);
    CHECK(errs[0] <= 1e-4);
    CHECK(errs[1] <= 2e-5);
    CHECK(errs[0] / errs[1] >= 3.0);
}

TEST_CASE("center-of-mass decay measures the bottom eigenvalue") {
    // the discrete center of mass of an evolving translate decays like
    // e^{-6t}; fit the per-step history over [0.05, 1]
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 128;
    cfg.dt = 2.5e-4;
    auto v0 = init_shift(cfg, 0.05);
    auto traj = evolve(v0, 1.0, cfg, {});
    RateWindow w;
    w.t_min = 0.05;
    w.t_max = 1.0;
    w.amp_min = 1e-9;
    w.amp_max = 1e-2;
    auto r = measure_rate(traj.step_times, traj.step_com, w);
    MESSAGE("com rate ", r.exponent, " r2 ", r.r_squared, " over ", r.samples, " samples");
    CHECK(r.exponent == doctest::Approx(6.0).epsilon(0.01));
    CHECK(r.r_squared >= 0.9999);
    CHECK(r.samples >= 1000);
    CHECK(r.t_lo >= 0.05 - 1e-12);
    CHECK(r.t_hi <= 1.0 + 1e-12);
}

TEST_CASE("mass is conserved to roundoff over a thousand steps") {
    // zero-flux boundaries and a telescoping divergence make the update
    // conservative identically, not just to truncation order
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 64;
    cfg.dt = 1e-4;
    auto v0 = init_stationary(cfg);
    auto traj = evolve(v0, 0.1, cfg, {});
    CHECK(traj.step_mass.size() >= 1000);
    CHECK(traj.step_mass.size() <= 1001);
    CHECK(max_mass_drift(traj, discrete_mass(v0)) <= 1e-12);
}

TEST_CASE("even initial data stays even") {
    // the grid, the dilated droplet, and the discrete operator are all
    // mirror-symmetric, so no odd component can appear
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 64;
    cfg.dt = 1e-4;
    auto v0 = init_dilate(cfg, 1.03);
    auto traj = evolve(v0, 0.02, cfg, {});
    const auto& v = traj.snapshots.back().values;
    std::size_t n = v.size();
    double asym = 0;
    for (std::size_t i = 0; i < n / 2; ++i)
        asym = std::max(asym, std::abs(v[i] - v[n - 1 - i]));
    CHECK(asym <= 1e-13);
}

TEST_CASE("dilated droplets relax back to the stationary profile") {
    // mu = 30 for the slowest centered mode, so T = 0.3 contracts the initial
    // deviation by e^{-9} in the continuum; the residual is the offset of the
    // discrete steady state, two orders below the initial deviation
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 128;
    cfg.dt = 2.5e-4;
    auto v0 = init_dilate(cfg, 1.02);
    double dev0 = sup_dev_from_stationary(v0);
    REQUIRE(dev0 >= 2e-3); // the perturbation is genuinely there
    auto traj = evolve(v0, 0.3, cfg, {});
    double devT = sup_dev_from_stationary(traj.snapshots.back());
    MESSAGE("dilate relaxation ", dev0, " -> ", devT);
    CHECK(devT <= 0.02 * dev0);
}

TEST_CASE("linearized evolution is the exact eigenmode semigroup") {
    LinearCoefficients w0;
    w0.modes = {spectrum::make_mode(0, 1, 1, 1), spectrum::make_mode(1, 1, 0, 1),
                spectrum::make_mode(0, 1, 2, 1)};
    w0.coeffs = {0.3, -0.2, 0.05};
    REQUIRE(w0.modes[0].mu == 30);
    REQUIRE(w0.modes[1].mu == 6);
    REQUIRE(w0.modes[2].mu == 210);

    auto rows = evolve_linear(w0, {0.0, 0.7, 1.4});
    REQUIRE(rows.size() == 3);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(rows[0][j] == w0.coeffs[j]); // t = 0 returns the data exactly
    double mus[3] = {30, 6, 210};
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(rows[1][j] == doctest::Approx(w0.coeffs[j] * std::exp(-mus[j] * 0.7))
                                .epsilon(1e-14));
        // semigroup: stepping twice equals stepping once twice as far
        double two_steps = rows[1][j] * std::exp(-mus[j] * 0.7);
        CHECK(rows[2][j] == doctest::Approx(two_steps).epsilon(1e-13));
    }

    LinearCoefficients bad = w0;
    bad.coeffs.pop_back();
    CHECK_THROWS_AS(evolve_linear(bad, {0.0}), std::invalid_argument);
}

TEST_CASE("rate measurement on synthetic decay histories") {
    std::vector<double> t, a;
    for (int i = 0; i <= 40; ++i) {
        t.push_back(0.05 * i);
        a.push_back(3.0 * std::exp(-6.0 * t.back()));
    }

    // the default window caps amplitudes at 1e-2, discarding the early samples
    // where a nonlinear history would not yet be in the linear regime
    auto r = measure_rate(t, a, RateWindow{});
    CHECK(r.exponent == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.t_lo == doctest::Approx(1.0).epsilon(1e-12)); // 3 e^{-6t} <= 1e-2 first here
    CHECK(r.t_hi == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.samples == 21);

    // a wide-open window uses every sample and still fits exactly
    RateWindow wide;
    wide.amp_min = 0;
    wide.amp_max = 1e300;
    auto rw = measure_rate(t, a, wide);
    CHECK(rw.samples == 41);
    CHECK(rw.exponent == doctest::Approx(6.0).epsilon(1e-12));

    // a fast contaminant biases an early fit and is invisible to a late one
    std::vector<double> mixed(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        mixed[i] = std::exp(-6.0 * t[i]) + 0.01 * std::exp(-30.0 * t[i]);
    RateWindow late;
    late.t_min = 0.5;
    late.t_max = 2.0;
    late.amp_min = 0;
    late.amp_max = 1e300;
    CHECK(measure_rate(t, mixed, late).exponent == doctest::Approx(6.0).epsilon(1e-4));
    RateWindow early = late;
    early.t_min = 0.0;
    early.t_max = 0.2;
    CHECK(measure_rate(t, mixed, early).exponent > 6.02);

    // zero samples are dropped by the absolute floor without poisoning the fit
    std::vector<double> t2, a2;
    for (int i = 0; i < 10; ++i) {
        t2.push_back(0.1 * i);
        a2.push_back(2.0 * std::exp(-6.0 * t2.back()));
    }
    a2[5] = 0.0;
    auto rz = measure_rate(t2, a2, wide);
    CHECK(rz.samples == 9);
    CHECK(rz.exponent == doctest::Approx(6.0).epsilon(1e-12));

    // guards: length mismatch, and too few usable samples
    CHECK_THROWS_AS(measure_rate({0, 1}, {1, 0.5, 0.25}, wide), std::invalid_argument);
    RateWindow narrow = wide;
    narrow.t_min = 0.95;
    narrow.t_max = 1.05;
    CHECK_THROWS_AS(measure_rate(t, a, narrow), std::runtime_error);
}

TEST_CASE("snapshot scheduling and solver input validation") {
    SolverConfig cfg;
    cfg.dim = 1;
    cfg.h = 1.0 / 64;
    cfg.dt = 1e-3;
    auto v0 = init_stationary(cfg);

    // requested times are merged with {0, T}, sorted, and deduplicated
    auto traj = evolve(v0, 0.03, cfg, {0.02, 0.01, 0.02});
    REQUIRE(traj.times.size() == 4);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.times[1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(traj.times[2] == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(traj.times[3] == doctest::Approx(0.03).epsilon(1e-12));
    REQUIRE(traj.snapshots.size() == 4);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(traj.snapshots[k].time == traj.times[k]);
    CHECK(traj.snapshots[0].values == v0.values); // t = 0 snapshot is the data
    for (std::size_t i = 0; i + 1 < traj.step_times.size(); ++i)
        CHECK(traj.step_times[i] < traj.step_times[i + 1]);
    CHECK(traj.step_times.back() == doctest::Approx(0.03).epsilon(1e-9));

    CHECK_THROWS_AS(evolve(v0, -1.0, cfg, {}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(v0, 0.03, cfg, {0.05}), std::invalid_argument);

    // the field must live on the config grid with matching metadata
    SolverConfig other = cfg;
    other.h = 1.0 / 128;
    CHECK_THROWS_AS(step_confined(v0, 1e-3, other), std::invalid_argument);
    CHECK_THROWS_AS(evolve(v0, 0.01, other, {}), std::invalid_argument);
    CHECK_THROWS_AS(step_confined(v0, 0.0, cfg), std::invalid_argument);

    DropletField wrong = v0;
    wrong.dim = 2;
    CHECK_THROWS_AS(step_confined(wrong, 1e-3, cfg), std::invalid_argument);
    wrong = v0;
    wrong.confined = false;
    CHECK_THROWS_AS(step_confined(wrong, 1e-3, cfg), std::invalid_argument);
    wrong = v0;
    wrong.geom = Geometry::radial;
    CHECK_THROWS_AS(step_confined(wrong, 1e-3, cfg), std::invalid_argument);

    // an unreachable Newton tolerance with a single iteration must fail loudly
    SolverConfig starved = cfg;
    starved.max_newton = 1;
    starved.newton_tol = 1e-15;
    auto vb = init_dilate(starved, 1.3);
    CHECK_THROWS_AS(step_confined(vb, 0.5, starved), std::runtime_error);
}
