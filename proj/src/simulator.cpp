#include "tfe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "tfe/transform.hpp"

namespace tfe::simulator {

using transform::DropletField;
using transform::Geometry;

double gamma_of(int dim) { return 2.0 * (dim + 2); }

Geometry geometry_of(int dim) { return dim == 1 ? Geometry::line : Geometry::radial; }

std::vector<double> make_grid(const SolverConfig& cfg) {
    if (!(cfg.h > 0) || !(cfg.xmax > 1.0))
        throw std::invalid_argument("make_grid: need h > 0 and xmax > 1");
    double lo = geometry_of(cfg.dim) == Geometry::line ? -cfg.xmax : 0.0;
    int n = static_cast<int>(std::lround((cfg.xmax - lo) / cfg.h));
    if (n < 8) throw std::invalid_argument("make_grid: fewer than 8 cells");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (i + 0.5) * cfg.h;
    return x;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double sphere_area(int N) { return N == 1 ? 2.0 : N == 2 ? 2.0 * kPi : 4.0 * kPi; }

// geometry of one uniform cell-centered grid: cell/face metric factors a = |x|^{N-1}
struct Mesh {
    int dim;
    double h;
    double gamma;
    std::vector<double> x;       // cell centers
    std::vector<double> xf;      // interior face positions, size n-1
    std::vector<double> a_cell;  // metric at centers
    std::vector<double> a_face;  // metric at interior faces

    explicit Mesh(const SolverConfig& cfg) : dim(cfg.dim), h(cfg.h), gamma(gamma_of(cfg.dim)) {
        x = make_grid(cfg);
        std::size_t n = x.size();
        xf.resize(n - 1);
        a_cell.resize(n);
        a_face.resize(n - 1);
        int p = dim - 1;
        for (std::size_t i = 0; i < n; ++i)
            a_cell[i] = p ? std::pow(std::abs(x[i]), p) : 1.0;
        for (std::size_t f = 0; f + 1 < n; ++f) {
            xf[f] = 0.5 * (x[f] + x[f + 1]);
            a_face[f] = p ? std::pow(std::abs(xf[f]), p) : 1.0;
        }
    }
};

// mobility at a face: positive part of the central mean, capped by twice the
// donor cell (the cell mass leaves, by the sign of the pressure gradient p).
// The cap blocks the spurious drain of dry cells at contact lines, where the
// discrete third difference blows up, while wetting faces (donor on the wet
// side) keep the full central mean so fronts advance at the consistent rate.
// A hard harmonic-type mean would zero both directions and pin the front.
// Interior smooth faces never hit the cap, preserving second-order accuracy.
inline double mobility(double a, double b, double p, double* dm_da, double* dm_db) {
    double mean = 0.5 * (a + b);
    double donor = p > 0 ? a : b;
    double cap = 2.0 * std::max(0.0, donor);
    *dm_da = *dm_db = 0.0;
    if (mean <= 0.0) return 0.0;
    if (mean <= cap) {
        *dm_da = *dm_db = 0.5;
        return mean;
    }
    (p > 0 ? *dm_da : *dm_db) = 2.0;
    return cap;
}

// residual of one implicit Euler step, R(v) = v - vold + (dt/(a h)) div(a F),
// flux F = m(v_f, v_{f+1}) [ (q_{f+1} - q_f)/h - gamma x_f ] on interior faces,
// q = discrete (metric-weighted) Laplacian with zero-gradient ghosts, zero
// boundary flux. Optionally assembles the pentadiagonal Jacobian.
void residual(const Mesh& msh, const std::vector<double>& vold, const std::vector<double>& v,
              double dt, std::vector<double>& R, linops::BandedLU* jac) {
    int n = static_cast<int>(v.size());
    std::vector<double> q(n), cL(n), cR(n);
    for (int i = 0; i < n; ++i) {
        double ai = msh.a_cell[i];
        cL[i] = i > 0 ? msh.a_face[i - 1] / (ai * msh.h * msh.h) : 0.0;
        cR[i] = i < n - 1 ? msh.a_face[i] / (ai * msh.h * msh.h) : 0.0;
        double qL = i > 0 ? cL[i] * (v[i] - v[i - 1]) : 0.0;
        double qR = i < n - 1 ? cR[i] * (v[i + 1] - v[i]) : 0.0;
        q[i] = qR - qL;
    }
    for (int i = 0; i < n; ++i) R[i] = v[i] - vold[i];
    if (jac) {
        jac->clear();
        for (int i = 0; i < n; ++i) jac->at(i, i) = 1.0;
    }

    auto dq = [&](int i, int j) -> double { // d q_i / d v_j, |i-j| <= 1
        if (j == i - 1) return cL[i];
        if (j == i + 1) return cR[i];
        if (j == i) return -(cL[i] + cR[i]);
        return 0.0;
    };

    for (int f = 0; f + 1 < n; ++f) {
        double p = (q[f + 1] - q[f]) / msh.h - msh.gamma * msh.xf[f];
        double dm_da, dm_db;
        double m = mobility(v[f], v[f + 1], p, &dm_da, &dm_db);
        double F = m * p;
        double wR = dt * msh.a_face[f] / (msh.a_cell[f] * msh.h);     // into R_f
        double wL = dt * msh.a_face[f] / (msh.a_cell[f + 1] * msh.h); // into R_{f+1}
        R[f] += wR * F;
        R[f + 1] -= wL * F;
        if (!jac) continue;
        for (int j = std::max(0, f - 1); j <= std::min(n - 1, f + 2); ++j) {
            double dF = m * (dq(f + 1, j) - dq(f, j)) / msh.h;
            if (j == f) dF += dm_da * p;
            if (j == f + 1) dF += dm_db * p;
            jac->at(f, j) += wR * dF;
            jac->at(f + 1, j) -= wL * dF;
        }
    }
}

double sup_norm(const std::vector<double>& r) {
    double s = 0;
    for (double x : r) s = std::max(s, std::abs(x));
    return s;
}

// one implicit Euler step by a damped Newton iteration; returns false when the
// residual tolerance is not reached or the update loses positivity beyond dust
bool try_step(const Mesh& msh, const SolverConfig& cfg, const std::vector<double>& vold,
              double dt, std::vector<double>& out) {
    int n = static_cast<int>(vold.size());
    double vmax = std::max(1.0, sup_norm(vold));
    double tol = cfg.newton_tol * vmax;
    std::vector<double> v = vold, R(n), Rtrial(n), vtrial(n);
    linops::BandedLU jac(n, 2, 2);
    residual(msh, vold, v, dt, R, &jac);
    double rn = sup_norm(R);
    bool converged = rn <= tol;
    for (int it = 0; it < cfg.max_newton && !converged; ++it) {
        std::vector<double> delta = R;
        jac.factorize();
        jac.solve(delta);
        double s = 1.0;
        for (int half = 0; half < 8; ++half, s *= 0.5) {
            for (int i = 0; i < n; ++i) vtrial[i] = v[i] - s * delta[i];
            residual(msh, vold, vtrial, dt, Rtrial, nullptr);
            if (sup_norm(Rtrial) < rn) break;
        }
        v = vtrial;
        residual(msh, vold, v, dt, R, &jac);
        double rn_next = sup_norm(R);
        if (rn_next > 0.5 * rn && rn_next > tol) {
            // progress stopped: accept only a genuine roundoff floor, far below
            // any resolvable scheme scale
            converged = rn_next <= 1e-9 * vmax;
            rn = std::min(rn, rn_next);
            if (std::getenv("TFE_DEBUG_NEWTON"))
                std::fprintf(stderr, "[newton] stall it=%d rn=%.3e dt=%.3e conv=%d\n", it,
                             rn_next, dt, (int)converged);
            break;
        }
        rn = rn_next;
        converged = rn <= tol;
    }
    if (!converged) return false;
    double dust = -1e-11 * vmax;
    for (int i = 0; i < n; ++i)
        if (v[i] < dust) {
            if (std::getenv("TFE_DEBUG_NEWTON"))
                std::fprintf(stderr, "[newton] negativity v[%d]=%.3e at x=%.4f dt=%.3e\n", i,
                             v[i], msh.x[i], dt);
            return false; // genuine negativity: caller halves dt
        }
    // clamp dust: negatives above the tolerance and positive crumbs below the
    // relative roundoff floor (stranded denormals freeze, their outflux underflows)
    for (double& x : v)
        if (x < 1e-16 * vmax) x = 0;
    out = std::move(v);
    return true;
}

void check_field(const DropletField& v, const SolverConfig& cfg) {
    if (v.dim != cfg.dim) throw std::invalid_argument("solver: field/config dimension mismatch");
    if (!v.confined) throw std::invalid_argument("solver: field must be confined");
    if (v.geom != geometry_of(cfg.dim)) throw std::invalid_argument("solver: wrong geometry");
}

// advance by exactly `span`, splitting into ~cfg.dt steps, halving on failure
void advance(const Mesh& msh, const SolverConfig& cfg, std::vector<double>& v, double t0,
             double span, Trajectory* traj) {
    double done = 0;
    while (done < span - 1e-15 * std::max(1.0, span)) {
        double dt = std::min(cfg.dt, span - done);
        std::vector<double> vn;
        int halvings = 0;
        while (!try_step(msh, cfg, v, dt, vn)) {
            if (++halvings > 8)
                throw std::runtime_error("step_confined: Newton did not converge (reduce dt)");
            dt *= 0.5;
        }
        v = std::move(vn);
        done += dt;
        if (traj) {
            DropletField tmp;
            tmp.dim = cfg.dim;
            tmp.geom = geometry_of(cfg.dim);
            tmp.grid = msh.x;
            tmp.values = v;
            traj->step_times.push_back(t0 + done);
            traj->step_mass.push_back(discrete_mass(tmp));
            traj->step_com.push_back(discrete_com(tmp));
        }
    }
}

} // namespace

double discrete_mass(const DropletField& v) {
    double h = v.grid[1] - v.grid[0];
    double s = 0;
    int p = v.dim - 1;
    for (std::size_t i = 0; i < v.grid.size(); ++i)
        s += v.values[i] * (p ? std::pow(std::abs(v.grid[i]), p) : 1.0);
    s *= h;
    if (v.geom == Geometry::radial) s *= sphere_area(v.dim);
    return s;
}

double discrete_com(const DropletField& v) {
    if (v.geom != Geometry::line) return 0.0;
    double h = v.grid[1] - v.grid[0];
    double s = 0;
    for (std::size_t i = 0; i < v.grid.size(); ++i) s += v.grid[i] * v.values[i];
    return s * h;
}

DropletField init_stationary(const SolverConfig& cfg) {
    return transform::stationary_droplet(cfg.dim, geometry_of(cfg.dim), make_grid(cfg));
}

DropletField init_shift(const SolverConfig& cfg, double b) {
    if (cfg.dim != 1) throw std::invalid_argument("init_shift: line geometry (N=1) only");
    if (std::abs(b) + 1.0 >= cfg.xmax)
        throw std::invalid_argument("init_shift: shifted support leaves the domain");
    DropletField f = init_stationary(cfg);
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        double y = f.grid[i] - b;
        f.values[i] = transform::v_star(y * y);
    }
    return f;
}

DropletField init_dilate(const SolverConfig& cfg, double lambda) {
    if (!(lambda > 0) || lambda >= cfg.xmax)
        throw std::invalid_argument("init_dilate: need 0 < lambda < xmax");
    DropletField f = init_stationary(cfg);
    double scale = std::pow(lambda, -cfg.dim);
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        double y = f.grid[i] / lambda;
        f.values[i] = scale * transform::v_star(y * y);
    }
    return f;
}

DropletField init_mode(const SolverConfig& cfg, int l, int n, int k, double amp) {
    int N = cfg.dim;
    if (N >= 2 && l != 0)
        throw std::invalid_argument("init_mode: radial runs carry only l = 0 modes");
    auto mode = spectrum::make_mode(l, n, k, N);
    auto geom = geometry_of(N);
    auto z = transform::uniform_ball_nodes(geom, 2048);

    // mass-match on the quadrature grid, then build w = c + amp psi on ball nodes
    auto qgrid = spectrum::WeightedGrid::for_degree(N, 2 * (l + 2 * k) + 16);
    auto psi_q = spectrum::eval_eigenfunction(mode, qgrid.nodes);
    std::vector<double> wq(qgrid.size());
    for (std::size_t i = 0; i < qgrid.size(); ++i) wq[i] = amp * psi_q[i];
    double c = transform::mass_match_constant(qgrid, wq, N);

    transform::PerturbationField w;
    w.dim = N;
    w.geom = geom;
    w.grid = z;
    w.values.resize(z.size());
    w.gradient.assign(z.size(), 0.0);
    std::vector<std::array<double, 3>> pts(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pts[i] = {z[i], 0, 0};
    auto psi = spectrum::eval_eigenfunction(mode, pts);
    for (std::size_t i = 0; i < z.size(); ++i) w.values[i] = c + amp * psi[i];

    return resample_to_grid(transform::w_to_v(w), cfg);
}

DropletField resample_to_grid(const DropletField& v, const SolverConfig& cfg) {
    check_field(v, cfg);
    auto sb = transform::support_bounds(v);
    // sqrt(v) spline over the closed support (exact for quartic droplets)
    std::vector<double> xs, gs;
    if (sb.lo < v.grid[sb.i_lo]) {
        xs.push_back(sb.lo);
        gs.push_back(0);
    }
    for (std::size_t i = sb.i_lo; i <= sb.i_hi; ++i) {
        xs.push_back(v.grid[i]);
        gs.push_back(std::sqrt(std::max(0.0, v.values[i])));
    }
    if (sb.hi > v.grid[sb.i_hi]) {
        xs.push_back(sb.hi);
        gs.push_back(0);
    }
    linops::CubicSpline g(xs, gs);
    DropletField out;
    out.dim = cfg.dim;
    out.geom = geometry_of(cfg.dim);
    out.time = v.time;
    out.grid = make_grid(cfg);
    out.values.resize(out.grid.size());
    double lo = out.geom == Geometry::radial ? 0.0 : sb.lo;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        double x = out.grid[i];
        double gv = (x >= lo && x <= sb.hi) ? std::max(0.0, g(x)) : 0.0;
        out.values[i] = gv * gv;
    }
    return out;
}

DropletField step_confined(const DropletField& v, double dt, const SolverConfig& cfg) {
    check_field(v, cfg);
    if (!(dt > 0)) throw std::invalid_argument("step_confined: dt must be positive");
    Mesh msh(cfg);
    if (msh.x.size() != v.grid.size())
        throw std::invalid_argument("step_confined: field is not on the config grid");
    std::vector<double> vn;
    if (!try_step(msh, cfg, v.values, dt, vn))
        throw std::runtime_error("step_confined: Newton did not converge (reduce dt)");
    DropletField out = v;
    out.time = v.time + dt;
    out.values = std::move(vn);
    return out;
}

Trajectory evolve(const DropletField& v0, double T, const SolverConfig& cfg,
                  std::vector<double> output_times) {
    check_field(v0, cfg);
    if (!(T >= 0)) throw std::invalid_argument("evolve: need T >= 0");
    Mesh msh(cfg);
    if (msh.x.size() != v0.grid.size())
        throw std::invalid_argument("evolve: field is not on the config grid");

    output_times.push_back(0.0);
    output_times.push_back(T);
    std::sort(output_times.begin(), output_times.end());
    output_times.erase(std::unique(output_times.begin(), output_times.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                       output_times.end());
    if (output_times.front() < 0 || output_times.back() > T)
        throw std::invalid_argument("evolve: output times outside [0, T]");

    Trajectory traj;
    std::vector<double> v = v0.values;
    double t = 0;
    auto snapshot = [&](double time) {
        DropletField f;
        f.dim = cfg.dim;
        f.geom = geometry_of(cfg.dim);
        f.confined = true;
        f.time = time;
        f.grid = msh.x;
        f.values = v;
        traj.times.push_back(time);
        traj.snapshots.push_back(std::move(f));
    };
    for (double target : output_times) {
        if (target > t) {
            advance(msh, cfg, v, t, target - t, &traj);
            t = target;
        }
        snapshot(t);
    }
    return traj;
}

std::vector<std::vector<double>> evolve_linear(const LinearCoefficients& w0,
                                               const std::vector<double>& times) {
    if (w0.modes.size() != w0.coeffs.size())
        throw std::invalid_argument("evolve_linear: modes/coeffs size mismatch");
    std::vector<std::vector<double>> out(times.size(),
                                         std::vector<double>(w0.coeffs.size()));
    for (std::size_t it = 0; it < times.size(); ++it)
        for (std::size_t j = 0; j < w0.coeffs.size(); ++j)
            out[it][j] =
                w0.coeffs[j] * std::exp(-static_cast<double>(w0.modes[j].mu) * times[it]);
    return out;
}

RateReport measure_rate(const std::vector<double>& times, const std::vector<double>& amps,
                        const RateWindow& window) {
    if (times.size() != amps.size())
        throw std::invalid_argument("measure_rate: times/amps size mismatch");
    constexpr double kFloor = 1e-12;
    std::vector<double> t, a;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double m = std::abs(amps[i]);
        if (times[i] < window.t_min || times[i] > window.t_max) continue;
        if (m < std::max(window.amp_min, kFloor) || m > window.amp_max) continue;
        t.push_back(times[i]);
        a.push_back(m);
    }
    if (t.size() < 4) throw std::runtime_error("measure_rate: fewer than 4 usable samples");
    auto fit = linops::fit_loglinear(t, a, kFloor);
    RateReport r;
    r.exponent = -fit.slope;
    r.r_squared = fit.r_squared;
    r.samples = fit.samples;
    r.t_lo = t.front();
    r.t_hi = t.back();
    return r;
}

} // namespace tfe::simulator
