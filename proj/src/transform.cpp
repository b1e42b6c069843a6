#include "tfe/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfe::transform {

namespace {

constexpr double kPi = 3.14159265358979323846;

// area of S^{N-1}
double sphere_area(int N) {
    switch (N) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        default: throw std::invalid_argument("sphere_area: dim must be 1, 2 or 3");
    }
}

// integral of integrand * |x|^{N-1} via 3-point Gauss per segment on the cubic
// spline of the integrand (exact for spline x r^2, so the error is the O(h^4)
// interpolation error); line geometry carries no metric factor
double integrate_field(const DropletField& f, const std::vector<double>& integrand) {
    const auto& x = f.grid;
    std::size_t n = x.size();
    if (n < 4) throw std::invalid_argument("integrate_field: need at least 4 samples");
    int metric_pow = f.geom == Geometry::radial ? f.dim - 1 : 0;
    linops::CubicSpline s(x, integrand);
    static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double acc = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double mid = 0.5 * (x[i] + x[i + 1]), half = 0.5 * (x[i + 1] - x[i]);
        for (int g = 0; g < 3; ++g) {
            double t = mid + half * gx[g];
            double metric = metric_pow ? std::pow(std::abs(t), metric_pow) : 1.0;
            acc += gw[g] * half * s(t) * metric;
        }
    }
    if (f.geom == Geometry::radial) {
        // close the [0, x_0) gap (cell-centered grids do not carry r = 0)
        if (x.front() > 0)
            acc += integrand.front() * std::pow(x.front(), f.dim) / f.dim;
        acc *= sphere_area(f.dim);
    }
    return acc;
}

// spline of sqrt(v) over the closed support, pinned to zero at the located edges
linops::CubicSpline sqrt_spline(const DropletField& v, const SupportBounds& sb) {
    std::vector<double> xs, gs;
    xs.reserve(sb.i_hi - sb.i_lo + 3);
    if (sb.lo < v.grid[sb.i_lo]) {
        xs.push_back(sb.lo);
        gs.push_back(0.0);
    }
    for (std::size_t i = sb.i_lo; i <= sb.i_hi; ++i) {
        xs.push_back(v.grid[i]);
        gs.push_back(std::sqrt(std::max(0.0, v.values[i])));
    }
    if (sb.hi > v.grid[sb.i_hi]) {
        xs.push_back(sb.hi);
        gs.push_back(0.0);
    }
    return linops::CubicSpline(xs, gs);
}

} // namespace

DropletField physical_to_confined(const DropletField& f, const SelfSimilarFrame& fr) {
    if (f.confined) throw std::invalid_argument("physical_to_confined: field is already confined");
    if (!(f.time > 0)) throw std::invalid_argument("physical_to_confined: requires tau > 0");
    int N = f.dim;
    double tau = f.time;
    double scale_x = std::sqrt(fr.sigma_m) * std::pow(tau, 1.0 / (N + 4));
    double scale_v = (N + 4) * fr.gamma / (fr.sigma_m * fr.sigma_m) * std::pow(tau, double(N) / (N + 4));
    DropletField out = f;
    out.confined = true;
    out.time = std::log(tau) / ((N + 4) * fr.gamma);
    for (auto& x : out.grid) x /= scale_x;
    for (auto& v : out.values) v *= scale_v;
    return out;
}

DropletField confined_to_physical(const DropletField& f, const SelfSimilarFrame& fr) {
    if (!f.confined) throw std::invalid_argument("confined_to_physical: field is not confined");
    int N = f.dim;
    double tau = std::exp((N + 4) * fr.gamma * f.time);
    double scale_x = std::sqrt(fr.sigma_m) * std::pow(tau, 1.0 / (N + 4));
    double scale_v = (N + 4) * fr.gamma / (fr.sigma_m * fr.sigma_m) * std::pow(tau, double(N) / (N + 4));
    DropletField out = f;
    out.confined = false;
    out.time = tau;
    for (auto& x : out.grid) x *= scale_x;
    for (auto& v : out.values) v /= scale_v;
    return out;
}

DropletField w_to_v(const PerturbationField& w) {
    std::size_t n = w.grid.size();
    if (n != w.values.size()) throw std::invalid_argument("w_to_v: size mismatch");
    DropletField out;
    out.dim = w.dim;
    out.geom = w.geom;
    out.time = w.time;
    out.confined = true;
    out.grid.resize(n);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = w.grid[i];
        double one_w = 1.0 + w.values[i];
        if (!(one_w > 0)) throw std::runtime_error("w_to_v: 1 + w must stay positive");
        double rho = 0.5 * (1.0 - z * z);
        out.grid[i] = one_w * z;
        out.values[i] = rho * rho * one_w * one_w * one_w * one_w;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(out.grid[i] < out.grid[i + 1]))
            throw std::runtime_error("w_to_v: image grid is not monotone (1 + w + z w' <= 0)");
    return out;
}

PerturbationField v_to_w(const DropletField& v, const std::vector<double>& ball_nodes,
                         const InverseOptions& opt) {
    if (!v.confined) throw std::invalid_argument("v_to_w: field must be confined");
    SupportBounds sb = support_bounds(v);
    linops::CubicSpline g = sqrt_spline(v, sb);
    double x_min = v.geom == Geometry::radial ? 0.0 : sb.lo;
    double x_max = sb.hi;

    auto s_of = [&](double x) { return std::sqrt(2.0 * std::max(0.0, g(x)) + x * x); };

    PerturbationField out;
    out.dim = v.dim;
    out.geom = v.geom;
    out.time = v.time;
    out.grid = ball_nodes;
    out.values.resize(ball_nodes.size());
    out.gradient.resize(ball_nodes.size());

    for (std::size_t i = 0; i < ball_nodes.size(); ++i) {
        double z = ball_nodes[i];
        if (v.geom == Geometry::radial && z < 0)
            throw std::invalid_argument("v_to_w: radial nodes must be nonnegative");
        if (std::abs(z) > 1.0 + 1e-12)
            throw std::invalid_argument("v_to_w: ball nodes must lie in [-1, 1]");

        double x;
        if (std::abs(z) >= 1.0 - 1e-13) {
            x = z > 0 ? x_max : x_min;
        } else {
            // damped fixed point for x = z s(x); contraction since s' ~ 0 near
            // the stationary droplet
            x = std::clamp(z, x_min, x_max);
            bool done = false;
            for (int it = 0; it < opt.max_iter; ++it) {
                double x_new = x + opt.theta * (z * s_of(x) - x);
                x_new = std::clamp(x_new, x_min, x_max);
                double dx = std::abs(x_new - x);
                x = x_new;
                if (dx <= opt.tol) {
                    done = true;
                    break;
                }
            }
            if (!done) throw std::runtime_error("v_to_w: fixed point did not converge");
        }

        double s = s_of(x);
        if (!(s > 0)) throw std::runtime_error("v_to_w: degenerate droplet (s = 0)");
        double sp = (g.derivative(x) + x) / s;
        double denom = s - x * sp;
        if (!(std::abs(denom) > 1e-12))
            throw std::runtime_error("v_to_w: map is not invertible at a node");
        out.values[i] = s - 1.0;
        out.gradient[i] = sp * (s * s) / denom;
    }
    return out;
}

std::vector<double> uniform_ball_nodes(Geometry geom, int count, double margin) {
    if (count < 2) throw std::invalid_argument("uniform_ball_nodes: count < 2");
    double lo = geom == Geometry::line ? -1.0 + margin : 0.0;
    double hi = 1.0 - margin;
    std::vector<double> z(count);
    for (int i = 0; i < count; ++i) z[i] = lo + (hi - lo) * i / (count - 1);
    return z;
}

double mode_amplitude_w(const PerturbationField& w, const spectrum::Eigenmode& mode) {
    if (w.dim != mode.dim) throw std::invalid_argument("mode_amplitude_w: dimension mismatch");
    if (w.geom == Geometry::radial && mode.l != 0)
        throw std::invalid_argument("mode_amplitude_w: radial field carries only l = 0 modes");
    int deg = mode.l + 2 * mode.k;
    auto grid = spectrum::WeightedGrid::for_degree(mode.dim, 2 * deg + 32);
    linops::CubicSpline ws(w.grid, w.values);
    std::vector<double> wv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = grid.nodes[i];
        double c;
        if (w.geom == Geometry::line)
            c = p[0];
        else
            c = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        wv[i] = ws(c);
    }
    auto psi = spectrum::eval_eigenfunction(mode, grid.nodes);
    return inner_rho(grid, psi, wv);
}

namespace {

// int_a^b v_* psi |x|^{N-1} dx with 16-point Gauss-Legendre; exact, since the
// integrand is a polynomial of degree well under 32 for every tabulated mode
double stationary_tail(const DropletField& f, const spectrum::Eigenmode& mode, double a,
                       double b) {
    if (!(b - a > 0)) return 0.0;
    std::vector<double> u, uw;
    spectrum::gauss_jacobi(16, 0.0, 0.0, u, uw);
    std::vector<std::array<double, 3>> pts(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) pts[i] = {a + (b - a) * u[i], 0.0, 0.0};
    auto psi = spectrum::eval_eigenfunction(mode, pts);
    int metric_pow = f.geom == Geometry::radial ? f.dim - 1 : 0;
    double acc = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double x = pts[i][0];
        double metric = metric_pow ? std::pow(std::abs(x), metric_pow) : 1.0;
        acc += uw[i] * v_star(x * x) * psi[i] * metric;
    }
    acc *= b - a;
    if (f.geom == Geometry::radial) acc *= sphere_area(f.dim);
    return acc;
}

} // namespace

double mode_amplitude_v(const DropletField& v, const spectrum::Eigenmode& mode) {
    if (!v.confined) throw std::invalid_argument("mode_amplitude_v: field must be confined");
    if (v.dim != mode.dim) throw std::invalid_argument("mode_amplitude_v: dimension mismatch");
    if (v.geom == Geometry::radial && mode.l != 0)
        throw std::invalid_argument("mode_amplitude_v: radial field carries only l = 0 modes");
    std::size_t n = v.grid.size();
    std::vector<std::array<double, 3>> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {v.grid[i], 0.0, 0.0};
    auto psi = spectrum::eval_eigenfunction(mode, pts);
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = v.grid[i] * v.grid[i];
        integrand[i] = (v.values[i] - v_star(r2)) * psi[i];
    }
    double acc = integrate_field(v, integrand);
    // the comparison profile extends to |x| = 1 even where the field's grid
    // stops short of the unit ball, so restore the truncated -v_* psi tails
    if (v.grid.back() < 1.0) acc -= stationary_tail(v, mode, v.grid.back(), 1.0);
    if (v.geom == Geometry::line && v.grid.front() > -1.0)
        acc -= stationary_tail(v, mode, -1.0, v.grid.front());
    return acc;
}

Diagnostics diagnostics(const DropletField& v) {
    if (!v.confined) throw std::invalid_argument("diagnostics: field must be confined");
    Diagnostics d;
    std::size_t n = v.grid.size();

    d.mass = integrate_field(v, v.values);
    d.mass_defect = d.mass - stationary_mass(v.dim);

    if (v.geom == Geometry::line) {
        std::vector<double> xv(n);
        for (std::size_t i = 0; i < n; ++i) xv[i] = v.grid[i] * v.values[i];
        d.center_of_mass = integrate_field(v, xv);
    }

    SupportBounds sb = support_bounds(v);
    d.support_lo = v.geom == Geometry::radial ? 0.0 : sb.lo;
    d.support_hi = sb.hi;

    linops::CubicSpline g = sqrt_spline(v, sb);
    double sup_val = 0, sup_grad = 0, sup_slope = 0;
    int m = 8 * static_cast<int>(sb.i_hi - sb.i_lo + 2);
    for (int j = 0; j <= m; ++j) {
        double x = d.support_lo + (d.support_hi - d.support_lo) * j / m;
        double gv = g(x);
        double gp = g.derivative(x);
        sup_val = std::max(sup_val, std::abs(gv - 0.5 * (1.0 - x * x)));
        sup_grad = std::max(sup_grad, std::abs(gp + x));
        sup_slope = std::max(sup_slope, std::abs(2.0 * gv * (gp + x)));
    }
    // max (not sum) of the value and slope gaps of sqrt(v) against V_*
    d.lipschitz_closeness = std::max(sup_val, sup_grad);
    d.slope_defect = sup_slope;
    d.perturbative = d.lipschitz_closeness <= kPerturbativeThreshold;
    return d;
}

double mass_match_constant(const spectrum::WeightedGrid& grid, const std::vector<double>& w,
                           int N) {
    if (w.size() != grid.size()) throw std::invalid_argument("mass_match_constant: size mismatch");
    double target = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) target += grid.weights[i] * grid.rho_values[i];
    double c = 0;
    for (int it = 0; it < 64; ++it) {
        double f = 0, df = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double base = 1.0 + c + w[i];
            if (!(base > 0)) throw std::runtime_error("mass_match_constant: 1 + c + w <= 0");
            double wr = grid.weights[i] * grid.rho_values[i];
            f += wr * std::pow(base, N + 4);
            df += wr * (N + 4) * std::pow(base, N + 3);
        }
        double step = (f - target) / df;
        c -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(c))) return c;
    }
    throw std::runtime_error("mass_match_constant: Newton did not converge");
}

DropletField stationary_droplet(int N, Geometry geom, const std::vector<double>& grid) {
    DropletField f;
    f.dim = N;
    f.geom = geom;
    f.time = 0;
    f.confined = true;
    f.grid = grid;
    f.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = v_star(grid[i] * grid[i]);
    return f;
}

} // namespace tfe::transform
