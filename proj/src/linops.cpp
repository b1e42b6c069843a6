#include "tfe/linops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfe::linops {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 4 matching knots");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i] < x_[i + 1]))
            throw std::invalid_argument("CubicSpline: knots must be strictly increasing");

    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

    // solve for the quadratic coefficients c_i (defined at every knot)
    BandedLU A(static_cast<int>(n), 2, 2);
    std::vector<double> rhs(n, 0.0);
    // not-a-knot: d continuous across x_1 and x_{n-2}
    A.at(0, 0) = h[1];
    A.at(0, 1) = -(h[0] + h[1]);
    A.at(0, 2) = h[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        A.at(static_cast<int>(i), static_cast<int>(i - 1)) = h[i - 1];
        A.at(static_cast<int>(i), static_cast<int>(i)) = 2.0 * (h[i - 1] + h[i]);
        A.at(static_cast<int>(i), static_cast<int>(i + 1)) = h[i];
        rhs[i] = 3.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    A.at(static_cast<int>(n - 1), static_cast<int>(n - 3)) = h[n - 2];
    A.at(static_cast<int>(n - 1), static_cast<int>(n - 2)) = -(h[n - 3] + h[n - 2]);
    A.at(static_cast<int>(n - 1), static_cast<int>(n - 1)) = h[n - 3];
    A.factorize();
    A.solve(rhs);
    c_ = rhs;

    b_.resize(n - 1);
    d_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * c_[i] + c_[i + 1]) / 3.0;
        d_[i] = (c_[i + 1] - c_[i]) / (3.0 * h[i]);
    }
}

std::size_t CubicSpline::segment(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin() - 1);
    return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double t) const {
    std::size_t i = segment(t);
    double dx = t - x_[i];
    return y_[i] + dx * (b_[i] + dx * (c_[i] + dx * d_[i]));
}

double CubicSpline::derivative(double t) const {
    std::size_t i = segment(t);
    double dx = t - x_[i];
    return b_[i] + dx * (2.0 * c_[i] + 3.0 * dx * d_[i]);
}

double CubicSpline::second_derivative(double t) const {
    std::size_t i = segment(t);
    double dx = t - x_[i];
    return 2.0 * c_[i] + 6.0 * dx * d_[i];
}

double CubicSpline::third_derivative(double t) const { return 6.0 * d_[segment(t)]; }

double CubicSpline::integral(double a, double b) const {
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    auto piece = [&](std::size_t i, double lo, double hi) {
        auto F = [&](double t) {
            double dx = t - x_[i];
            return dx * (y_[i] + dx * (b_[i] / 2.0 + dx * (c_[i] / 3.0 + dx * d_[i] / 4.0)));
        };
        return F(hi) - F(lo);
    };
    std::size_t ia = segment(a), ib = segment(b);
    if (ia == ib) return sign * piece(ia, a, b);
    double s = piece(ia, a, x_[ia + 1]);
    for (std::size_t i = ia + 1; i < ib; ++i) s += piece(i, x_[i], x_[i + 1]);
    s += piece(ib, x_[ib], b);
    return sign * s;
}

BandedLU::BandedLU(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
    if (n < 1 || kl < 0 || ku < 0) throw std::invalid_argument("BandedLU: bad shape");
    ab_.assign(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0);
    piv_.assign(n, 0);
}

double& BandedLU::at(int i, int j) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || i - j > kl_ || j - i > ku_)
        throw std::out_of_range("BandedLU::at: outside band");
    factored_ = false;
    const int ldab = 2 * kl_ + ku_ + 1;
    return ab_[static_cast<std::size_t>(j) * ldab + (kl_ + ku_ + i - j)];
}

void BandedLU::clear() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
}

void BandedLU::factorize() {
    const int ldab = 2 * kl_ + ku_ + 1;
    auto entry = [&](int i, int j) -> double& {
        return ab_[static_cast<std::size_t>(j) * ldab + (kl_ + ku_ + i - j)];
    };
    for (int j = 0; j < n_; ++j) {
        int imax = j;
        double vmax = std::abs(entry(j, j));
        for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i)
            if (std::abs(entry(i, j)) > vmax) { vmax = std::abs(entry(i, j)); imax = i; }
        if (vmax == 0.0) throw std::runtime_error("BandedLU: singular matrix");
        piv_[j] = imax;
        int jend = std::min(n_ - 1, j + ku_ + kl_);
        if (imax != j)
            for (int c = j; c <= jend; ++c) std::swap(entry(j, c), entry(imax, c));
        for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i) {
            double m = entry(i, j) / entry(j, j);
            entry(i, j) = m;
            for (int c = j + 1; c <= jend; ++c) entry(i, c) -= m * entry(j, c);
        }
    }
    factored_ = true;
}

void BandedLU::solve(std::vector<double>& rhs) const {
    if (!factored_) throw std::runtime_error("BandedLU::solve: factorize first");
    if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("BandedLU: rhs size");
    const int ldab = 2 * kl_ + ku_ + 1;
    auto entry = [&](int i, int j) -> double {
        return ab_[static_cast<std::size_t>(j) * ldab + (kl_ + ku_ + i - j)];
    };
    for (int j = 0; j < n_; ++j) {
        if (piv_[j] != j) std::swap(rhs[j], rhs[piv_[j]]);
        for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i)
            rhs[i] -= entry(i, j) * rhs[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        rhs[j] /= entry(j, j);
        for (int i = std::max(0, j - ku_ - kl_); i < j; ++i)
            rhs[i] -= entry(i, j) * rhs[j];
    }
}

NormReport norms(const Polynomial& w, const spectrum::WeightedGrid& grid) {
    NormReport r;
    auto vals = eval_on_grid(w, grid);
    auto grads = eval_gradient_on_grid(w, grid);
    r.l2_rho = std::sqrt(std::max(0.0, inner_rho(grid, vals, vals)));
    r.h_norm = std::sqrt(std::max(0.0, inner_H(grid, vals, grads, vals, grads)));

    const int N = grid.dim;
    FlatPoly fw = flatten(w);
    std::vector<FlatPoly> d1, d2, d3;
    for (int a = 0; a < N; ++a) d1.push_back(flatten(w.derivative(a)));
    for (int a = 0; a < N; ++a)
        for (int b = a; b < N; ++b) d2.push_back(flatten(w.derivative(a).derivative(b)));
    for (int a = 0; a < N; ++a)
        for (int b = a; b < N; ++b)
            for (int c = b; c < N; ++c)
                d3.push_back(flatten(w.derivative(a).derivative(b).derivative(c)));
    auto probe = [&](const double* z, double rho) {
        r.sup = std::max(r.sup, std::abs(fw.eval(z)));
        for (const auto& p : d1) r.sup_grad = std::max(r.sup_grad, std::abs(p.eval(z)));
        for (const auto& p : d2) r.sup_rho_d2 = std::max(r.sup_rho_d2, rho * std::abs(p.eval(z)));
        for (const auto& p : d3)
            r.sup_rho2_d3 = std::max(r.sup_rho2_d3, rho * rho * std::abs(p.eval(z)));
    };
    // sup parts on a dense refinement of the quadrature grid (Gauss nodes
    // cluster near the boundary) plus a uniform radial sweep through the axis
    // directions and diagonals, which covers r = 0 and the bulk
    spectrum::WeightedGrid fine = spectrum::WeightedGrid::for_degree(N, 3 * grid.exact_degree + 8);
    for (std::size_t i = 0; i < fine.size(); ++i)
        probe(fine.nodes[i].data(), fine.rho_values[i]);
    std::vector<std::array<double, 3>> dirs;
    if (N == 1) {
        dirs = {{1, 0, 0}};
    } else if (N == 2) {
        for (int a = 0; a < 16; ++a)
            dirs.push_back({std::cos(a * 0.19634954084936207), // pi/16
                            std::sin(a * 0.19634954084936207), 0.0});
    } else {
        const double s3 = 1.0 / std::sqrt(3.0), s2 = 1.0 / std::sqrt(2.0);
        dirs = {{1, 0, 0}, {0, 1, 0},   {0, 0, 1},   {s2, s2, 0},  {s2, 0, s2},
                {0, s2, s2}, {s3, s3, s3}, {s3, -s3, s3}, {s3, s3, -s3}, {-s3, s3, s3}};
    }
    const int K = 4000;
    for (const auto& d : dirs)
        for (int i = -K; i <= K; ++i) {
            double t = i / double(K);
            if (N > 1 && t < 0) continue;
            double z[3] = {t * d[0], t * d[1], t * d[2]};
            probe(z, 0.5 * (1.0 - t * t));
        }
    r.w_norm = r.sup + r.sup_grad + r.sup_rho_d2 + r.sup_rho2_d3;
    return r;
}

NormReport norms(const transform::PerturbationField& w) {
    if (w.grid.size() < 4 || w.grid.size() != w.values.size())
        throw std::invalid_argument("norms: need at least 4 profile samples");
    const bool line = w.geom == transform::Geometry::line;
    CubicSpline s(w.grid, w.values);
    NormReport r;

    auto grid = spectrum::WeightedGrid::for_degree(w.dim, 48);
    std::vector<double> vals(grid.size());
    std::vector<std::array<double, 3>> grads(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = grid.nodes[i];
        if (line) {
            vals[i] = s(p[0]);
            grads[i] = {s.derivative(p[0]), 0.0, 0.0};
        } else {
            double rr = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            vals[i] = s(rr);
            double d = s.derivative(rr) / rr;
            grads[i] = {d * p[0], d * p[1], d * p[2]};
        }
    }
    r.l2_rho = std::sqrt(std::max(0.0, inner_rho(grid, vals, vals)));
    r.h_norm = std::sqrt(std::max(0.0, inner_H(grid, vals, grads, vals, grads)));

    double lo = w.grid.front(), hi = w.grid.back();
    double cut = std::max(lo, 1e-3); // tangential parts skip the r -> 0 quotient
    int K = std::max<int>(2000, 4 * static_cast<int>(w.grid.size()));
    for (int j = 0; j <= K; ++j) {
        double x = lo + (hi - lo) * j / K;
        double rho = std::max(0.0, 0.5 * (1.0 - x * x));
        double d1 = s.derivative(x), d2 = s.second_derivative(x), d3 = s.third_derivative(x);
        double h2 = std::abs(d2), h3 = std::abs(d3);
        if (!line && x >= cut) {
            h2 = std::max(h2, std::abs(d1 / x));
            h3 = std::max(h3, std::abs((d2 - d1 / x) / x));
        }
        r.sup = std::max(r.sup, std::abs(s(x)));
        r.sup_grad = std::max(r.sup_grad, std::abs(d1));
        r.sup_rho_d2 = std::max(r.sup_rho_d2, rho * h2);
        r.sup_rho2_d3 = std::max(r.sup_rho2_d3, rho * rho * h3);
    }
    r.w_norm = r.sup + r.sup_grad + r.sup_rho_d2 + r.sup_rho2_d3;
    return r;
}

LogLinearFit fit_loglinear(const std::vector<double>& t, const std::vector<double>& y,
                           double floor) {
    if (t.size() != y.size()) throw std::invalid_argument("fit_loglinear: size mismatch");
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double a = std::abs(y[i]);
        if (a > floor) {
            ts.push_back(t[i]);
            ls.push_back(std::log(a));
        }
    }
    if (ts.size() < 4)
        throw std::runtime_error("fit_loglinear: fewer than 4 usable samples");
    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    double denom = n * stt - st * st;
    if (denom == 0.0) throw std::runtime_error("fit_loglinear: degenerate time samples");
    LogLinearFit f;
    f.slope = (n * stl - st * sl) / denom;
    f.intercept = (sl - f.slope * st) / n;
    f.samples = static_cast<int>(ts.size());
    double ss_res = 0, ss_tot = 0, mean = sl / n;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double fit = f.intercept + f.slope * ts[i];
        ss_res += (ls[i] - fit) * (ls[i] - fit);
        ss_tot += (ls[i] - mean) * (ls[i] - mean);
    }
    f.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    return f;
}

} // namespace tfe::linops
