#include "tfe/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tfe::spectrum {

void gauss_jacobi(int n, double alpha, double beta,
                  std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (alpha <= -1.0 || beta <= -1.0)
        throw std::invalid_argument("gauss_jacobi: alpha, beta must be > -1");
    // Golub-Welsch on the monic Jacobi recurrence over [-1,1] (Gautschi's
    // coefficients), then affine map to [0,1]
    const double ab = alpha + beta;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        double ak;
        if (k == 0)
            ak = (beta - alpha) / (ab + 2.0);
        else
            ak = (beta * beta - alpha * alpha) /
                 ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
        J(k, k) = ak;
        if (k + 1 < n) {
            double kk = k + 1.0;
            double bk = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
                        ((2.0 * kk + ab) * (2.0 * kk + ab) * (2.0 * kk + ab + 1.0) *
                         (2.0 * kk + ab - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(bk);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // mu0 = int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    double mu0 = std::pow(2.0, ab + 1.0) * std::beta(alpha + 1.0, beta + 1.0);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (1.0 + es.eigenvalues()(i)); // [-1,1] -> [0,1]
        double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0 / std::pow(2.0, ab + 1.0);
    }
}

WeightedGrid WeightedGrid::for_degree(int N, int degree) {
    if (N < 1 || N > 3) throw std::invalid_argument("WeightedGrid: N must be 1..3");
    if (degree < 0) throw std::invalid_argument("WeightedGrid: degree must be >= 0");
    // rho^2 adds 4 to the radial degree; angular degree is unaffected
    const int D = degree + 4;
    // radial rule in u = r^2 with weight u^{(N-2)/2}: int_0^1 f(r) r^{N-1} dr
    //   = 1/2 int_0^1 f(sqrt u) u^{(N-2)/2} du, exact for f even of degree <= 4n-2
    int n_rad = (D + 2 + 3) / 4 + 1;
    std::vector<double> u, wu;
    gauss_jacobi(n_rad, 0.0, 0.5 * (N - 2), u, wu);

    WeightedGrid g;
    g.dim = N;
    g.exact_degree = degree;
    const double pi = std::numbers::pi;
    if (N == 1) {
        for (int i = 0; i < n_rad; ++i) {
            double r = std::sqrt(u[i]);
            double w = 0.5 * wu[i];
            for (double s : {1.0, -1.0}) {
                g.nodes.push_back({s * r, 0.0, 0.0});
                g.weights.push_back(w);
            }
        }
    } else if (N == 2) {
        int M = degree + 2; // trapezoid exact through trig degree M-1
        for (int i = 0; i < n_rad; ++i) {
            double r = std::sqrt(u[i]);
            double w = 0.5 * wu[i] * (2.0 * pi / M);
            for (int j = 0; j < M; ++j) {
                double phi = 2.0 * pi * j / M;
                g.nodes.push_back({r * std::cos(phi), r * std::sin(phi), 0.0});
                g.weights.push_back(w);
            }
        }
    } else {
        int M = degree + 2;
        int n_th = (degree + 2) / 2 + 1;
        std::vector<double> tm, tw; // Gauss-Legendre in c = cos(theta) via [0,1] map
        gauss_jacobi(n_th, 0.0, 0.0, tm, tw);
        for (int i = 0; i < n_rad; ++i) {
            double r = std::sqrt(u[i]);
            for (int t = 0; t < n_th; ++t) {
                double c = 2.0 * tm[t] - 1.0;
                double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                double w = 0.5 * wu[i] * (2.0 * tw[t]) * (2.0 * pi / M);
                for (int j = 0; j < M; ++j) {
                    double phi = 2.0 * pi * j / M;
                    g.nodes.push_back({r * s * std::cos(phi), r * s * std::sin(phi), r * c});
                    g.weights.push_back(w);
                }
            }
        }
    }
    g.rho_values.reserve(g.nodes.size());
    for (const auto& p : g.nodes) {
        double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        g.rho_values.push_back(0.5 * (1.0 - r2));
    }
    return g;
}

double integrate(const WeightedGrid& g, const std::vector<double>& f, int sigma) {
    if (f.size() != g.size()) throw std::invalid_argument("integrate: size mismatch");
    if (sigma < 0 || sigma > 2) throw std::invalid_argument("integrate: sigma must be 0..2");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double w = g.weights[i];
        if (sigma >= 1) w *= g.rho_values[i];
        if (sigma == 2) w *= g.rho_values[i];
        s += w * f[i];
    }
    return s;
}

double inner_rho(const WeightedGrid& g, const std::vector<double>& f,
                 const std::vector<double>& h) {
    if (f.size() != g.size() || h.size() != g.size())
        throw std::invalid_argument("inner_rho: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += g.weights[i] * g.rho_values[i] * f[i] * h[i];
    return s;
}

double inner_H(const WeightedGrid& g, const std::vector<double>& f,
               const std::vector<std::array<double, 3>>& grad_f,
               const std::vector<double>& h,
               const std::vector<std::array<double, 3>>& grad_h) {
    if (grad_f.size() != g.size() || grad_h.size() != g.size())
        throw std::invalid_argument("inner_H: size mismatch");
    double s = inner_rho(g, f, h);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < g.dim; ++a) dot += grad_f[i][a] * grad_h[i][a];
        s += g.weights[i] * g.rho_values[i] * g.rho_values[i] * dot;
    }
    return s;
}

std::vector<double> eval_on_grid(const Polynomial& p, const WeightedGrid& g) {
    FlatPoly fp = flatten(p);
    std::vector<double> out;
    out.reserve(g.size());
    for (const auto& z : g.nodes) out.push_back(fp.eval(z.data()));
    return out;
}

std::vector<std::array<double, 3>> eval_gradient_on_grid(const Polynomial& p,
                                                         const WeightedGrid& g) {
    std::vector<FlatPoly> d;
    for (int a = 0; a < g.dim; ++a) d.push_back(flatten(p.derivative(a)));
    std::vector<std::array<double, 3>> out(g.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < g.dim; ++a) out[i][a] = d[a].eval(g.nodes[i].data());
    return out;
}

std::vector<double> apply_L(const WeightedGrid& g, const std::vector<double>& laplacian,
                            const std::vector<std::array<double, 3>>& grad) {
    if (laplacian.size() != g.size() || grad.size() != g.size())
        throw std::invalid_argument("apply_L: size mismatch");
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double zdot = 0.0;
        for (int a = 0; a < g.dim; ++a) zdot += g.nodes[i][a] * grad[i][a];
        out[i] = -g.rho_values[i] * laplacian[i] + 2.0 * zdot;
    }
    return out;
}

Polynomial apply_L(const Polynomial& w) {
    int N = w.dim();
    Polynomial r2(N);
    for (int a = 0; a < N; ++a) {
        Polynomial::Expo e{0, 0, 0};
        e[a] = 2;
        r2.add_term(e, 1.0);
    }
    Polynomial rho = (Polynomial::constant(N, 1.0) - r2) * 0.5;
    Polynomial out = rho * w.laplacian() * -1.0;
    for (int a = 0; a < N; ++a)
        out += Polynomial::variable(N, a) * w.derivative(a) * 2.0;
    return out;
}

} // namespace tfe::spectrum
