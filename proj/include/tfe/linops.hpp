// Shared numerical plumbing: not-a-knot cubic splines (interpolation,
// derivatives, definite integrals), a banded LU with partial pivoting for the
// implicit solver, weighted/sup norm evaluators for perturbation fields, and
// log-linear least-squares fitting of decay exponents.
#pragma once

#include <array>
#include <vector>

#include "tfe/fields.hpp"
#include "tfe/polynomial.hpp"
#include "tfe/quadrature.hpp"

namespace tfe::linops {

class CubicSpline {
public:
    CubicSpline() = default;
    // not-a-knot end conditions; x strictly increasing, size >= 4
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;
    double third_derivative(double t) const; // piecewise constant
    double integral(double a, double b) const;

    const std::vector<double>& knots() const { return x_; }

private:
    std::size_t segment(double t) const;
    std::vector<double> x_, y_, b_, c_, d_; // y + b dx + c dx^2 + d dx^3
};

// LAPACK-style general banded LU (kl sub-, ku superdiagonals) with partial
// pivoting; solves in place. Storage: band(row i of band = diagonal ku-i).
class BandedLU {
public:
    BandedLU(int n, int kl, int ku);

    double& at(int i, int j);           // assemble A(i,j), |i-j| within band
    void clear();
    void factorize();
    void solve(std::vector<double>& rhs) const;

private:
    int n_, kl_, ku_;
    std::vector<double> ab_; // (2kl+ku+1) x n, column-major bands
    std::vector<int> piv_;
    bool factored_ = false;
};

struct NormReport {
    double l2_rho = 0;      // ||w||_{L^2(rho)}
    double h_norm = 0;      // sqrt(||w||^2 + ||sqrt(rho) grad w||^2)
    double sup = 0;         // ||w||_inf
    double sup_grad = 0;    // ||grad w||_inf
    double sup_rho_d2 = 0;  // ||rho grad^2 w||_inf (max-abs entry)
    double sup_rho2_d3 = 0; // ||rho^2 grad^3 w||_inf
    double w_norm = 0;      // sum of the four sup parts
};

// norms of a polynomial perturbation on the unit ball; sup parts are taken on
// a refinement of the quadrature grid (3x node density)
NormReport norms(const Polynomial& w, const spectrum::WeightedGrid& grid);

// norms of a sampled perturbation profile, spline-differentiated. Radial
// profiles use the rotationally symmetric derivative tensors: the Hessian
// entries are w'' and w'/r, the third-order entries w''' and (w''- w'/r)/r.
NormReport norms(const transform::PerturbationField& w);

struct LogLinearFit {
    double slope = 0;     // of log|y| vs t
    double intercept = 0;
    double r_squared = 0;
    int samples = 0;
};

// least-squares on (t, log|y|); drops samples with |y| <= floor
LogLinearFit fit_loglinear(const std::vector<double>& t, const std::vector<double>& y,
                           double floor = 1e-12);

} // namespace tfe::linops
