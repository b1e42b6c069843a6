// Quadrature on the unit ball against rho^sigma dz, rho(z) = (1-|z|^2)/2,
// sigma in {0,1,2}: Gauss-Jacobi in r^2 (Golub-Welsch) tensored with
// S^{N-1} rules (point pair / trapezoid / Gauss-Legendre x trapezoid).
// Also hosts the weighted inner products and the drift-diffusion operator
// L w = -rho Lap w + 2 z . grad w in pointwise and polynomial form.
#pragma once

#include <array>
#include <vector>

#include "tfe/polynomial.hpp"

namespace tfe::spectrum {

// nodes/weights for int_0^1 (1-u)^alpha u^beta f(u) du, exact for deg f <= 2n-1
void gauss_jacobi(int n, double alpha, double beta,
                  std::vector<double>& nodes, std::vector<double>& weights);

struct WeightedGrid {
    int dim = 1;
    int exact_degree = 0; // polynomial degree integrated exactly against rho^2 dz
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;    // positive Lebesgue weights (measure dz)
    std::vector<double> rho_values; // rho at nodes, rho = (1-|z|^2)/2

    std::size_t size() const { return nodes.size(); }

    // exact for polynomial integrands f of degree <= degree when sigma <= 2:
    // int_{B_1} f rho^sigma dz
    static WeightedGrid for_degree(int N, int degree);
};

// int f rho^sigma dz for sampled values (f.size() == grid.size())
double integrate(const WeightedGrid& g, const std::vector<double>& f, int sigma);

// <f, g>_rho = int f g rho dz
double inner_rho(const WeightedGrid& g, const std::vector<double>& f,
                 const std::vector<double>& h);

// H inner product: <f,g>_rho + int grad f . grad g rho^2 dz
double inner_H(const WeightedGrid& g, const std::vector<double>& f,
               const std::vector<std::array<double, 3>>& grad_f,
               const std::vector<double>& h,
               const std::vector<std::array<double, 3>>& grad_h);

std::vector<double> eval_on_grid(const Polynomial& p, const WeightedGrid& g);
std::vector<std::array<double, 3>> eval_gradient_on_grid(const Polynomial& p,
                                                         const WeightedGrid& g);

// L w = -rho Lap w + 2 z . grad w, pointwise from supplied derivatives
std::vector<double> apply_L(const WeightedGrid& g, const std::vector<double>& laplacian,
                            const std::vector<std::array<double, 3>>& grad);

// symbolic form for polynomial fields
Polynomial apply_L(const Polynomial& w);

} // namespace tfe::spectrum
