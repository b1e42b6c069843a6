// Dense-exponent multivariate polynomials in up to 3 variables.
// Backbone for eigenfunction evaluation, exact differentiation and the
// group action f -> f(A x) used by the Reynolds projector.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace tfe {

class Polynomial {
public:
    using Expo = std::array<int, 3>; // exponents, unused axes fixed at 0

    explicit Polynomial(int dim = 1);

    static Polynomial constant(int dim, double c);
    static Polynomial variable(int dim, int axis); // x_axis
    // sum_j coeffs[j] * |x|^{2j}
    static Polynomial radial_in_r2(int dim, std::span<const double> coeffs);

    int dim() const { return dim_; }
    int degree() const; // total degree, -1 for the zero polynomial
    bool empty() const { return terms_.empty(); }
    const std::map<Expo, double>& terms() const { return terms_; }

    void add_term(const Expo& e, double c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial& operator+=(const Polynomial& o);

    Polynomial derivative(int axis) const;
    Polynomial laplacian() const;
    std::vector<Polynomial> gradient() const;

    // f(A x) for a dim x dim matrix A (row-major span of dim*dim entries)
    Polynomial compose_linear(std::span<const double> A) const;

    double eval(std::span<const double> x) const;

    // strips terms with |coeff| <= tol (cleans roundoff dust after composition)
    Polynomial pruned(double tol = 0.0) const;

private:
    int dim_;
    std::map<Expo, double> terms_;
};

// flattened form for tight evaluation loops (pow tables per point)
struct FlatPoly {
    int dim = 1;
    std::vector<std::array<std::uint8_t, 3>> expo;
    std::vector<double> coef;
    int max_deg = 0;

    double eval(const double* x) const;
};

FlatPoly flatten(const Polynomial& p);

} // namespace tfe
