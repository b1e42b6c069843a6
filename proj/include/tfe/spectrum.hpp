// Discrete spectrum of the linearized confined thin-film operator on the unit
// ball: exact eigenvalues lambda_{l,k} and mu_{l,k} = lambda^2 + N lambda,
// spherical-harmonic multiplicities, polynomial eigenfunctions
// psi_{l,n,k}(x) = [terminating 2F1 in |x|^2] * S_{l,n}(x)
// with S_{l,n} a real solid harmonic of degree l, and the grouped spectrum table.
#pragma once

#include <cstdint>
#include <vector>

#include "tfe/polynomial.hpp"
#include "tfe/rational.hpp"

namespace tfe::spectrum {

// lambda_{l,k} = 2(l+2k) + 2k(k+l+N/2-1); exact, asserts integrality.
// Defined for all N >= 1, l,k >= 0 (the formula is total even where no
// degree-l harmonic exists, e.g. N=1 with l >= 2).
std::int64_t lambda_of(int l, int k, int N);

// mu = lambda^2 + N lambda (decay rate of the l,k block)
std::int64_t mu_of(int l, int k, int N);

// number of linearly independent spherical harmonics of degree l in dimension N
std::int64_t multiplicity(int l, int N);

// real solid harmonic S_{l,n}, a homogeneous harmonic polynomial of degree l.
// Conventions: N=1: S_0=1, S_1=x (n=1).
//              N=2: n=1 -> Re(x+iy)^l, n=2 -> Im(x+iy)^l.
//              N=3: n=1 -> m=0; n=2m -> (m,cos); n=2m+1 -> (m,sin), m=1..l.
// Not unit-normalized; mutually orthogonal on the sphere.
Polynomial solid_harmonic(int l, int n, int N);

struct Eigenmode {
    int dim = 1;
    int l = 0;
    int n = 1;
    int k = 0;
    std::int64_t lambda = 0;
    std::int64_t mu = 0;
    std::vector<Rational> radial_coeffs; // c_0..c_k of the 2F1 factor, c_0 = 1
};

Eigenmode make_mode(int l, int n, int k, int N);

// polynomial form of psi_{l,n,k}; degree l + 2k
Polynomial eigenfunction(const Eigenmode& m);

// evaluate psi at points (Horner in |x|^2 times the solid harmonic; never x/|x|)
std::vector<double> eval_eigenfunction(const Eigenmode& m,
                                       const std::vector<std::array<double, 3>>& pts);

struct ModeKey {
    int l;
    int n;
    int k;
};

struct SpectrumEntry {
    std::int64_t mu;
    std::int64_t lambda_min;              // smallest lambda among members (for reporting)
    std::vector<ModeKey> modes;           // expanded over n = 1..multiplicity(l)
    std::int64_t total_multiplicity;
};

struct SpectrumTable {
    int dim;
    double mu_max;
    std::vector<SpectrumEntry> entries;   // ascending mu; exact integer grouping
};

SpectrumTable spectrum_table(int N, double mu_max);

} // namespace tfe::spectrum
