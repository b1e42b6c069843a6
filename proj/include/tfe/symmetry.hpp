// Finite orthogonal symmetry groups and their invariant-harmonic counting:
// Molien generating series h_E(s) = (1/|E|) sum_g (1-s^2)/det(I - s g)
// (harmonic variant) and p_E(s) = (1/|E|) sum_g 1/det(I - s g) (full
// polynomial variant), a brute-force Reynolds-projector oracle, and the
// annotation of spectrum tables with group-active multiplicities.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tfe/spectrum.hpp"

namespace tfe::symmetry {

struct FiniteGroup {
    int dim = 2;                                  // 2 or 3
    std::string name;
    std::vector<std::array<double, 9>> elements;  // row-major dim x dim, first = identity
    std::size_t order() const { return elements.size(); }
};

// builders; n >= 1 for the cyclic/dihedral families
FiniteGroup cyclic_group(int n, int dim);
FiniteGroup dihedral_group(int n, int dim);
FiniteGroup tetrahedral_group(); // order 12 (rotations)
FiniteGroup octahedral_group();  // order 24
FiniteGroup icosahedral_group(); // order 60

// closure of arbitrary orthogonal generators (validated, saturated, capped)
FiniteGroup group_from_elements(const std::string& name, int dim,
                                const std::vector<std::array<double, 9>>& generators,
                                std::size_t max_order = 1024);

// checks orthogonality of each element and closure under products (tol 1e-10);
// throws std::invalid_argument on failure. Builders call this themselves.
void validate_group(const FiniteGroup& g, double tol = 1e-10);

// coefficients [s^0..s^lmax]; computed in >= 50-digit floats, rounded to
// integers with per-coefficient residual < 1e-6 asserted
std::vector<std::int64_t> molien_harmonic(const FiniteGroup& g, int lmax);
std::vector<std::int64_t> molien_polynomial(const FiniteGroup& g, int lmax);

// dim of the E-invariant subspace of degree-l spherical harmonics via the
// rank of the Reynolds projector in the module-spectrum harmonic basis.
// Throws std::runtime_error if projector eigenvalues land in (tol, 1-tol).
std::int64_t invariant_dimension_bruteforce(const FiniteGroup& g, int l, double tol = 1e-8);

struct ActiveEntry {
    std::int64_t mu;
    std::int64_t total_multiplicity;
    std::int64_t active_multiplicity; // sum over (l,k) modes of dim H_l^E
    bool mass_mode;                   // mu == 0: removed by the mass constraint
};

struct ActiveModeReport {
    std::string group;
    int dim;
    std::vector<ActiveEntry> entries;       // ascending mu, mirrors the spectrum table
    std::int64_t first_active_mu = -1;      // smallest active mu > 0 (-1 if none)
    int first_active_angular_l = -1;        // smallest l >= 1 with dim H_l^E > 0 in table
};

ActiveModeReport active_modes(const FiniteGroup& g, const spectrum::SpectrumTable& table);

} // namespace tfe::symmetry
