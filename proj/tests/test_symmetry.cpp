#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "tfe/spectrum.hpp"
#include "tfe/symmetry.hpp"

using namespace tfe;
using namespace tfe::symmetry;

namespace {

using Series = std::vector<std::int64_t>; // coefficients 0..lmax

Series mul(const Series& a, const Series& b, int lmax) {
    Series c(lmax + 1, 0);
    for (int i = 0; i <= lmax; ++i)
        for (int j = 0; i + j <= lmax; ++j)
            if (i < (int)a.size() && j < (int)b.size()) c[i + j] += a[i] * b[j];
    return c;
}

Series geometric(int step, int lmax) { // 1/(1-s^step)
    Series c(lmax + 1, 0);
    for (int i = 0; i * step <= lmax; ++i) c[i * step] = 1;
    return c;
}

Series one_plus(int power, int lmax) { // 1 + s^power
    Series c(lmax + 1, 0);
    c[0] = 1;
    if (power <= lmax) c[power] = 1;
    return c;
}

} // namespace

TEST_CASE("group constructors produce valid groups of the right order") {
    for (int n : {1, 2, 3, 5, 8}) {
        CHECK(cyclic_group(n, 2).order() == (std::size_t)n);
        CHECK(cyclic_group(n, 3).order() == (std::size_t)n);
        CHECK(dihedral_group(n, 2).order() == (std::size_t)(2 * n));
        CHECK(dihedral_group(n, 3).order() == (std::size_t)(2 * n));
    }
    CHECK(tetrahedral_group().order() == 12);
    CHECK(octahedral_group().order() == 24);
    CHECK(icosahedral_group().order() == 60);
}

TEST_CASE("validate_group rejects broken inputs") {
    FiniteGroup g;
    g.dim = 2;
    g.name = "broken";
    // not starting with the identity
    g.elements = {{0, -1, 1, 0, 0, 0, 0, 0, 0}};
    CHECK_THROWS(validate_group(g));
    // identity alone passes
    g.elements = {{1, 0, 0, 1, 0, 0, 0, 0, 0}};
    CHECK_NOTHROW(validate_group(g));
    // non-orthogonal element
    g.elements.push_back({2, 0, 0, 1, 0, 0, 0, 0, 0});
    CHECK_THROWS(validate_group(g));
    // orthogonal but not closed: a 45-degree rotation alone
    double c = std::sqrt(0.5);
    g.elements = {{1, 0, 0, 1, 0, 0, 0, 0, 0}, {c, -c, c, c, 0, 0, 0, 0, 0}};
    CHECK_THROWS(validate_group(g));
}

TEST_CASE("group_from_elements closes generators") {
    // the rotation by 90 degrees generates the 4-element cyclic group
    FiniteGroup g = group_from_elements("c4", 2, {{0, -1, 1, 0, 0, 0, 0, 0, 0}});
    CHECK(g.order() == 4);
    CHECK_NOTHROW(validate_group(g));
}

TEST_CASE("planar invariant-harmonic series match their closed forms") {
    const int lmax = 20;
    for (int n : {2, 3, 4, 5, 6, 7}) {
        // cyclic: (1 + s^n) / (1 - s^n)
        Series want = mul(one_plus(n, lmax), geometric(n, lmax), lmax);
        auto got = molien_harmonic(cyclic_group(n, 2), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(got[l] == want[l]);
        // dihedral: 1 / (1 - s^n)
        Series wantd = geometric(n, lmax);
        auto gotd = molien_harmonic(dihedral_group(n, 2), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(gotd[l] == wantd[l]);
    }
}

TEST_CASE("spatial invariant-harmonic series match their closed forms") {
    const int lmax = 20;
    for (int n : {2, 3, 4, 5}) {
        // axial cyclic: (1+s^n) / ((1-s)(1-s^n))
        Series want =
            mul(mul(one_plus(n, lmax), geometric(1, lmax), lmax), geometric(n, lmax), lmax);
        auto got = molien_harmonic(cyclic_group(n, 3), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(got[l] == want[l]);
        // axial dihedral: (1+s^{n+1}) / ((1-s^2)(1-s^n))
        Series wantd =
            mul(mul(one_plus(n + 1, lmax), geometric(2, lmax), lmax), geometric(n, lmax), lmax);
        auto gotd = molien_harmonic(dihedral_group(n, 3), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(gotd[l] == wantd[l]);
    }
    // tetrahedral: (1+s^6) / ((1-s^4)(1-s^3))
    {
        Series want =
            mul(mul(one_plus(6, lmax), geometric(4, lmax), lmax), geometric(3, lmax), lmax);
        auto got = molien_harmonic(tetrahedral_group(), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(got[l] == want[l]);
    }
    // octahedral: (1+s^9) / ((1-s^4)(1-s^6))
    {
        Series want =
            mul(mul(one_plus(9, lmax), geometric(4, lmax), lmax), geometric(6, lmax), lmax);
        auto got = molien_harmonic(octahedral_group(), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(got[l] == want[l]);
    }
    // icosahedral: (1+s^15) / ((1-s^10)(1-s^6))
    {
        Series want =
            mul(mul(one_plus(15, lmax), geometric(10, lmax), lmax), geometric(6, lmax), lmax);
        auto got = molien_harmonic(icosahedral_group(), lmax);
        for (int l = 0; l <= lmax; ++l) CHECK(got[l] == want[l]);
    }
}

TEST_CASE("harmonic and polynomial variants satisfy h = (1 - s^2) p") {
    const int lmax = 20;
    std::vector<FiniteGroup> groups = {cyclic_group(5, 2),  dihedral_group(4, 2),
                                       cyclic_group(3, 3),  dihedral_group(6, 3),
                                       tetrahedral_group(), octahedral_group(),
                                       icosahedral_group()};
    for (const auto& g : groups) {
        auto h = molien_harmonic(g, lmax);
        auto p = molien_polynomial(g, lmax);
        for (int l = 0; l <= lmax; ++l) {
            std::int64_t want = p[l] - (l >= 2 ? p[l - 2] : 0);
            CHECK(h[l] == want);
        }
    }
}

TEST_CASE("generating-series coefficients equal the brute-force Reynolds rank") {
    std::vector<FiniteGroup> groups = {cyclic_group(3, 2), dihedral_group(3, 2),
                                       cyclic_group(4, 3), dihedral_group(5, 3),
                                       tetrahedral_group()};
    for (const auto& g : groups) {
        auto h = molien_harmonic(g, 8);
        for (int l = 0; l <= 8; ++l)
            CHECK(h[l] == invariant_dimension_bruteforce(g, l));
    }
}

TEST_CASE("active-mode report: threefold symmetry suppresses the low angular blocks") {
    auto table = spectrum::spectrum_table(2, 130.0);
    auto rep = active_modes(cyclic_group(3, 2), table);
    CHECK(rep.first_active_angular_l == 3);
    for (const auto& e : rep.entries) {
        if (e.mu == 0) {
            CHECK(e.mass_mode);
            CHECK(e.active_multiplicity == 1);
        }
        if (e.mu == spectrum::mu_of(1, 0, 2)) CHECK(e.active_multiplicity == 0);
        if (e.mu == spectrum::mu_of(2, 0, 2)) CHECK(e.active_multiplicity == 0);
        if (e.mu == spectrum::mu_of(3, 0, 2)) {
            // the l=3 pair is threefold-invariant (cos/sin of 3 phi); mu = 48
            // also hosts the radially symmetric (0,1) mode, always active
            CHECK(e.active_multiplicity == 3);
        }
    }

    // dihedral symmetry keeps the same inactive degrees but halves the
    // dimension of each surviving angular pair (sin branch dies)
    auto repd = active_modes(dihedral_group(3, 2), table);
    CHECK(repd.first_active_angular_l == 3);
    for (const auto& e : repd.entries)
        if (e.mu == spectrum::mu_of(3, 0, 2)) CHECK(e.active_multiplicity == 2);
}
