#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "tfe/polynomial.hpp"
#include "tfe/quadrature.hpp"
#include "tfe/spectrum.hpp"

using namespace tfe;
using namespace tfe::spectrum;

TEST_CASE("lambda closed form at hand-computed points") {
    // lambda = 2(l+2k) + 2k(k+l+N/2-1), always an integer
    CHECK(lambda_of(0, 0, 1) == 0);
    CHECK(lambda_of(1, 0, 1) == 2);
    CHECK(lambda_of(0, 1, 1) == 5); // 4 + 2(1/2) = 4 + N for N=1
    CHECK(lambda_of(1, 1, 1) == 9);
    CHECK(lambda_of(0, 2, 1) == 14);
    CHECK(lambda_of(1, 2, 1) == 20);
    for (int N = 1; N <= 5; ++N) {
        CHECK(lambda_of(0, 1, N) == 4 + N);
        CHECK(lambda_of(1, 0, N) == 2);
        CHECK(lambda_of(2, 0, N) == 4); // pure-formula value, any N
    }
}

TEST_CASE("mu = lambda^2 + N lambda, exact integers") {
    for (int N : {1, 2, 3, 5}) {
        CHECK(mu_of(1, 0, N) == 4 + 2 * N);
        CHECK(mu_of(2, 0, N) == 16 + 4 * N);
    }
    CHECK(mu_of(0, 1, 1) == 30);
    // one-dimensional spectrum marches 0, 6, 30, 90, 210, 420
    std::multiset<std::int64_t> mus;
    for (int l = 0; l <= 1; ++l)
        for (int k = 0; k <= 2; ++k) mus.insert(mu_of(l, k, 1));
    CHECK(mus == std::multiset<std::int64_t>{0, 6, 30, 90, 210, 420});
}

TEST_CASE("domain restrictions") {
    CHECK(lambda_of(2, 0, 1) == 4); // formula is total in l
    CHECK_THROWS(make_mode(2, 1, 0, 1)); // but S^0 has no l=2 harmonic
    CHECK_THROWS(multiplicity(2, 1));
    CHECK_THROWS(lambda_of(-1, 0, 2));
    CHECK_THROWS(lambda_of(0, -1, 2));
    CHECK_THROWS(lambda_of(0, 0, 0));
}

TEST_CASE("spherical-harmonic multiplicities") {
    // C(N+l-1, N-1) - C(N+l-3, N-1)
    CHECK(multiplicity(0, 1) == 1);
    CHECK(multiplicity(1, 1) == 1);
    CHECK(multiplicity(0, 2) == 1);
    for (int l = 1; l <= 10; ++l) CHECK(multiplicity(l, 2) == 2);
    for (int l = 0; l <= 10; ++l) CHECK(multiplicity(l, 3) == 2 * l + 1);
    CHECK(multiplicity(2, 5) == 14); // C(6,4) - C(4,4) = 15 - 1
}

TEST_CASE("solid harmonics are homogeneous harmonic polynomials") {
    for (int N : {2, 3}) {
        for (int l = 0; l <= 6; ++l)
            for (int n = 1; n <= multiplicity(l, N); ++n) {
                Polynomial S = solid_harmonic(l, n, N);
                CHECK(S.degree() == l);
                Polynomial lap = S.laplacian().pruned(1e-12);
                CHECK(lap.empty());
            }
    }
}

TEST_CASE("solid harmonics are mutually orthogonal in the rho inner product") {
    for (int N : {2, 3}) {
        WeightedGrid grid = WeightedGrid::for_degree(N, 2 * 6 + 2);
        for (int l = 0; l <= 6; ++l) {
            int m = static_cast<int>(multiplicity(l, N));
            std::vector<std::vector<double>> vals;
            for (int n = 1; n <= m; ++n)
                vals.push_back(eval_on_grid(solid_harmonic(l, n, N), grid));
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b) {
                    double ip = inner_rho(grid, vals[a], vals[b]);
                    double na = std::sqrt(inner_rho(grid, vals[a], vals[a]));
                    double nb = std::sqrt(inner_rho(grid, vals[b], vals[b]));
                    CHECK(std::abs(ip) / (na * nb) < 1e-13);
                }
        }
    }
}

TEST_CASE("radial factor has c_0 = 1 and the hand-expanded (0,2) profile") {
    // psi_{0,2} in one dimension: 1 - 14 x^2 + 21 x^4
    Eigenmode m = make_mode(0, 1, 2, 1);
    CHECK(m.lambda == 14);
    CHECK(m.mu == 210);
    REQUIRE(m.radial_coeffs.size() == 3);
    CHECK(m.radial_coeffs[0] == Rational(1));
    CHECK(m.radial_coeffs[1] == Rational(-14));
    CHECK(m.radial_coeffs[2] == Rational(21));

    Polynomial p = eigenfunction(m);
    double xs[1] = {0.37};
    double expect = 1.0 - 14.0 * 0.37 * 0.37 + 21.0 * std::pow(0.37, 4);
    CHECK(p.eval(std::span<const double>(xs, 1)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("eigenfunction polynomial and Horner evaluation agree") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    for (int N = 1; N <= 3; ++N) {
        int lcap = N == 1 ? 1 : 4;
        for (int l = 0; l <= lcap; ++l)
            for (int k = 0; k <= 2; ++k)
                for (int n = 1; n <= multiplicity(l, N); ++n) {
                    Eigenmode m = make_mode(l, n, k, N);
                    Polynomial p = eigenfunction(m);
                    std::vector<std::array<double, 3>> pts(16);
                    for (auto& pt : pts) {
                        pt = {0, 0, 0};
                        for (int d = 0; d < N; ++d) pt[d] = U(rng);
                    }
                    auto fast = eval_eigenfunction(m, pts);
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        double slow = p.eval(std::span<const double>(pts[i].data(), N));
                        CHECK(fast[i] == doctest::Approx(slow).epsilon(1e-12));
                    }
                }
    }
}

TEST_CASE("modes satisfy the eigenvalue equation via two independent routes") {
    // route 1: symbolic composition of the operator on polynomials
    // route 2: pointwise operator from numerically evaluated derivatives
    for (int N = 1; N <= 3; ++N) {
        WeightedGrid grid = WeightedGrid::for_degree(N, 30);
        int lcap = N == 1 ? 1 : 3;
        for (int l = 0; l <= lcap; ++l)
            for (int k = 0; k <= 2; ++k) {
                Eigenmode m = make_mode(l, 1, k, N);
                Polynomial psi = eigenfunction(m);
                auto vals = eval_on_grid(psi, grid);
                double nrm = std::sqrt(inner_rho(grid, vals, vals));

                Polynomial Lsym = apply_L(psi);
                auto lap = eval_on_grid(psi.laplacian(), grid);
                auto grad = eval_gradient_on_grid(psi, grid);
                auto Lpt = apply_L(grid, lap, grad);
                auto Lsv = eval_on_grid(Lsym, grid);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    CHECK(Lsv[i] == doctest::Approx(Lpt[i]).epsilon(1e-10));

                // (L^2 + N L) psi = mu psi
                Polynomial LL = apply_L(Lsym);
                auto LLv = eval_on_grid(LL, grid);
                std::vector<double> res(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i)
                    res[i] = LLv[i] + N * Lsv[i] - static_cast<double>(m.mu) * vals[i];
                double rn = std::sqrt(inner_rho(grid, res, res));
                CHECK(rn / nrm < 1e-9);
            }
    }
}

TEST_CASE("two-dimensional degeneracy: mu_{l,k} collides with mu_{l(k+1)+k(k+2),0}") {
    for (int l = 0; l <= 10; ++l)
        for (int k = 0; k <= 5; ++k) {
            int lp = l * (k + 1) + k * (k + 2);
            CHECK(mu_of(l, k, 2) == mu_of(lp, 0, 2));
        }
}

TEST_CASE("spectrum table groups exactly and respects mu_max") {
    SpectrumTable t = spectrum_table(2, 200.0);
    REQUIRE(!t.entries.empty());
    std::int64_t prev = -1;
    for (const auto& e : t.entries) {
        CHECK(e.mu > prev);
        prev = e.mu;
        CHECK(e.mu <= 200);
        std::int64_t total = 0;
        for (const auto& mk : e.modes) {
            CHECK(mu_of(mk.l, mk.k, 2) == e.mu);
            ++total;
        }
        CHECK(total == e.total_multiplicity);
    }
    // ground mode present exactly once
    CHECK(t.entries.front().mu == 0);
    CHECK(t.entries.front().total_multiplicity == 1);

    // N=1 table lists 0,6,30,90,210,420 with unit multiplicities
    SpectrumTable t1 = spectrum_table(1, 420.0);
    REQUIRE(t1.entries.size() == 6);
    std::int64_t want[6] = {0, 6, 30, 90, 210, 420};
    for (int i = 0; i < 6; ++i) {
        CHECK(t1.entries[i].mu == want[i]);
        CHECK(t1.entries[i].total_multiplicity == 1);
    }
}

TEST_CASE("first excited translation block") {
    // mu_{1,0} = 4 + 2N with multiplicity N (one per coordinate axis)
    for (int N : {2, 3}) {
        SpectrumTable t = spectrum_table(N, 4.0 + 2 * N);
        const auto& e = t.entries.back();
        CHECK(e.mu == 4 + 2 * N);
        CHECK(e.total_multiplicity == N);
    }
}
