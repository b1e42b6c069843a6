#include "tfe/spectrum.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace tfe::spectrum {

namespace {

// the eigenvalue formula is total in l, k >= 0; the N=1 restriction to
// l in {0,1} binds only where a degree-l harmonic is required (multiplicity,
// solid_harmonic, make_mode)
void check_domain(int l, int k, int N) {
    if (N < 1) throw std::domain_error("spectrum: dimension must be >= 1");
    if (l < 0 || k < 0) throw std::domain_error("spectrum: l, k must be >= 0");
}

// C(n, r) by the multiplicative loop; every partial product is integral
std::int64_t binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || r > n) return 0;
    r = std::min(r, n - r);
    __int128 acc = 1;
    for (std::int64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > INT64_MAX) throw std::overflow_error("binomial: overflow");
    }
    return static_cast<std::int64_t>(acc);
}

} // namespace

std::int64_t lambda_of(int l, int k, int N) {
    check_domain(l, k, N);
    // 2(l+2k) + 2k(k+l+N/2-1) in exact rationals; always lands on an integer
    Rational half_N(N, 2);
    Rational lam = Rational(2 * (l + 2 * k)) +
                   Rational(2 * k) * (Rational(k + l - 1) + half_N);
    return lam.as_integer();
}

std::int64_t mu_of(int l, int k, int N) {
    std::int64_t lam = lambda_of(l, k, N);
    return lam * lam + static_cast<std::int64_t>(N) * lam;
}

std::int64_t multiplicity(int l, int N) {
    if (N < 1) throw std::domain_error("multiplicity: dimension must be >= 1");
    if (l < 0) throw std::domain_error("multiplicity: l must be >= 0");
    if (N == 1) {
        if (l > 1) throw std::domain_error("multiplicity: N=1 admits only l in {0,1}");
        return 1;
    }
    if (l == 0) return 1;
    if (l == 1) return N;
    // dim(harmonics of degree l) = dim P_l - dim P_{l-2}, P_d homogeneous in N vars;
    // equals (N+l-3)! (N+2l-2) / (l! (N-2)!) including the N=2 limit reading (= 2)
    return binomial(N + l - 1, N - 1) - binomial(N + l - 3, N - 1);
}

namespace {

// associated-Legendre part of the solid harmonic (Helgaker convention):
// Pi_l^m = sum_q gamma_q r^{2q} z^{l-2q-m},
// gamma_q = (-1)^q 2^{-l} C(l,q) C(2l-2q,l) (l-2q)!/(l-2q-m)!
Polynomial legendre_part(int l, int m) {
    Polynomial r2(3);
    r2.add_term({2, 0, 0}, 1.0);
    r2.add_term({0, 2, 0}, 1.0);
    r2.add_term({0, 0, 2}, 1.0);
    Polynomial z = Polynomial::variable(3, 2);
    Polynomial acc = Polynomial::constant(3, 0.0);
    for (int q = 0; 2 * q <= l - m; ++q) {
        Rational g = Rational((q % 2 == 0) ? 1 : -1, 1);
        g *= Rational(binomial(l, q));
        g *= Rational(binomial(2 * l - 2 * q, l));
        for (int j = l - 2 * q - m + 1; j <= l - 2 * q; ++j) g *= Rational(j);
        for (int j = 0; j < l; ++j) g /= Rational(2);
        Polynomial term = Polynomial::constant(3, g.to_double());
        for (int i = 0; i < q; ++i) term = term * r2;
        for (int i = 0; i < l - 2 * q - m; ++i) term = term * z;
        acc += term;
    }
    return acc;
}

// A_m = Re(x+iy)^m, B_m = Im(x+iy)^m as polynomials in (x, y [, z])
Polynomial sector(int m, bool sine, int dim) {
    Polynomial re = Polynomial::constant(dim, 1.0);
    Polynomial im = Polynomial::constant(dim, 0.0);
    Polynomial x = Polynomial::variable(dim, 0);
    Polynomial y = dim > 1 ? Polynomial::variable(dim, 1) : Polynomial::constant(dim, 0.0);
    for (int i = 0; i < m; ++i) {
        Polynomial re2 = re * x - im * y;
        Polynomial im2 = re * y + im * x;
        re = re2;
        im = im2;
    }
    return sine ? im : re;
}

} // namespace

Polynomial solid_harmonic(int l, int n, int N) {
    if (N < 1 || N > 3) throw std::domain_error("solid_harmonic: N must be 1..3");
    if (l < 0) throw std::domain_error("solid_harmonic: l must be >= 0");
    std::int64_t Nl = multiplicity(l, N);
    if (n < 1 || n > Nl)
        throw std::domain_error("solid_harmonic: n out of range 1.." + std::to_string(Nl));
    if (N == 1) {
        Polynomial p(1);
        p.add_term({l, 0, 0}, 1.0); // 1 or x
        return p;
    }
    if (N == 2) {
        if (l == 0) return Polynomial::constant(2, 1.0);
        return sector(l, n == 2, 2);
    }
    if (l == 0) return Polynomial::constant(3, 1.0);
    if (n == 1) return legendre_part(l, 0);
    int m = n / 2;
    bool sine = (n % 2 == 1);
    return (legendre_part(l, m) * sector(m, sine, 3)).pruned(0.0);
}

Eigenmode make_mode(int l, int n, int k, int N) {
    check_domain(l, k, N);
    std::int64_t Nl = multiplicity(l, N);
    if (n < 1 || n > Nl) throw std::domain_error("make_mode: n out of range");
    Eigenmode m;
    m.dim = N;
    m.l = l;
    m.n = n;
    m.k = k;
    m.lambda = lambda_of(l, k, N);
    m.mu = mu_of(l, k, N);
    // terminating 2F1(-k, 1+l+N/2+k; l+N/2; |x|^2):
    // c_j = (-k)_j (1+l+N/2+k)_j / ((l+N/2)_j j!)
    Rational a(-k);
    Rational b = Rational(1 + l + k) + Rational(N, 2);
    Rational c = Rational(l) + Rational(N, 2);
    for (int j = 0; j <= k; ++j) {
        Rational cj = pochhammer(a, j) * pochhammer(b, j) /
                      (pochhammer(c, j) * pochhammer(Rational(1), j));
        m.radial_coeffs.push_back(cj);
    }
    return m;
}

Polynomial eigenfunction(const Eigenmode& m) {
    std::vector<double> rc;
    for (const auto& c : m.radial_coeffs) rc.push_back(c.to_double());
    Polynomial radial = Polynomial::radial_in_r2(m.dim, rc);
    return radial * solid_harmonic(m.l, m.n, m.dim);
}

std::vector<double> eval_eigenfunction(const Eigenmode& m,
                                       const std::vector<std::array<double, 3>>& pts) {
    FlatPoly sh = flatten(solid_harmonic(m.l, m.n, m.dim));
    std::vector<double> rc;
    for (const auto& c : m.radial_coeffs) rc.push_back(c.to_double());
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        double r2 = 0.0;
        for (int a = 0; a < m.dim; ++a) r2 += p[a] * p[a];
        double rad = 0.0;
        for (std::size_t j = rc.size(); j-- > 0;) rad = rad * r2 + rc[j];
        out.push_back(rad * sh.eval(p.data()));
    }
    return out;
}

SpectrumTable spectrum_table(int N, double mu_max) {
    if (N < 1) throw std::domain_error("spectrum_table: dimension must be >= 1");
    if (mu_max < 0) throw std::domain_error("spectrum_table: mu_max must be >= 0");
    std::map<std::int64_t, SpectrumEntry> groups;
    int l_cap = (N == 1) ? 1 : std::numeric_limits<int>::max();
    for (int l = 0;; ++l) {
        if (l > l_cap) break;
        if (static_cast<double>(mu_of(l, 0, N)) > mu_max) break;
        for (int k = 0;; ++k) {
            std::int64_t mu = mu_of(l, k, N);
            if (static_cast<double>(mu) > mu_max) break;
            auto& e = groups[mu];
            e.mu = mu;
            std::int64_t lam = lambda_of(l, k, N);
            if (e.modes.empty() || lam < e.lambda_min) e.lambda_min = lam;
            std::int64_t Nl = multiplicity(l, N);
            for (int n = 1; n <= Nl; ++n) e.modes.push_back({l, n, k});
            e.total_multiplicity += Nl;
        }
    }
    SpectrumTable t;
    t.dim = N;
    t.mu_max = mu_max;
    for (auto& [mu, e] : groups) {
        std::sort(e.modes.begin(), e.modes.end(), [](const ModeKey& a, const ModeKey& b) {
            return std::tie(a.l, a.k, a.n) < std::tie(b.l, b.k, b.n);
        });
        t.entries.push_back(std::move(e));
    }
    return t;
}

} // namespace tfe::spectrum
