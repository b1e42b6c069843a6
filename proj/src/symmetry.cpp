#include "tfe/symmetry.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "tfe/quadrature.hpp"

namespace tfe::symmetry {

namespace {

using Mat = std::array<double, 9>;
using big_float = boost::multiprecision::cpp_bin_float_50;

Mat identity(int dim) {
    Mat m{};
    for (int i = 0; i < dim; ++i) m[i * dim + i] = 1.0;
    return m;
}

Mat mul(const Mat& a, const Mat& b, int dim) {
    Mat c{};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += a[i * dim + k] * b[k * dim + j];
            c[i * dim + j] = s;
        }
    return c;
}

double max_diff(const Mat& a, const Mat& b, int dim) {
    double d = 0.0;
    for (int i = 0; i < dim * dim; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

Mat rotation2(double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    return {c, -s, s, c, 0, 0, 0, 0, 0}; // 2x2 row-major in the first four slots
}

// Rodrigues rotation about unit axis u by angle phi
Mat rotation3(const std::array<double, 3>& axis, double phi) {
    double nrm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    std::array<double, 3> u{axis[0] / nrm, axis[1] / nrm, axis[2] / nrm};
    double c = std::cos(phi), s = std::sin(phi);
    Mat m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i * 3 + j] = (1.0 - c) * u[i] * u[j];
    m[0] += c;
    m[4] += c;
    m[8] += c;
    m[1] += -s * u[2];
    m[2] += s * u[1];
    m[3] += s * u[2];
    m[5] += -s * u[0];
    m[6] += -s * u[1];
    m[7] += s * u[0];
    return m;
}

} // namespace

void validate_group(const FiniteGroup& g, double tol) {
    int d = g.dim;
    if (d != 2 && d != 3) throw std::invalid_argument("validate_group: dim must be 2 or 3");
    if (g.elements.empty()) throw std::invalid_argument("validate_group: empty group");
    if (max_diff(g.elements[0], identity(d), d) > tol)
        throw std::invalid_argument("validate_group: first element must be the identity");
    for (const auto& m : g.elements) {
        // orthogonality: m m^T = I
        Mat mt{};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) mt[i * d + j] = m[j * d + i];
        if (max_diff(mul(m, mt, d), identity(d), d) > tol)
            throw std::invalid_argument("validate_group: element is not orthogonal");
    }
    for (const auto& a : g.elements)
        for (const auto& b : g.elements) {
            Mat p = mul(a, b, d);
            bool found = false;
            for (const auto& m : g.elements)
                if (max_diff(p, m, d) <= tol) { found = true; break; }
            if (!found) throw std::invalid_argument("validate_group: not closed under products");
        }
}

FiniteGroup group_from_elements(const std::string& name, int dim,
                                const std::vector<std::array<double, 9>>& generators,
                                std::size_t max_order) {
    FiniteGroup g;
    g.dim = dim;
    g.name = name;
    g.elements.push_back(identity(dim));
    const double tol = 1e-10;
    auto contains = [&](const Mat& m) {
        for (const auto& e : g.elements)
            if (max_diff(e, m, dim) <= tol) return true;
        return false;
    };
    for (const auto& gen : generators)
        if (!contains(gen)) g.elements.push_back(gen);
    // saturate under products
    bool grew = true;
    while (grew) {
        grew = false;
        std::size_t n = g.elements.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Mat p = mul(g.elements[i], g.elements[j], dim);
                if (!contains(p)) {
                    g.elements.push_back(p);
                    grew = true;
                    if (g.elements.size() > max_order)
                        throw std::runtime_error("group_from_elements: closure exceeds cap");
                }
            }
    }
    validate_group(g);
    return g;
}

FiniteGroup cyclic_group(int n, int dim) {
    if (n < 1) throw std::invalid_argument("cyclic_group: n must be >= 1");
    FiniteGroup g;
    g.dim = dim;
    g.name = "cyclic:" + std::to_string(n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        double phi = two_pi * k / n;
        if (dim == 2)
            g.elements.push_back(rotation2(phi));
        else
            g.elements.push_back(rotation3({0, 0, 1}, phi)); // rotations about the z-axis
    }
    validate_group(g);
    return g;
}

FiniteGroup dihedral_group(int n, int dim) {
    if (n < 1) throw std::invalid_argument("dihedral_group: n must be >= 1");
    FiniteGroup base = cyclic_group(n, dim);
    FiniteGroup g;
    g.dim = dim;
    g.name = "dihedral:" + std::to_string(n);
    g.elements = base.elements;
    for (int k = 0; k < n; ++k) {
        if (dim == 2) {
            // reflections: rotation composed with diag(1,-1)
            Mat r = base.elements[k];
            g.elements.push_back({r[0], -r[1], r[2], -r[3], 0, 0, 0, 0, 0});
        } else {
            // pi-rotations about in-plane axes (proper rotations, order 2n in SO(3))
            Mat flip{1, 0, 0, 0, -1, 0, 0, 0, -1}; // 180deg about x
            g.elements.push_back(mul(base.elements[k], flip, 3));
        }
    }
    validate_group(g);
    return g;
}

FiniteGroup tetrahedral_group() {
    Mat cycle{0, 0, 1, 1, 0, 0, 0, 1, 0};    // 120deg about (1,1,1)
    Mat flip{-1, 0, 0, 0, -1, 0, 0, 0, 1};   // 180deg about z
    FiniteGroup g = group_from_elements("tetra", 3, {cycle, flip});
    if (g.order() != 12) throw std::runtime_error("tetrahedral_group: wrong order");
    return g;
}

FiniteGroup octahedral_group() {
    Mat cycle{0, 0, 1, 1, 0, 0, 0, 1, 0};
    Mat quarter{0, -1, 0, 1, 0, 0, 0, 0, 1}; // 90deg about z
    FiniteGroup g = group_from_elements("octa", 3, {cycle, quarter});
    if (g.order() != 24) throw std::runtime_error("octahedral_group: wrong order");
    return g;
}

FiniteGroup icosahedral_group() {
    // icosahedron with vertices at cyclic permutations of (0, +-1, +-tau)
    const double tau = 0.5 * (1.0 + std::sqrt(5.0));
    Mat cycle{0, 0, 1, 1, 0, 0, 0, 1, 0};
    Mat five = rotation3({0.0, 1.0, tau}, 2.0 * std::numbers::pi / 5.0); // vertex axis
    FiniteGroup g = group_from_elements("icosa", 3, {cycle, five});
    if (g.order() != 60) throw std::runtime_error("icosahedral_group: wrong order");
    return g;
}

namespace {

// power series of (1/|E|) sum_g (1-s^2)^h / det(I - s g), h in {0,1},
// in >= 50-digit arithmetic; rounded with residual check
std::vector<std::int64_t> molien_series(const FiniteGroup& g, int lmax, bool harmonic) {
    if (lmax < 0) throw std::invalid_argument("molien: lmax must be >= 0");
    validate_group(g);
    const int d = g.dim;
    std::vector<big_float> acc(lmax + 1, big_float(0));
    std::vector<big_float> c(lmax + 1);
    for (const auto& m : g.elements) {
        // det(I - s g): 1 - tr s + c2 s^2 (- det s^3 for d=3)
        big_float a[4] = {big_float(1), 0, 0, 0};
        if (d == 2) {
            big_float tr = big_float(m[0]) + big_float(m[3]);
            big_float det = big_float(m[0]) * big_float(m[3]) - big_float(m[1]) * big_float(m[2]);
            a[1] = -tr;
            a[2] = det;
        } else {
            big_float t00(m[0]), t01(m[1]), t02(m[2]);
            big_float t10(m[3]), t11(m[4]), t12(m[5]);
            big_float t20(m[6]), t21(m[7]), t22(m[8]);
            big_float tr = t00 + t11 + t22;
            big_float c2 = (t00 * t11 - t01 * t10) + (t00 * t22 - t02 * t20) +
                           (t11 * t22 - t12 * t21);
            big_float det = t00 * (t11 * t22 - t12 * t21) - t01 * (t10 * t22 - t12 * t20) +
                            t02 * (t10 * t21 - t11 * t20);
            a[1] = -tr;
            a[2] = c2;
            a[3] = -det;
        }
        // 1/(a0 + a1 s + ...): c_m = -(sum_{j=1..min(m,d)} a_j c_{m-j})
        c[0] = 1;
        for (int mdeg = 1; mdeg <= lmax; ++mdeg) {
            big_float s(0);
            for (int j = 1; j <= std::min(mdeg, d); ++j) s += a[j] * c[mdeg - j];
            c[mdeg] = -s;
        }
        for (int i = 0; i <= lmax; ++i) acc[i] += c[i];
    }
    std::vector<std::int64_t> out(lmax + 1);
    big_float order(static_cast<unsigned>(g.order()));
    for (int i = 0; i <= lmax; ++i) {
        big_float v = acc[i] / order;
        if (harmonic && i >= 2) v -= acc[i - 2] / order; // (1-s^2) factor
        big_float r = boost::multiprecision::round(v);
        if (boost::multiprecision::abs(v - r) > big_float("1e-6"))
            throw std::runtime_error("molien: coefficient rounding residual exceeds 1e-6");
        out[i] = static_cast<std::int64_t>(r);
    }
    return out;
}

} // namespace

std::vector<std::int64_t> molien_harmonic(const FiniteGroup& g, int lmax) {
    return molien_series(g, lmax, true);
}

std::vector<std::int64_t> molien_polynomial(const FiniteGroup& g, int lmax) {
    return molien_series(g, lmax, false);
}

std::int64_t invariant_dimension_bruteforce(const FiniteGroup& g, int l, double tol) {
    validate_group(g);
    const int N = g.dim;
    const auto Nl = spectrum::multiplicity(l, N);
    // orthonormal harmonic basis on the ball (diagonal Gram for these harmonics)
    spectrum::WeightedGrid grid = spectrum::WeightedGrid::for_degree(N, 2 * l);
    std::vector<std::vector<double>> basis;
    for (int n = 1; n <= Nl; ++n) {
        auto vals = eval_on_grid(spectrum::solid_harmonic(l, n, N), grid);
        double nrm = std::sqrt(inner_rho(grid, vals, vals));
        for (auto& v : vals) v /= nrm;
        basis.push_back(std::move(vals));
    }
    std::vector<FlatPoly> flats;
    for (int n = 1; n <= Nl; ++n) flats.push_back(flatten(spectrum::solid_harmonic(l, n, N)));
    std::vector<double> norms(Nl);
    for (int n = 0; n < Nl; ++n) {
        auto vals = eval_on_grid(spectrum::solid_harmonic(l, n + 1, N), grid);
        norms[n] = std::sqrt(inner_rho(grid, vals, vals));
    }
    // Reynolds projector P = (1/|E|) sum_g M(g), M(g)_{mn} = <S_m o g^T, S_n>_rho
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(Nl, Nl);
    std::vector<double> gm(Nl);
    for (const auto& mat : g.elements) {
        Eigen::MatrixXd M(Nl, Nl);
        std::vector<std::vector<double>> moved(Nl, std::vector<double>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& z = grid.nodes[i];
            double y[3] = {0, 0, 0};
            for (int r = 0; r < N; ++r) // y = g^{-1} z = g^T z
                for (int s = 0; s < N; ++s) y[r] += mat[s * N + r] * z[s];
            for (int m = 0; m < Nl; ++m) moved[m][i] = flats[m].eval(y) / norms[m];
        }
        for (int m = 0; m < Nl; ++m)
            for (int n = 0; n < Nl; ++n) M(m, n) = inner_rho(grid, moved[m], basis[n]);
        P += M;
    }
    P /= static_cast<double>(g.order());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
    std::int64_t rank = 0;
    for (int i = 0; i < Nl; ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > tol && ev < 1.0 - tol)
            throw std::runtime_error(
                "invariant_dimension_bruteforce: projector eigenvalue in the 0/1 gap");
        if (ev >= 1.0 - tol) ++rank;
    }
    return rank;
}

ActiveModeReport active_modes(const FiniteGroup& g, const spectrum::SpectrumTable& table) {
    if (g.dim != table.dim)
        throw std::invalid_argument("active_modes: group and table dimension mismatch");
    int lmax = 0;
    for (const auto& e : table.entries)
        for (const auto& m : e.modes) lmax = std::max(lmax, m.l);
    std::vector<std::int64_t> hdim = molien_harmonic(g, lmax);
    ActiveModeReport rep;
    rep.group = g.name;
    rep.dim = g.dim;
    for (const auto& e : table.entries) {
        ActiveEntry a;
        a.mu = e.mu;
        a.total_multiplicity = e.total_multiplicity;
        a.active_multiplicity = 0;
        a.mass_mode = (e.mu == 0);
        std::map<std::pair<int, int>, bool> seen;
        for (const auto& m : e.modes) {
            if (seen[{m.l, m.k}]) continue; // count each (l,k) block once
            seen[{m.l, m.k}] = true;
            a.active_multiplicity += hdim[m.l];
            if (m.l >= 1 && hdim[m.l] > 0 &&
                (rep.first_active_angular_l < 0 || m.l < rep.first_active_angular_l))
                rep.first_active_angular_l = m.l;
        }
        if (a.mu > 0 && a.active_multiplicity > 0 &&
            (rep.first_active_mu < 0 || a.mu < rep.first_active_mu))
            rep.first_active_mu = a.mu;
        rep.entries.push_back(a);
    }
    return rep;
}

} // namespace tfe::symmetry
