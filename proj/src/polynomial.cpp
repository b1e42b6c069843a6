#include "tfe/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace tfe {

Polynomial::Polynomial(int dim) : dim_(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Polynomial: dim must be 1..3");
}

Polynomial Polynomial::constant(int dim, double c) {
    Polynomial p(dim);
    p.add_term({0, 0, 0}, c);
    return p;
}

Polynomial Polynomial::variable(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw std::invalid_argument("Polynomial::variable: bad axis");
    Polynomial p(dim);
    Expo e{0, 0, 0};
    e[axis] = 1;
    p.add_term(e, 1.0);
    return p;
}

Polynomial Polynomial::radial_in_r2(int dim, std::span<const double> coeffs) {
    Polynomial r2(dim);
    for (int a = 0; a < dim; ++a) {
        Expo e{0, 0, 0};
        e[a] = 2;
        r2.add_term(e, 1.0);
    }
    Polynomial acc = Polynomial::constant(dim, 0.0);
    Polynomial pw = Polynomial::constant(dim, 1.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        acc += pw * coeffs[j];
        pw = pw * r2;
    }
    return acc;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
}

void Polynomial::add_term(const Expo& e, double c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        if (c != 0.0) terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    r += o;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dim mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + o * -1.0;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dim mismatch");
    Polynomial r(dim_);
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_)
            r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return r;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial r(dim_);
    if (s == 0.0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
    return r;
}

Polynomial Polynomial::derivative(int axis) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[axis] == 0) continue;
        Expo d = e;
        d[axis] -= 1;
        r.add_term(d, c * e[axis]);
    }
    return r;
}

Polynomial Polynomial::laplacian() const {
    Polynomial r(dim_);
    for (int a = 0; a < dim_; ++a) r += derivative(a).derivative(a);
    return r;
}

std::vector<Polynomial> Polynomial::gradient() const {
    std::vector<Polynomial> g;
    for (int a = 0; a < dim_; ++a) g.push_back(derivative(a));
    return g;
}

Polynomial Polynomial::compose_linear(std::span<const double> A) const {
    if (static_cast<int>(A.size()) != dim_ * dim_)
        throw std::invalid_argument("compose_linear: matrix size mismatch");
    // powers of the substituted linear forms L_a = sum_b A[a][b] x_b
    int maxdeg = std::max(degree(), 0);
    std::vector<std::vector<Polynomial>> pw(dim_);
    for (int a = 0; a < dim_; ++a) {
        Polynomial lf(dim_);
        for (int b = 0; b < dim_; ++b) {
            Expo e{0, 0, 0};
            e[b] = 1;
            lf.add_term(e, A[a * dim_ + b]);
        }
        pw[a].push_back(Polynomial::constant(dim_, 1.0));
        for (int d = 1; d <= maxdeg; ++d) pw[a].push_back(pw[a][d - 1] * lf);
    }
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) {
        Polynomial t = Polynomial::constant(dim_, c);
        for (int a = 0; a < dim_; ++a)
            if (e[a] > 0) t = t * pw[a][e[a]];
        r += t;
    }
    return r;
}

double Polynomial::eval(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int a = 0; a < dim_; ++a)
            for (int i = 0; i < e[a]; ++i) t *= x[a];
        s += t;
    }
    return s;
}

Polynomial Polynomial::pruned(double tol) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > tol) r.terms_.emplace(e, c);
    return r;
}

FlatPoly flatten(const Polynomial& p) {
    FlatPoly f;
    f.dim = p.dim();
    for (const auto& [e, c] : p.terms()) {
        f.expo.push_back({static_cast<std::uint8_t>(e[0]), static_cast<std::uint8_t>(e[1]),
                          static_cast<std::uint8_t>(e[2])});
        f.coef.push_back(c);
        f.max_deg = std::max(f.max_deg, std::max({e[0], e[1], e[2]}));
    }
    return f;
}

double FlatPoly::eval(const double* x) const {
    // per-point power tables; max_deg stays small (<= 24)
    double px[3][32];
    for (int a = 0; a < dim; ++a) {
        px[a][0] = 1.0;
        for (int d = 1; d <= max_deg; ++d) px[a][d] = px[a][d - 1] * x[a];
    }
    double s = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        double t = coef[i] * px[0][expo[i][0]];
        if (dim > 1) t *= px[1][expo[i][1]];
        if (dim > 2) t *= px[2][expo[i][2]];
        s += t;
    }
    return s;
}

} // namespace tfe
