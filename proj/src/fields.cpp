#include "tfe/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tfe::transform {

namespace {

double sphere_area(int N) {
    switch (N) {
        case 1: return 2.0; // S^0, counting measure
        case 2: return 2.0 * std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi;
        default: {
            // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
            return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
        }
    }
}

} // namespace

double sigma_from_mass(double M, int N) {
    if (M <= 0) throw std::domain_error("sigma_from_mass: mass must be positive");
    if (N < 1) throw std::domain_error("sigma_from_mass: dimension must be >= 1");
    // M = alpha_N sigma^{(N+4)/2} |S^{N-1}| 8 / (N(N+2)(N+4))
    //   = sigma^{(N+4)/2} |S^{N-1}| / (N (N+2)^2 (N+4)^2)
    double c = static_cast<double>(N) * (N + 2.0) * (N + 2.0) * (N + 4.0) * (N + 4.0);
    return std::pow(M * c / sphere_area(N), 2.0 / (N + 4.0));
}

SelfSimilarFrame frame_from_mass(double M, int N) {
    SelfSimilarFrame f;
    f.dim = N;
    f.mass = M;
    f.gamma = 2.0 * (N + 2.0);
    f.sigma_m = sigma_from_mass(M, N);
    f.alpha_n = 1.0 / (8.0 * (N + 4.0) * (N + 2.0));
    return f;
}

double stationary_mass(int N) {
    double ball = sphere_area(N) / N;
    return 2.0 * ball / ((N + 2.0) * (N + 4.0));
}

double v_star(double r2) {
    double V = 0.5 * (1.0 - r2);
    return V > 0.0 ? V * V : 0.0;
}

SupportBounds support_bounds(const DropletField& f) {
    const auto& v = f.values;
    const auto& x = f.grid;
    std::size_t n = v.size();
    if (n != x.size() || n < 2) throw std::invalid_argument("support_bounds: bad field");
    // "wet" means above a relative floor so that isolated roundoff crumbs
    // (e.g. a denormal left behind by a receding front) do not count as support
    double vmax = 0.0;
    for (double s : v) vmax = std::max(vmax, s);
    if (!(vmax > 0.0)) throw std::runtime_error("support_bounds: field is identically zero");
    const double thr = 1e-13 * vmax;
    std::size_t lo = n, hi = n;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] > thr) {
            if (lo == n) lo = i;
            hi = i;
        }
    for (std::size_t i = lo; i <= hi; ++i)
        if (!(v[i] > thr))
            throw std::runtime_error("support_bounds: support is not a single interval");
    SupportBounds s;
    s.i_lo = lo;
    s.i_hi = hi;
    // sqrt(v) is near-linear at a zero-contact-angle edge, so extrapolate the
    // wet-side secant of sqrt(v) to its root; the dry neighbour only clamps.
    // (Interpolating against the dry sample instead would park the edge at the
    // dry node whenever v is identically zero there -- an O(h) bias that leaks
    // an O(1) gradient error into anything splined against the edge.)
    if (hi + 1 < n) {
        double g = std::sqrt(v[hi]);
        double cand = x[hi + 1];
        if (hi > lo) {
            double gp = std::sqrt(std::max(0.0, v[hi - 1]));
            if (gp > g) cand = x[hi] + (x[hi] - x[hi - 1]) * g / (gp - g);
        }
        s.hi = std::clamp(cand, x[hi], x[hi + 1]);
    } else {
        s.hi = x[hi];
    }
    if (lo > 0) {
        double g = std::sqrt(v[lo]);
        double cand = x[lo - 1];
        if (hi > lo) {
            double gn = std::sqrt(std::max(0.0, v[lo + 1]));
            if (gn > g) cand = x[lo] - (x[lo + 1] - x[lo]) * g / (gn - g);
        }
        s.lo = std::clamp(cand, x[lo - 1], x[lo]);
    } else {
        s.lo = x[lo];
    }
    return s;
}

namespace {

using nlohmann::json;

json frame_json(const SelfSimilarFrame& fr) {
    return json{{"M", fr.mass}, {"gamma", fr.gamma}, {"sigma_M", fr.sigma_m}};
}

void parse_frame(const json& j, SelfSimilarFrame* fr, int dim) {
    if (!fr) return;
    double M = j.value("M", 0.0);
    *fr = (M > 0.0) ? frame_from_mass(M, dim) : SelfSimilarFrame{};
    fr->dim = dim;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& cols) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c)
            out << (c ? "," : "") << cols[c][i];
        out << "\n";
    }
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::getline(in, header);
    std::vector<std::vector<double>> cols;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (cols.size() <= c) cols.emplace_back();
            cols[c].push_back(std::stod(cell));
            ++c;
        }
    }
    if (cols.empty()) throw std::runtime_error("empty field file " + path);
    return cols;
}

} // namespace

void write_field(const std::string& base, const DropletField& f, const SelfSimilarFrame& fr) {
    const char* coord = (f.geom == Geometry::line) ? "x" : "r";
    write_csv(base + ".csv", std::string(coord) + ",value", {f.grid, f.values});
    json side{{"kind", "droplet"},
              {"dim", f.dim},
              {"time", f.time},
              {"confined", f.confined},
              {"geometry", f.geom == Geometry::line ? "line" : "radial"},
              {"frame", frame_json(fr)}};
    std::ofstream out(base + ".json");
    out << side.dump(2) << "\n";
}

void write_field(const std::string& base, const PerturbationField& f,
                 const SelfSimilarFrame& fr) {
    write_csv(base + ".csv", "z,value,gradient", {f.grid, f.values, f.gradient});
    json side{{"kind", "perturbation"},
              {"dim", f.dim},
              {"time", f.time},
              {"geometry", f.geom == Geometry::line ? "line" : "radial"},
              {"frame", frame_json(fr)}};
    std::ofstream out(base + ".json");
    out << side.dump(2) << "\n";
}

DropletField read_droplet(const std::string& base, SelfSimilarFrame* frame) {
    std::string header;
    auto cols = read_csv(base + ".csv", header);
    if (cols.size() < 2) throw std::runtime_error("read_droplet: need 2 columns");
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("read_droplet: missing sidecar " + base + ".json");
    json side = json::parse(in);
    DropletField f;
    f.dim = side.value("dim", 1);
    f.geom = side.value("geometry", "line") == std::string("radial") ? Geometry::radial
                                                                     : Geometry::line;
    f.time = side.value("time", 0.0);
    f.confined = side.value("confined", true);
    f.grid = cols[0];
    f.values = cols[1];
    parse_frame(side.value("frame", json::object()), frame, f.dim);
    return f;
}

PerturbationField read_perturbation(const std::string& base, SelfSimilarFrame* frame) {
    std::string header;
    auto cols = read_csv(base + ".csv", header);
    if (cols.size() < 2) throw std::runtime_error("read_perturbation: need 2+ columns");
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("read_perturbation: missing sidecar");
    nlohmann::json side = nlohmann::json::parse(in);
    PerturbationField f;
    f.dim = side.value("dim", 1);
    f.geom = side.value("geometry", "line") == std::string("radial") ? Geometry::radial
                                                                     : Geometry::line;
    f.time = side.value("time", 0.0);
    f.grid = cols[0];
    f.values = cols[1];
    f.gradient = cols.size() > 2 ? cols[2] : std::vector<double>(cols[0].size(), 0.0);
    parse_frame(side.value("frame", nlohmann::json::object()), frame, f.dim);
    return f;
}

} // namespace tfe::transform
