// Field containers and disk format: droplet profiles (physical or confined),
// perturbations on the unit ball, the self-similar frame constants, and
// CSV + JSON-sidecar serialization.
#pragma once

#include <string>
#include <vector>

namespace tfe::transform {

// 1-D carriers: full line for N=1, radial profile for N>=2
enum class Geometry { line, radial };

struct SelfSimilarFrame {
    int dim = 1;
    double mass = 0;    // conserved physical mass M
    double gamma = 0;   // 2(N+2)
    double sigma_m = 0; // support scale constant fixed by M
    double alpha_n = 0; // 1/(8(N+4)(N+2))
};

// sigma_M from the mass constraint (closed form; oracle-tested)
double sigma_from_mass(double M, int N);
SelfSimilarFrame frame_from_mass(double M, int N);

// mass of the stationary confined droplet: 2|B_1| / ((N+2)(N+4))
double stationary_mass(int N);

// V_*(x) = (1-|x|^2)/2 and v_*(x) = max(V_*,0)^2
double v_star(double r2);

struct DropletField {
    int dim = 1;
    Geometry geom = Geometry::line;
    double time = 0;            // tau (physical) or t (confined)
    bool confined = true;
    std::vector<double> grid;   // strictly increasing; radial: r >= 0
    std::vector<double> values; // v >= 0
};

struct PerturbationField {
    int dim = 1;
    Geometry geom = Geometry::line;
    double time = 0;
    std::vector<double> grid;     // z in [-1,1] (line) or r in [0,1] (radial)
    std::vector<double> values;   // w
    std::vector<double> gradient; // dw/dz (or dw/dr)
};

// single contiguous positive interval; throws if the support is fragmented
// or empty. Edges located by linear root of sqrt(v) past the last positive
// sample (v is quadratic in the distance to the contact line).
struct SupportBounds {
    double lo = 0;
    double hi = 0;
    std::size_t i_lo = 0; // first/last strictly positive sample
    std::size_t i_hi = 0;
};
SupportBounds support_bounds(const DropletField& f);

// CSV (header: coordinate,value[,gradient]) + JSON sidecar <base>.json
void write_field(const std::string& base, const DropletField& f, const SelfSimilarFrame& fr);
void write_field(const std::string& base, const PerturbationField& f,
                 const SelfSimilarFrame& fr);
DropletField read_droplet(const std::string& base, SelfSimilarFrame* frame = nullptr);
PerturbationField read_perturbation(const std::string& base, SelfSimilarFrame* frame = nullptr);

} // namespace tfe::transform
