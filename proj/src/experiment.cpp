#include "tfe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>

#include "tfe/quadrature.hpp"
#include "tfe/transform.hpp"

namespace tfe::experiment {

namespace fs = std::filesystem;
using nlohmann::json;
using simulator::RateWindow;
using simulator::Trajectory;
using transform::PerturbationField;

namespace {

ModeRef parse_mode(const json& j) {
    ModeRef m;
    m.l = j.value("l", 0);
    m.n = j.value("n", 1);
    m.k = j.value("k", 0);
    return m;
}

json mode_json(const ModeRef& m) { return json{{"l", m.l}, {"n", m.n}, {"k", m.k}}; }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error("experiment spec: " + what);
}

// || w ||_rho of a sampled perturbation via spline + ball quadrature
double rho_norm_of(const PerturbationField& w) {
    linops::CubicSpline s(w.grid, w.values);
    auto grid = spectrum::WeightedGrid::for_degree(w.dim, 48);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = grid.nodes[i];
        double c = w.geom == transform::Geometry::line
                       ? p[0]
                       : std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        f[i] = s(c);
    }
    return std::sqrt(std::max(0.0, inner_rho(grid, f, f)));
}

std::vector<PerturbationField> invert_snapshots(const Trajectory& traj, int nodes) {
    auto geom = traj.snapshots.front().geom;
    auto z = transform::uniform_ball_nodes(geom, nodes);
    std::vector<PerturbationField> out;
    out.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots) out.push_back(transform::v_to_w(snap, z));
    return out;
}

} // namespace

ExperimentSpec parse_spec(const json& j) {
    ExperimentSpec s;
    require(j.contains("name"), "missing name");
    s.name = j.at("name").get<std::string>();
    s.dim = j.value("dim", 1);
    require(s.dim >= 1 && s.dim <= 3, "dim must be 1, 2 or 3");
    s.kind = j.value("kind", "nonlinear");
    require(s.kind == "nonlinear" || s.kind == "linear", "kind must be nonlinear or linear");
    s.seed = j.value("seed", std::int64_t{0});

    if (j.contains("init")) {
        const json& ji = j.at("init");
        s.init.type = ji.value("type", "stationary");
        require(s.init.type == "stationary" || s.init.type == "shift" ||
                    s.init.type == "dilate" || s.init.type == "mode" || s.init.type == "file",
                "unknown init type " + s.init.type);
        s.init.b = ji.value("b", 0.0);
        s.init.lambda = ji.value("lambda", 1.0);
        s.init.amp = ji.value("amp", 0.0);
        s.init.path = ji.value("path", "");
        if (ji.contains("mode")) s.init.mode = parse_mode(ji.at("mode"));
    }

    s.solver.dim = s.dim;
    if (j.contains("solver")) {
        const json& js = j.at("solver");
        s.solver.h = js.value("h", s.solver.h);
        s.solver.dt = js.value("dt", s.solver.dt);
        s.solver.xmax = js.value("xmax", s.solver.xmax);
        s.solver.newton_tol = js.value("newton_tol", s.solver.newton_tol);
        s.solver.max_newton = js.value("max_newton", s.solver.max_newton);
    }
    s.T = j.value("T", 1.0);
    s.snap_every = j.value("snap_every", 0.02);
    require(s.T > 0 && s.snap_every > 0, "need T > 0 and snap_every > 0");

    if (j.contains("observable")) {
        const json& jo = j.at("observable");
        s.observable.type = jo.value("type", "mode_w");
        require(s.observable.type == "com" || s.observable.type == "mode_w" ||
                    s.observable.type == "rho_norm",
                "unknown observable type " + s.observable.type);
        s.observable.relative_to = jo.value("relative_to", "vstar");
        require(s.observable.relative_to == "vstar" || s.observable.relative_to == "terminal",
                "relative_to must be vstar or terminal");
        s.observable.nodes = jo.value("nodes", 1024);
        if (jo.contains("mode")) s.observable.mode = parse_mode(jo.at("mode"));
    }
    require(!(s.kind == "linear" && s.observable.type == "com"),
            "com observable needs a nonlinear trajectory");

    if (j.contains("window")) {
        const json& jw = j.at("window");
        s.window.t_min = jw.value("t_min", s.window.t_min);
        s.window.t_max = jw.value("t_max", s.window.t_max);
        s.window.amp_min = jw.value("amp_min", s.window.amp_min);
        s.window.amp_max = jw.value("amp_max", s.window.amp_max);
    }

    require(j.contains("target"), "missing target {l,k}");
    s.target_l = j.at("target").value("l", 0);
    s.target_k = j.at("target").value("k", 0);
    std::int64_t mu = spectrum::mu_of(s.target_l, s.target_k, s.dim);
    if (j.at("target").contains("mu"))
        require(j.at("target").at("mu").get<std::int64_t>() == mu,
                "declared target.mu contradicts mu_of(l,k,N) = " + std::to_string(mu));

    s.tolerance_pct = j.value("tolerance_pct", 10.0);
    s.r2_min = j.value("r2_min", 0.0);
    if (j.contains("caveats"))
        for (const auto& c : j.at("caveats")) s.caveats.push_back(c.get<std::string>());
    if (j.contains("modes"))
        for (const auto& jm : j.at("modes"))
            s.linear_modes.emplace_back(parse_mode(jm), jm.value("amp", 0.0));
    require(s.kind != "linear" || !s.linear_modes.empty(), "linear kind needs modes[]");
    return s;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file " + path);
    json j = json::parse(in);
    return parse_spec(j);
}

std::pair<std::vector<double>, std::vector<double>> observable_series(const Trajectory& traj,
                                                                      const Observable& obs,
                                                                      int dim) {
    if (obs.type == "com") return {traj.step_times, traj.step_com};
    if (traj.snapshots.empty()) throw std::runtime_error("observable_series: empty trajectory");

    auto ws = invert_snapshots(traj, obs.nodes);
    std::vector<double> amps(ws.size());
    if (obs.type == "mode_w") {
        auto mode = spectrum::make_mode(obs.mode.l, obs.mode.n, obs.mode.k, dim);
        for (std::size_t i = 0; i < ws.size(); ++i)
            amps[i] = transform::mode_amplitude_w(ws[i], mode);
        if (obs.relative_to == "terminal") {
            double last = amps.back();
            for (double& a : amps) a -= last;
        }
    } else { // rho_norm
        for (std::size_t i = 0; i < ws.size(); ++i) {
            PerturbationField d = ws[i];
            if (obs.relative_to == "terminal")
                for (std::size_t p = 0; p < d.values.size(); ++p)
                    d.values[p] -= ws.back().values[p];
            amps[i] = rho_norm_of(d);
        }
    }
    return {traj.times, amps};
}

namespace {

transform::DropletField build_init(const ExperimentSpec& s) {
    const InitSpec& in = s.init;
    if (in.type == "stationary") return simulator::init_stationary(s.solver);
    if (in.type == "shift") return simulator::init_shift(s.solver, in.b);
    if (in.type == "dilate") return simulator::init_dilate(s.solver, in.lambda);
    if (in.type == "mode")
        return simulator::init_mode(s.solver, in.mode.l, in.mode.n, in.mode.k, in.amp);
    return simulator::resample_to_grid(transform::read_droplet(in.path), s.solver);
}

json window_json(const RateWindow& w) {
    return json{{"t_min", w.t_min},
                {"t_max", w.t_max},
                {"amp_min", w.amp_min},
                {"amp_max", w.amp_max}};
}

json spec_echo(const ExperimentSpec& s) {
    json init{{"type", s.init.type}};
    if (s.init.type == "shift") init["b"] = s.init.b;
    if (s.init.type == "dilate") init["lambda"] = s.init.lambda;
    if (s.init.type == "mode") {
        init["mode"] = mode_json(s.init.mode);
        init["amp"] = s.init.amp;
    }
    if (s.init.type == "file") init["path"] = s.init.path;
    json obs{{"type", s.observable.type},
             {"relative_to", s.observable.relative_to},
             {"nodes", s.observable.nodes}};
    if (s.observable.type == "mode_w") obs["mode"] = mode_json(s.observable.mode);
    return json{{"init", init},
                {"observable", obs},
                {"solver", json{{"h", s.solver.h},
                                {"dt", s.solver.dt},
                                {"xmax", s.solver.xmax},
                                {"newton_tol", s.solver.newton_tol},
                                {"max_newton", s.solver.max_newton}}},
                {"T", s.T},
                {"snap_every", s.snap_every}};
}

// linear-kind series: exact coefficient evolution
std::pair<std::vector<double>, std::vector<double>> linear_series(const ExperimentSpec& s) {
    simulator::LinearCoefficients w0;
    for (const auto& [m, amp] : s.linear_modes) {
        w0.modes.push_back(spectrum::make_mode(m.l, m.n, m.k, s.dim));
        w0.coeffs.push_back(amp);
    }
    std::vector<double> times;
    for (double t = 0; t < s.T + 1e-12; t += s.snap_every) times.push_back(std::min(t, s.T));
    auto rows = simulator::evolve_linear(w0, times);

    std::vector<double> amps(times.size());
    if (s.observable.type == "mode_w") {
        std::size_t idx = w0.modes.size();
        for (std::size_t j = 0; j < w0.modes.size(); ++j)
            if (s.linear_modes[j].first.l == s.observable.mode.l &&
                s.linear_modes[j].first.n == s.observable.mode.n &&
                s.linear_modes[j].first.k == s.observable.mode.k)
                idx = j;
        if (idx == w0.modes.size())
            throw std::runtime_error("linear experiment: observable mode not in modes[]");
        for (std::size_t t = 0; t < times.size(); ++t) amps[t] = rows[t][idx];
    } else { // rho_norm of the expansion, using exact mode orthogonality
        std::vector<double> nrm2(w0.modes.size());
        for (std::size_t j = 0; j < w0.modes.size(); ++j) {
            const auto& m = w0.modes[j];
            auto grid = spectrum::WeightedGrid::for_degree(s.dim, 2 * (m.l + 2 * m.k) + 2);
            auto psi = spectrum::eval_eigenfunction(m, grid.nodes);
            nrm2[j] = inner_rho(grid, psi, psi);
        }
        for (std::size_t t = 0; t < times.size(); ++t) {
            double sum = 0;
            for (std::size_t j = 0; j < w0.modes.size(); ++j)
                sum += rows[t][j] * rows[t][j] * nrm2[j];
            amps[t] = std::sqrt(sum);
        }
    }
    return {times, amps};
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    std::int64_t target_mu = spectrum::mu_of(spec.target_l, spec.target_k, spec.dim);

    std::vector<double> times, amps;
    double mass_drift = 0, min_value = 0;
    if (spec.kind == "linear") {
        std::tie(times, amps) = linear_series(spec);
    } else {
        auto v0 = build_init(spec);
        std::vector<double> outs;
        for (double t = 0; t < spec.T + 1e-12; t += spec.snap_every)
            outs.push_back(std::min(t, spec.T));
        Trajectory traj = simulator::evolve(v0, spec.T, spec.solver, outs);
        std::tie(times, amps) = observable_series(traj, spec.observable, spec.dim);

        double m0 = traj.step_mass.empty() ? simulator::discrete_mass(v0) : traj.step_mass[0];
        for (double m : traj.step_mass)
            mass_drift = std::max(mass_drift, std::abs(m - m0) / std::abs(m0));
        for (const auto& snap : traj.snapshots)
            for (double x : snap.values) min_value = std::min(min_value, x);
    }

    bool mass_ok = mass_drift < 1e-8;
    bool positive = min_value >= 0;

    json report{{"schema", "tfe-report/1"},
                {"name", spec.name},
                {"dim", spec.dim},
                {"kind", spec.kind},
                {"seed", spec.seed},
                {"target", json{{"l", spec.target_l}, {"k", spec.target_k}, {"mu", target_mu}}},
                {"tolerance_pct", spec.tolerance_pct},
                {"r2_min", spec.r2_min},
                {"window", window_json(spec.window)},
                {"caveats", spec.caveats},
                {"spec", spec_echo(spec)},
                {"checks", json{{"mass_drift_rel", mass_drift},
                                {"mass_ok", mass_ok},
                                {"min_value", min_value},
                                {"positivity_ok", positive}}}};

    bool pass = false;
    try {
        auto rate = simulator::measure_rate(times, amps, spec.window);
        double rel_err = std::abs(rate.exponent - double(target_mu)) / double(target_mu) * 100.0;
        pass = rel_err <= spec.tolerance_pct && rate.r_squared >= spec.r2_min && mass_ok &&
               positive;
        report["trivial"] = false;
        report["fitted_exponent"] = rate.exponent;
        report["r_squared"] = rate.r_squared;
        report["relative_error_pct"] = rel_err;
        report["fit"] = json{{"samples", rate.samples}, {"t_lo", rate.t_lo}, {"t_hi", rate.t_hi}};
    } catch (const std::exception& e) {
        double peak = 0;
        for (double a : amps) peak = std::max(peak, std::abs(a));
        if (peak < spec.window.amp_min) {
            // nothing to fit because the observable never rose above the window
            report["trivial"] = true;
            report["note"] = "all amplitudes below the fit window; trivial pass";
            pass = mass_ok && positive;
        } else {
            report["trivial"] = false;
            report["error"] = e.what();
            pass = false;
        }
        report["peak_amplitude"] = peak;
    }
    report["pass"] = pass;

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / (spec.name + ".report.json"));
        out << report.dump(2) << "\n";
    }
    return {report, pass};
}

int run_experiments(const std::vector<std::string>& spec_paths, const std::string& out_dir,
                    int jobs) {
    jobs = std::max(1, jobs);
    bool all_pass = true;
    std::vector<ExperimentResult> results(spec_paths.size());
    for (std::size_t base = 0; base < spec_paths.size(); base += jobs) {
        std::size_t end = std::min(spec_paths.size(), base + jobs);
        std::vector<std::future<ExperimentResult>> wave;
        for (std::size_t i = base; i < end; ++i)
            wave.push_back(std::async(std::launch::async, [&, i] {
                return run_experiment(load_spec(spec_paths[i]), out_dir);
            }));
        for (std::size_t i = base; i < end; ++i) {
            try {
                results[i] = wave[i - base].get();
            } catch (const std::exception& e) {
                std::fprintf(stderr, "%s: ERROR %s\n", spec_paths[i].c_str(), e.what());
                all_pass = false;
                continue;
            }
            const json& r = results[i].report;
            if (r.value("trivial", false))
                std::printf("%-32s %s (trivial: peak %.3g below window)\n",
                            r.value("name", "?").c_str(), results[i].pass ? "PASS" : "FAIL",
                            r.value("peak_amplitude", 0.0));
            else if (r.contains("fitted_exponent"))
                std::printf("%-32s %s (exponent %.4f, target %lld, r2 %.5f)\n",
                            r.value("name", "?").c_str(), results[i].pass ? "PASS" : "FAIL",
                            r.value("fitted_exponent", 0.0),
                            static_cast<long long>(r.at("target").value("mu", std::int64_t{0})),
                            r.value("r_squared", 0.0));
            else
                std::printf("%-32s FAIL (%s)\n", r.value("name", "?").c_str(),
                            r.value("error", "unknown error").c_str());
            all_pass = all_pass && results[i].pass;
        }
    }
    return all_pass ? 0 : 1;
}

void save_trajectory(const std::string& dir, const Trajectory& traj, int dim,
                     const json& provenance) {
    fs::create_directories(dir);
    transform::SelfSimilarFrame fr;
    fr.dim = dim;
    fr.gamma = simulator::gamma_of(dim);
    json names = json::array();
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snap_%06zu", i);
        transform::write_field((fs::path(dir) / buf).string(), traj.snapshots[i], fr);
        names.push_back(buf);
    }
    json idx{{"schema", "tfe-trajectory/1"}, {"dim", dim},
             {"gamma", simulator::gamma_of(dim)}, {"times", traj.times},
             {"snapshots", names},              {"step_times", traj.step_times},
             {"step_mass", traj.step_mass},     {"step_com", traj.step_com},
             {"provenance", provenance}};
    std::ofstream out(fs::path(dir) / "trajectory.json");
    out << idx.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& dir, int* dim) {
    std::ifstream in(fs::path(dir) / "trajectory.json");
    if (!in) throw std::runtime_error("cannot open " + dir + "/trajectory.json");
    json idx = json::parse(in);
    if (idx.value("schema", "") != "tfe-trajectory/1")
        throw std::runtime_error("unrecognized trajectory schema in " + dir);
    Trajectory traj;
    traj.times = idx.at("times").get<std::vector<double>>();
    traj.step_times = idx.value("step_times", std::vector<double>{});
    traj.step_mass = idx.value("step_mass", std::vector<double>{});
    traj.step_com = idx.value("step_com", std::vector<double>{});
    for (const auto& name : idx.at("snapshots"))
        traj.snapshots.push_back(
            transform::read_droplet((fs::path(dir) / name.get<std::string>()).string()));
    if (dim) *dim = idx.value("dim", 1);
    return traj;
}

} // namespace tfe::experiment
