#include "tfe/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tfe/experiment.hpp"
#include "tfe/linops.hpp"
#include "tfe/simulator.hpp"
#include "tfe/spectrum.hpp"
#include "tfe/symmetry.hpp"
#include "tfe/transform.hpp"

namespace tfe::cli {

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

experiment::ModeRef parse_mode_str(const std::string& s) {
    experiment::ModeRef m;
    if (std::sscanf(s.c_str(), "%d,%d,%d", &m.l, &m.n, &m.k) != 3)
        throw std::runtime_error("expected a mode as l,n,k (got '" + s + "')");
    return m;
}

std::pair<int, int> parse_target_str(const std::string& s) {
    int l, k;
    if (std::sscanf(s.c_str(), "%d,%d", &l, &k) != 2)
        throw std::runtime_error("expected a target as l,k (got '" + s + "')");
    return {l, k};
}

symmetry::FiniteGroup parse_group(const std::string& s, int dim) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    if (head == "cyclic" || head == "dihedral") {
        if (colon == std::string::npos)
            throw std::runtime_error(head + " needs an order, e.g. " + head + ":3");
        int n = std::stoi(s.substr(colon + 1));
        return head == "cyclic" ? symmetry::cyclic_group(n, dim)
                                : symmetry::dihedral_group(n, dim);
    }
    if (s == "tetra") return symmetry::tetrahedral_group();
    if (s == "octa") return symmetry::octahedral_group();
    if (s == "icosa") return symmetry::icosahedral_group();
    throw std::runtime_error("unknown group '" + s +
                             "' (use cyclic:n, dihedral:n, tetra, octa, icosa)");
}

std::string peek_kind(const std::string& base) {
    std::ifstream in(base + ".json");
    if (!in) throw std::runtime_error("cannot open sidecar " + base + ".json");
    return json::parse(in).value("kind", "");
}

transform::DropletField make_init(const simulator::SolverConfig& cfg, const std::string& s) {
    if (s == "stationary") return simulator::init_stationary(cfg);
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "shift") return simulator::init_shift(cfg, std::stod(rest));
    if (head == "dilate") return simulator::init_dilate(cfg, std::stod(rest));
    if (head == "file")
        return simulator::resample_to_grid(transform::read_droplet(rest), cfg);
    if (head == "mode") {
        int l, n, k;
        double amp;
        if (std::sscanf(rest.c_str(), "%d,%d,%d:%lf", &l, &n, &k, &amp) != 4)
            throw std::runtime_error("mode init wants mode:l,n,k:amp (got '" + s + "')");
        return simulator::init_mode(cfg, l, n, k, amp);
    }
    throw std::runtime_error("unknown init '" + s +
                             "' (stationary, shift:b, dilate:lambda, mode:l,n,k:amp, file:path)");
}

// ---- subcommand bodies ----

struct SpectrumOpts {
    int dim = 1;
    double mu_max = 60;
    std::string format = "json", out;
};

int cmd_spectrum(const SpectrumOpts& o) {
    auto table = spectrum::spectrum_table(o.dim, o.mu_max);
    if (o.format == "csv") {
        std::string text = "mu,lambda,l,n,k\n";
        for (const auto& e : table.entries)
            for (const auto& m : e.modes)
                text += std::to_string(e.mu) + "," +
                        std::to_string(spectrum::lambda_of(m.l, m.k, o.dim)) + "," +
                        std::to_string(m.l) + "," + std::to_string(m.n) + "," +
                        std::to_string(m.k) + "\n";
        emit(text, o.out);
        return 0;
    }
    json entries = json::array();
    for (const auto& e : table.entries) {
        json modes = json::array();
        for (const auto& m : e.modes)
            modes.push_back(json{{"l", m.l},
                                 {"n", m.n},
                                 {"k", m.k},
                                 {"lambda", spectrum::lambda_of(m.l, m.k, o.dim)}});
        entries.push_back(json{{"mu", e.mu},
                               {"lambda_min", e.lambda_min},
                               {"total_multiplicity", e.total_multiplicity},
                               {"modes", modes}});
    }
    emit(json{{"schema", "tfe-spectrum/1"},
              {"dim", o.dim},
              {"mu_max", o.mu_max},
              {"entries", entries}}
                 .dump(2) +
             "\n",
         o.out);
    return 0;
}

struct MolienOpts {
    std::string group;
    int dim = 2;
    int lmax = 12;
    std::string variant = "h";
    std::string format = "json", out;
    double active_mu_max = -1;
};

int cmd_molien(const MolienOpts& o) {
    auto g = parse_group(o.group, o.dim);
    if (o.active_mu_max >= 0) {
        auto table = spectrum::spectrum_table(g.dim, o.active_mu_max);
        auto rep = symmetry::active_modes(g, table);
        json entries = json::array();
        for (const auto& e : rep.entries)
            entries.push_back(json{{"mu", e.mu},
                                   {"total_multiplicity", e.total_multiplicity},
                                   {"active_multiplicity", e.active_multiplicity},
                                   {"mass_mode", e.mass_mode}});
        emit(json{{"schema", "tfe-active-modes/1"},
                  {"group", rep.group},
                  {"dim", rep.dim},
                  {"mu_max", o.active_mu_max},
                  {"first_active_mu", rep.first_active_mu},
                  {"first_active_angular_l", rep.first_active_angular_l},
                  {"entries", entries}}
                     .dump(2) +
                 "\n",
             o.out);
        return 0;
    }
    auto coef = o.variant == "p" ? symmetry::molien_polynomial(g, o.lmax)
                                 : symmetry::molien_harmonic(g, o.lmax);
    if (o.format == "csv") {
        std::string text = "l,coefficient\n";
        for (std::size_t l = 0; l < coef.size(); ++l)
            text += std::to_string(l) + "," + std::to_string(coef[l]) + "\n";
        emit(text, o.out);
        return 0;
    }
    emit(json{{"schema", "tfe-molien/1"},
              {"group", g.name},
              {"dim", g.dim},
              {"order", g.order()},
              {"variant", o.variant},
              {"lmax", o.lmax},
              {"coefficients", coef}}
                 .dump(2) +
             "\n",
         o.out);
    return 0;
}

struct TransformOpts {
    std::string op, in, out, mode = "0,1,0";
    double mass = 0;
    int nodes = 1024;
};

int cmd_transform(const TransformOpts& o) {
    using namespace tfe::transform;
    auto need_out = [&] {
        if (o.out.empty()) throw std::runtime_error("--op " + o.op + " needs --out");
    };
    auto frame_or = [&](SelfSimilarFrame fr, int dim) {
        if (o.mass > 0) return frame_from_mass(o.mass, dim);
        if (fr.mass > 0) return fr;
        throw std::runtime_error("no frame: pass --mass or use a field with a mass sidecar");
    };
    if (o.op == "p2c" || o.op == "c2p") {
        SelfSimilarFrame fr;
        auto d = read_droplet(o.in, &fr);
        fr = frame_or(fr, d.dim);
        need_out();
        write_field(o.out, o.op == "p2c" ? physical_to_confined(d, fr)
                                         : confined_to_physical(d, fr),
                    fr);
        return 0;
    }
    if (o.op == "v2w") {
        SelfSimilarFrame fr;
        auto d = read_droplet(o.in, &fr);
        need_out();
        write_field(o.out, v_to_w(d, uniform_ball_nodes(d.geom, o.nodes)), fr);
        return 0;
    }
    if (o.op == "w2v") {
        SelfSimilarFrame fr;
        auto w = read_perturbation(o.in, &fr);
        need_out();
        write_field(o.out, w_to_v(w), fr);
        return 0;
    }
    if (o.op == "diag") {
        auto d = read_droplet(o.in);
        auto g = diagnostics(d);
        emit(json{{"schema", "tfe-diagnostics/1"},
                  {"mass", g.mass},
                  {"mass_defect", g.mass_defect},
                  {"center_of_mass", g.center_of_mass},
                  {"support", json::array({g.support_lo, g.support_hi})},
                  {"lipschitz_closeness", g.lipschitz_closeness},
                  {"slope_defect", g.slope_defect},
                  {"perturbative", g.perturbative}}
                     .dump(2) +
                 "\n",
             o.out);
        return 0;
    }
    if (o.op == "amplitude") {
        auto mref = parse_mode_str(o.mode);
        std::string kind = peek_kind(o.in);
        double amp;
        int dim;
        if (kind == "droplet") {
            auto d = read_droplet(o.in);
            dim = d.dim;
            amp = mode_amplitude_v(d, spectrum::make_mode(mref.l, mref.n, mref.k, dim));
        } else if (kind == "perturbation") {
            auto w = read_perturbation(o.in);
            dim = w.dim;
            amp = mode_amplitude_w(w, spectrum::make_mode(mref.l, mref.n, mref.k, dim));
        } else {
            throw std::runtime_error("unrecognized field kind '" + kind + "' in sidecar");
        }
        emit(json{{"schema", "tfe-amplitude/1"},
                  {"side", kind == "droplet" ? "v" : "w"},
                  {"mode", json{{"l", mref.l}, {"n", mref.n}, {"k", mref.k}}},
                  {"mu", spectrum::mu_of(mref.l, mref.k, dim)},
                  {"lambda", spectrum::lambda_of(mref.l, mref.k, dim)},
                  {"amplitude", amp}}
                     .dump(2) +
                 "\n",
             o.out);
        return 0;
    }
    throw std::runtime_error("unknown --op '" + o.op +
                             "' (p2c, c2p, v2w, w2v, diag, amplitude)");
}

struct SimulateOpts {
    int dim = 1;
    std::string init = "stationary";
    double T = 1.0;
    simulator::SolverConfig cfg;
    double snap_every = 0.02;
    std::string out;
};

int cmd_simulate(SimulateOpts o) {
    o.cfg.dim = o.dim;
    auto v0 = make_init(o.cfg, o.init);
    std::vector<double> outs;
    for (double t = 0; t < o.T + 1e-12; t += o.snap_every) outs.push_back(std::min(t, o.T));
    auto traj = simulator::evolve(v0, o.T, o.cfg, outs);
    json prov{{"init", o.init},
              {"T", o.T},
              {"snap_every", o.snap_every},
              {"solver", json{{"h", o.cfg.h},
                              {"dt", o.cfg.dt},
                              {"xmax", o.cfg.xmax},
                              {"newton_tol", o.cfg.newton_tol},
                              {"max_newton", o.cfg.max_newton}}}};
    experiment::save_trajectory(o.out, traj, o.dim, prov);
    double m0 = traj.step_mass.empty() ? 0 : traj.step_mass.front();
    double drift = 0;
    for (double m : traj.step_mass) drift = std::max(drift, std::abs(m - m0));
    std::printf("%zu snapshots, %zu steps, mass %.12g (max drift %.3g) -> %s\n",
                traj.snapshots.size(), traj.step_times.size(), m0, drift, o.out.c_str());
    return 0;
}

struct RatesOpts {
    std::string traj;
    std::string observable = "mode_w", mode = "0,1,0", relative_to = "vstar", target, out;
    int nodes = 1024;
    simulator::RateWindow window;
};

int cmd_rates(const RatesOpts& o) {
    int dim = 1;
    auto traj = experiment::load_trajectory(o.traj, &dim);
    experiment::Observable obs;
    obs.type = o.observable;
    obs.mode = parse_mode_str(o.mode);
    obs.relative_to = o.relative_to;
    obs.nodes = o.nodes;
    auto [l, k] = parse_target_str(o.target);
    auto [times, amps] = experiment::observable_series(traj, obs, dim);
    auto rate = simulator::measure_rate(times, amps, o.window);
    json jobs_{{"type", obs.type}, {"relative_to", obs.relative_to}, {"nodes", obs.nodes}};
    if (obs.type == "mode_w")
        jobs_["mode"] = json{{"l", obs.mode.l}, {"n", obs.mode.n}, {"k", obs.mode.k}};
    emit(json{{"schema", "tfe-rates/1"},
              {"target", json{{"l", l}, {"k", k}}},
              {"target_mu", spectrum::mu_of(l, k, dim)},
              {"fitted_exponent", rate.exponent},
              {"r_squared", rate.r_squared},
              {"window", json{{"t_min", o.window.t_min},
                              {"t_max", o.window.t_max},
                              {"amp_min", o.window.amp_min},
                              {"amp_max", o.window.amp_max},
                              {"fit_t_lo", rate.t_lo},
                              {"fit_t_hi", rate.t_hi},
                              {"samples", rate.samples}}},
              {"observable", jobs_}}
                 .dump(2) +
             "\n",
         o.out);
    return 0;
}

struct NormsOpts {
    std::string in, out;
};

int cmd_norms(const NormsOpts& o) {
    auto w = transform::read_perturbation(o.in);
    auto r = linops::norms(w);
    emit(json{{"schema", "tfe-norms/1"},
              {"l2_rho", r.l2_rho},
              {"h_norm", r.h_norm},
              {"sup", r.sup},
              {"sup_grad", r.sup_grad},
              {"sup_rho_d2", r.sup_rho_d2},
              {"sup_rho2_d3", r.sup_rho2_d3},
              {"w_norm", r.w_norm}}
                 .dump(2) +
             "\n",
         o.out);
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"numerical toolkit for thin-film droplet large-time asymptotics"};
    app.set_config("--config", "", "read option defaults from an INI/TOML file");
    app.require_subcommand(1);
    int code = 0;

    SpectrumOpts so;
    auto* sp = app.add_subcommand("spectrum", "eigenvalue table mu_{l,k} with multiplicities");
    sp->add_option("--dim", so.dim, "space dimension N")->check(CLI::Range(1, 3));
    sp->add_option("--mu-max", so.mu_max, "largest eigenvalue to include");
    sp->add_option("--format", so.format)->check(CLI::IsMember({"json", "csv"}));
    sp->add_option("--out", so.out, "output file (default stdout)");
    sp->callback([&] { code = cmd_spectrum(so); });

    MolienOpts mo;
    auto* ml = app.add_subcommand("molien", "invariant-harmonic generating series of a group");
    ml->add_option("--group", mo.group, "cyclic:n, dihedral:n, tetra, octa, icosa")->required();
    ml->add_option("--dim", mo.dim, "ambient dimension for cyclic/dihedral")
        ->check(CLI::Range(2, 3));
    ml->add_option("--lmax", mo.lmax, "highest power reported")->check(CLI::Range(0, 512));
    ml->add_option("--variant", mo.variant, "h: harmonic, p: full polynomial")
        ->check(CLI::IsMember({"h", "p"}));
    ml->add_option("--format", mo.format)->check(CLI::IsMember({"json", "csv"}));
    ml->add_option("--active-mu-max", mo.active_mu_max,
                   "emit the active-mode report for the spectrum up to this mu instead");
    ml->add_option("--out", mo.out, "output file (default stdout)");
    ml->callback([&] { code = cmd_molien(mo); });

    TransformOpts to;
    auto* tr = app.add_subcommand("transform", "coordinate maps and droplet diagnostics");
    tr->add_option("--op", to.op, "p2c, c2p, v2w, w2v, diag, amplitude")->required();
    tr->add_option("--in", to.in, "input field (CSV base path, no extension)")->required();
    tr->add_option("--out", to.out, "output field base or report file");
    tr->add_option("--mass", to.mass, "physical mass fixing the self-similar frame");
    tr->add_option("--mode", to.mode, "projection mode l,n,k for --op amplitude");
    tr->add_option("--nodes", to.nodes, "ball nodes for --op v2w")->check(CLI::Range(8, 65536));
    tr->callback([&] { code = cmd_transform(to); });

    SimulateOpts io;
    auto* si = app.add_subcommand("simulate", "integrate the confined equation");
    si->add_option("--dim", io.dim, "space dimension (1: line, 2/3: radial)")
        ->check(CLI::Range(1, 3));
    si->add_option("--init", io.init, "stationary | shift:b | dilate:l | mode:l,n,k:a | file:p");
    si->add_option("--T", io.T, "final time")->required();
    si->add_option("--dx", io.cfg.h, "grid spacing");
    si->add_option("--dt", io.cfg.dt, "time step (clipped to snapshot times)");
    si->add_option("--xmax", io.cfg.xmax, "domain half-width");
    si->add_option("--newton-tol", io.cfg.newton_tol, "nonlinear residual tolerance");
    si->add_option("--max-newton", io.cfg.max_newton, "Newton iteration cap");
    si->add_option("--snap-every", io.snap_every, "snapshot cadence");
    si->add_option("--out", io.out, "trajectory output directory")->required();
    si->callback([&] { code = cmd_simulate(io); });

    RatesOpts ro;
    auto* ra = app.add_subcommand("rates", "fit a decay exponent over a trajectory directory");
    ra->add_option("--traj", ro.traj, "trajectory directory from simulate")->required();
    ra->add_option("--observable", ro.observable)
        ->check(CLI::IsMember({"com", "mode_w", "rho_norm"}));
    ra->add_option("--mode", ro.mode, "projection mode l,n,k for mode_w");
    ra->add_option("--relative-to", ro.relative_to)
        ->check(CLI::IsMember({"vstar", "terminal"}));
    ra->add_option("--nodes", ro.nodes, "ball nodes for the inverse map");
    ra->add_option("--target", ro.target, "target eigenvalue provenance l,k")->required();
    ra->add_option("--t-min", ro.window.t_min);
    ra->add_option("--t-max", ro.window.t_max);
    ra->add_option("--amp-min", ro.window.amp_min);
    ra->add_option("--amp-max", ro.window.amp_max);
    ra->add_option("--out", ro.out, "report file (default stdout)");
    ra->callback([&] { code = cmd_rates(ro); });

    NormsOpts no;
    auto* nr = app.add_subcommand("norms", "weighted and sup norms of a perturbation field");
    nr->add_option("--in", no.in, "perturbation field base path")->required();
    nr->add_option("--out", no.out, "report file (default stdout)");
    nr->callback([&] { code = cmd_norms(no); });

    std::vector<std::string> specs;
    std::string exp_out = ".";
    int jobs = 1;
    auto* ex = app.add_subcommand("experiment", "run experiment bundles, exit 0 iff all pass");
    ex->add_option("specs", specs, "experiment spec JSON files")->required();
    ex->add_option("--out", exp_out, "report output directory");
    ex->add_option("--jobs", jobs, "specs run in parallel")->check(CLI::Range(1, 64));
    ex->callback([&] { code = experiment::run_experiments(specs, exp_out, jobs); });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return code;
}

} // namespace tfe::cli
