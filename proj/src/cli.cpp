// SPDX-License-Identifier: Apache-2.0
#include "kglab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "kglab/darboux.hpp"
#include "kglab/diagnostics.hpp"
#include "kglab/errors.hpp"
#include "kglab/spectral.hpp"
#include "kglab/trace_io.hpp"

namespace kglab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json envelope(const std::string& command, const RunConfig* cfg, const Report& checks) {
    json j;
    j["command"] = command;
    if (cfg) {
        j["seed"] = cfg->seed;
        j["grid"] = {{"R", cfg->grid.R}, {"N", cfg->grid.N}};
    }
    j["pass"] = all_pass(checks);
    j["checks"] = to_json(checks);
    j["data"] = json::object();
    return j;
}

int exit_for(const Report& r) { return all_pass(r) ? kExitPass : kExitCheckFailure; }

fs::path prepare_output(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

void prefix(Report& r, const std::string& p) {
    for (auto& c : r) c.check_name = p + c.check_name;
}

double mirror_defect(const GridFn& f) {
    const double scale = f.max_abs();
    if (scale == 0.0) return 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) d = std::max(d, std::abs(f[j] - f[f.size() - 1 - j]));
    return d / scale;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return std::nan("");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::nan("");
}

GridFn continuous_bump(const RunConfig& cfg, const SpectralBasis& basis) {
    const double c = cfg.initial.bump_center, w = cfg.initial.bump_width;
    auto f = GridFn::sample(
        basis.grid,
        [&](double x) { return std::exp(-(x - c) * (x - c) / (2 * w * w)) + std::exp(-(x + c) * (x + c) / (2 * w * w)); },
        Parity::even);
    return project_continuous(f, basis);
}

// Full-field initial state of the configured preset.
FieldState initial_state(const RunConfig& cfg, const SpectralBasis& basis) {
    const double a = cfg.initial.amplitude;
    const double nu = SpectralBasis::nu;
    const auto& grid = basis.grid;
    const auto& p = cfg.initial.preset;
    if (p == "soliton") return FieldState{basis.Q, GridFn::zeros(grid), 0.0};
    if (p == "soliton+Y0")
        return FieldState{(basis.Q + a * basis.Y0).with_parity(Parity::even), ((a * nu) * basis.Y0).with_parity(Parity::even),
                          0.0};
    if (p == "soliton+Y2") return FieldState{(basis.Q + a * basis.Y2).with_parity(Parity::even), GridFn::zeros(grid), 0.0};
    if (p == "soliton+bump")
        return FieldState{(basis.Q + a * continuous_bump(cfg, basis)).with_parity(Parity::even), GridFn::zeros(grid),
                          0.0};
    return read_checkpoint(cfg.initial.file, grid);
}

struct AmplitudeResult {
    double amplitude = 0.0;
    double eps_norm = 0.0;
    double h = 0.0;
    double t_horizon = 0.0;
    int probes = 0;
    double max_distance = 0.0;
    bool bounded = false;
    bool converged = false;
    std::string error;
};

FieldState shot_state(const ShootResult& sr, const SpectralBasis& basis) {
    return FieldState{(basis.Q + sr.eps.phi1 + sr.h * basis.Y0).with_parity(Parity::even),
                      (sr.eps.phi2 + (sr.h * SpectralBasis::nu) * basis.Y0).with_parity(Parity::even), 0.0};
}

FieldState y2_perturbation(double a, const SpectralBasis& basis) {
    return FieldState{(a * basis.Y2).with_parity(Parity::even), GridFn::zeros(basis.grid), 0.0};
}

AmplitudeResult run_amplitude(double a, const RunConfig& cfg, const SpectralBasis& basis) {
    AmplitudeResult r;
    r.amplitude = a;
    try {
        const auto sr = shoot_manifold(y2_perturbation(a, basis), basis, cfg.shoot_config(), cfg.evolve_config());
        r.eps_norm = sr.eps_norm;
        r.h = sr.h;
        r.t_horizon = sr.t_horizon;
        r.probes = sr.probes;
        r.converged = true;
        if (sr.eps_norm == 0.0 || cfg.shoot.bound_horizon == 0.0) {
            r.bounded = true;
            return r;
        }
        EvolveConfig ecfg = cfg.evolve_config();
        ecfg.record_every = 10;
        track_manifold(shot_state(sr, basis), cfg.shoot.bound_horizon, basis, ecfg, TrackConfig{},
                       [&](const FieldState& s) {
                           r.max_distance = std::max(r.max_distance, h1l2_norm(s.phi1 - basis.Q, s.phi2));
                           return true;
                       });
        r.bounded = r.max_distance <= 5.0 * r.eps_norm;
    } catch (const BracketError& e) {
        r.error = e.what();
    }
    return r;
}

json identity_json(const IdentityResult& r) {
    return {{"name", r.name},
            {"mismatch", r.mismatch},
            {"coarse_mismatch", r.coarse_mismatch},
            {"richardson_mismatch", r.richardson_mismatch},
            {"tolerance", r.tolerance},
            {"worst_time", r.worst_time},
            {"pass", r.pass}};
}

// Identity replay plus row invariants; appends checks and returns the JSON table.
json replay_identities(const std::vector<TraceRecord>& trace, Report& checks) {
    json table = json::array();
    for (Identity id : {Identity::I, Identity::JZ, Identity::B, Identity::K, Identity::modz2}) {
        const auto r = virial_identity_check(trace, id);
        table.push_back(identity_json(r));
        checks.push_back(Check{std::string("identity_") + r.name, std::max(r.mismatch, r.richardson_mismatch),
                               r.tolerance, r.pass});
    }
    append(checks, trace_row_checks(trace));
    return table;
}

}  // namespace

json to_json(const Report& r) {
    json arr = json::array();
    for (const auto& c : r)
        arr.push_back({{"check_name", c.check_name}, {"residual", c.residual}, {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    return arr;
}

unsigned worker_threads() {
    if (const char* env = std::getenv("KGLAB_THREADS")) {
        const std::string s(env);
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || std::stoul(s) == 0 ||
            s.size() > 4)
            throw ConfigError("KGLAB_THREADS must be a positive integer, got '" + s + "'");
        return static_cast<unsigned>(std::stoul(s));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- eigencheck

CommandOutcome cmd_eigencheck(const RunConfig& cfg) {
    const Grid1D grid = cfg.make_grid();
    const auto basis = build_basis(grid);
    Report checks = eigen_checks(basis);
    Report fine = eigen_checks(build_basis(grid.refined()));
    prefix(fine, "refined_");
    append(checks, fine);
    append(checks, eigen_convergence(grid));
    append(checks, weight_checks(build_weights(grid, cfg.weights.A, cfg.weights.eps)));
    CommandOutcome out{envelope("eigencheck", &cfg, checks), exit_for(checks)};
    out.report["data"] = {{"h", grid.spacing()}, {"refined_N", grid.refined().size()}};
    return out;
}

// ---------------------------------------------------------------- fgr

CommandOutcome cmd_fgr(const RunConfig& cfg) {
    const Grid1D grid = cfg.make_grid();
    const auto basis = build_basis(grid);
    const double gq = fgr_constant_by_quadrature(basis);
    const double gc = fgr_closed_form();
    Report checks;
    checks.push_back(make_check("Gamma_quadrature_vs_closed_form", std::abs(gq - gc) / gc, 1e-9));
    checks.push_back(make_check("g_orthogonal_Y0", std::abs(inner(basis.Y0, basis.g)), 1e-9));
    checks.push_back(make_check("g_orthogonal_Y2", std::abs(inner(basis.Y2, basis.g)), 1e-9));
    append(checks, fgr_H_identities(basis));
    // Same spacing on half the domain.
    const Grid1D half(0.5 * grid.half_width(), (grid.size() - 1) / 2 + 1, -1.0);
    const double gh = fgr_constant_by_quadrature(build_basis(half));
    checks.push_back(make_check("Gamma_half_domain_agreement", std::abs(gh - gq) / gc, 1e-9));
    CommandOutcome out{envelope("fgr", &cfg, checks), exit_for(checks)};
    out.report["data"] = {{"Gamma_quadrature", gq},
                          {"Gamma_closed_form", gc},
                          {"Gamma_relative_error", std::abs(gq - gc) / gc},
                          {"Gamma_half_domain", gh},
                          {"inner_Y0_g", inner(basis.Y0, basis.g)},
                          {"inner_Y2_g", inner(basis.Y2, basis.g)}};
    return out;
}

// ---------------------------------------------------------------- darboux

CommandOutcome cmd_darboux(const RunConfig& cfg) {
    const Grid1D grid = cfg.make_grid();
    const auto basis = build_basis(grid);
    const auto F = build_factors(grid);
    const auto w = build_weights(grid, cfg.weights.A, cfg.weights.eps);
    Report checks = darboux_identity_suite(F, basis);
    append(checks, darboux_convergence(grid));

    std::vector<double> eps = {0.01, 0.05, 0.2};
    if (std::find(eps.begin(), eps.end(), cfg.weights.eps) == eps.end()) eps.push_back(cfg.weights.eps);
    const auto probes = darboux_probes(F, basis, w.sigma_A, cfg.seed, eps);
    double worst = 0.0;
    for (double v : probes.transfer_ratio) worst = std::isfinite(v) ? std::max(worst, v) : HUGE_VAL;
    checks.push_back(make_check("transfer_ratio_finite", worst, 1e6));
    checks.push_back(make_check("schur_probe_bound",
                                *std::max_element(probes.schur.begin(), probes.schur.end()), 50.0));

    // Coercivity on odd inputs: x sech(x/B) and 50 random odd bumps.
    std::uint64_t state = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
    std::vector<GridFn> odd;
    odd.push_back(GridFn::sample(grid, [](double x) { return x * sech(x / VirialWeights::B); }, Parity::odd));
    for (int k = 0; k < 50; ++k) odd.push_back(random_bump(grid, state, Parity::odd));
    double violation = 0.0, min_ratio = HUGE_VAL;
    for (const auto& f : odd) {
        const auto [lhs, rhs] = coercivity_probe(f, w);
        violation = std::max(violation, rhs - lhs);
        if (rhs > 0.0) min_ratio = std::min(min_ratio, lhs / rhs);
    }
    checks.push_back(make_check("coercivity_lhs_minus_rhs", std::max(violation, 0.0), 1e-12));

    CommandOutcome out{envelope("darboux", &cfg, checks), exit_for(checks)};
    json table = json::array();
    for (std::size_t i = 0; i < probes.eps.size(); ++i)
        table.push_back({{"eps", probes.eps[i]},
                         {"transfer_ratio", probes.transfer_ratio[i]},
                         {"seps_weighted_constant", probes.seps_constant[i]}});
    out.report["data"] = {{"eps_sweep", table},
                          {"schur", probes.schur},
                          {"coercivity_min_ratio", min_ratio},
                          {"coercivity_samples", odd.size()}};
    return out;
}

// ---------------------------------------------------------------- evolve

CommandOutcome cmd_evolve(const RunConfig& cfg) {
    const Grid1D grid = cfg.make_grid();
    const auto basis = build_basis(grid);
    const auto F = build_factors(grid);
    const auto w = build_weights(grid, cfg.weights.A, cfg.weights.eps);
    const EvolveConfig ecfg = cfg.evolve_config();
    const bool linear = ecfg.mode == EvolveMode::linearized;
    const auto dir = prepare_output(cfg);
    const TraceBuilder builder(basis, w, F, ecfg.sponge);

    const FieldState init = initial_state(cfg, basis);
    const FieldState start =
        linear ? FieldState{(init.phi1 - basis.Q).with_parity(init.phi1.parity()), init.phi2, init.time} : init;
    auto full = [&](const FieldState& s) {
        return linear ? FieldState{(basis.Q + s.phi1).with_parity(s.phi1.parity()), s.phi2, s.time} : s;
    };

    auto trace_file = open_out(dir / "trace.csv");
    TraceWriter writer(trace_file);
    std::vector<double> ts, logb;
    double E0 = 0.0, E1 = 0.0, max_b = 0.0, exit_time = -1.0;
    std::size_t records = 0;
    auto observer = [&](const FieldState& s) {
        const auto r = builder(full(s));
        writer.write(r);
        if (records == 0) E0 = r.E;
        E1 = r.E;
        ++records;
        max_b = std::max(max_b, std::abs(r.bplus));
        if (exit_time < 0.0 && std::abs(r.bplus) > cfg.shoot.theta_exit) exit_time = r.t;
        if (r.bplus != 0.0) {
            ts.push_back(r.t);
            logb.push_back(std::log(std::abs(r.bplus)));
        }
        return true;
    };
    const auto res = evolve(start, ecfg, basis, observer);
    const FieldState last = full(res.final);

    Report checks;
    checks.push_back(make_check("parity_defect_final", mirror_defect(last.phi1), 1e-12));
    if (!ecfg.sponge && !linear && !res.blew_up)
        checks.push_back(make_check("energy_relative_drift", std::abs(E1 - E0) / std::max(std::abs(E0), 1e-300), 1e-6));

    CommandOutcome out{envelope("evolve", &cfg, checks), exit_for(checks)};
    out.report["data"] = {{"preset", cfg.initial.preset},
                          {"mode", linear ? "linearized" : "nonlinear"},
                          {"amplitude", cfg.initial.amplitude},
                          {"records", records},
                          {"t_final", res.final.time},
                          {"energy_start", E0},
                          {"energy_end", E1},
                          {"max_abs_bplus", max_b},
                          {"bplus_exit_time", exit_time},
                          {"fitted_bplus_growth_rate", fit_slope(ts, logb)},
                          {"blew_up", res.blew_up}};
    if (res.blew_up) {
        writer.footer("status", "blowup");
        writer.footer("blowup_time", format_double(res.blowup_time));
        out.report["data"]["blowup_time"] = res.blowup_time;
        out.report["pass"] = false;
        out.exit_code = kExitBlowUp;
    } else {
        writer.footer("status", "complete");
    }
    auto ck = open_out(dir / "checkpoint.csv");
    write_checkpoint(ck, last);
    return out;
}

// ---------------------------------------------------------------- shoot

CommandOutcome cmd_shoot(const RunConfig& cfg, unsigned threads) {
    const Grid1D grid = cfg.make_grid();
    const auto basis = build_basis(grid);
    const auto dir = prepare_output(cfg);

    const auto& amps = cfg.shoot.amplitudes;
    std::vector<AmplitudeResult> results(amps.size());
    std::vector<std::exception_ptr> errors(amps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < amps.size();) {
            try {
                results[i] = run_amplitude(amps[i], cfg, basis);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(amps.size())));
    for (unsigned k = 1; k < n_workers; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Report checks;
    json table = json::array();
    std::vector<double> lx, ly;
    double largest = 0.0;
    bool bracket_failure = false;
    for (const auto& r : results) {
        json row = {{"amplitude", r.amplitude},     {"eps_norm", r.eps_norm},   {"h", r.h},
                    {"t_horizon", r.t_horizon},     {"probes", r.probes},       {"converged", r.converged},
                    {"max_distance", r.max_distance}, {"distance_bound", 5.0 * r.eps_norm}, {"bounded", r.bounded}};
        if (!r.error.empty()) row["error"] = r.error;
        table.push_back(row);
        if (!r.converged) {
            bracket_failure = true;
            continue;
        }
        largest = std::max(largest, r.amplitude);
        checks.push_back(make_check("bounded_trajectory_a=" + format_double(r.amplitude),
                                    r.eps_norm > 0.0 ? r.max_distance / r.eps_norm : 0.0, 5.0));
        if (r.eps_norm > 0.0 && r.h != 0.0) {
            lx.push_back(std::log(r.eps_norm));
            ly.push_back(std::log(std::abs(r.h)));
        }
    }
    const double exponent = fit_slope(lx, ly);
    if (lx.size() >= 2) checks.push_back(make_floor_check("h_scaling_exponent", exponent, 1.4));

    json data = {{"amplitudes", table}, {"h_scaling_exponent", exponent}, {"largest_converged_amplitude", largest}};

    if (!bracket_failure && cfg.shoot.trace_t_end > 0.0) {
        const auto F = build_factors(grid);
        const auto w = build_weights(grid, cfg.weights.A, cfg.weights.eps);
        const EvolveConfig ecfg = cfg.evolve_config();
        const TraceBuilder builder(basis, w, F, ecfg.sponge);
        const auto sr = shoot_manifold(y2_perturbation(cfg.shoot.trace_amplitude, basis), basis, cfg.shoot_config(), ecfg);
        auto trace_file = open_out(dir / "trace.csv");
        TraceWriter writer(trace_file);
        std::vector<TraceRecord> trace;
        const auto tr = track_manifold(shot_state(sr, basis), cfg.shoot.trace_t_end, basis, ecfg, TrackConfig{},
                                       [&](const FieldState& s) {
                                           trace.push_back(builder(s));
                                           writer.write(trace.back());
                                           return true;
                                       });
        writer.footer("status", "complete");
        writer.footer("trace_amplitude", format_double(cfg.shoot.trace_amplitude));
        writer.footer("h", format_double(sr.h));
        auto ck = open_out(dir / "checkpoint.csv");
        write_checkpoint(ck, tr.final);

        const auto sum = damping_summary(trace, w.A);
        checks.push_back(make_check("M_end_over_M_start", sum.M_end / sum.M_start, 0.1));
        checks.push_back(make_check("localE5_end_over_start", sum.localE5_end / sum.localE5_start, 0.2));
        checks.push_back(make_check("intM_last_quarter_over_first_quarter",
                                    sum.intM_last_quarter / sum.intM_first_quarter, 0.5));
        json td = {{"amplitude", cfg.shoot.trace_amplitude},
                   {"h", sr.h},
                   {"t_end", cfg.shoot.trace_t_end},
                   {"records", trace.size()},
                   {"tracking_probes", tr.probes},
                   {"max_abs_correction", tr.corrections.empty()
                                              ? 0.0
                                              : std::abs(*std::max_element(tr.corrections.begin(), tr.corrections.end(),
                                                                           [](double a, double b) {
                                                                               return std::abs(a) < std::abs(b);
                                                                           }))},
                   {"M_start", sum.M_start},
                   {"M_end", sum.M_end},
                   {"localE5_start", sum.localE5_start},
                   {"localE5_end", sum.localE5_end},
                   {"intM_total", sum.intM_total},
                   {"intM_first_quarter", sum.intM_first_quarter},
                   {"intM_last_quarter", sum.intM_last_quarter},
                   {"I_constant", sum.I_constant},
                   {"H_constant", sum.H_constant}};
        if (cfg.shoot.trace_t_end >= 250.0) {
            const double w0 = windowed_modz2(trace, 0.0, 50.0), w200 = windowed_modz2(trace, 200.0, 50.0);
            td["windowed_modz2_T0"] = w0;
            td["windowed_modz2_T200"] = w200;
            checks.push_back(make_check("windowed_modz2_T200_over_T0", w200 / w0, std::nextafter(1.0, 0.0)));
        }
        if (ecfg.record_every == 1 && trace.size() >= 7) td["identities"] = replay_identities(trace, checks);
        data["trace"] = td;
    }

    CommandOutcome out{envelope("shoot", &cfg, checks), exit_for(checks)};
    out.report["data"] = data;
    if (bracket_failure) {
        out.report["pass"] = false;
        out.exit_code = kExitBracketFailure;
    }
    return out;
}

// ---------------------------------------------------------------- trace-check

CommandOutcome cmd_trace_check(const std::string& trace_path) {
    const auto file = read_trace_csv(trace_path);
    if (file.records.empty()) throw SchemaError("trace '" + trace_path + "' contains no records");
    Report checks;
    const json table = replay_identities(file.records, checks);
    CommandOutcome out{envelope("trace-check", nullptr, checks), exit_for(checks)};
    json meta = json::object();
    for (const auto& [k, v] : file.meta) meta[k] = v;
    out.report["data"] = {{"trace", trace_path}, {"records", file.records.size()}, {"identities", table}, {"meta", meta}};
    return out;
}

// ---------------------------------------------------------------- entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic Klein-Gordon soliton laboratory"};
    app.set_version_flag("--version", "kglab 1.0");
    std::string config_path, out_dir, preset, trace_path;
    std::uint64_t seed = 0;
    bool print_cfg = false;
    app.add_option("--config", config_path, "INI config file");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized suites");
    auto* preset_opt = app.add_option("--preset", preset, "initial-state preset");
    app.add_flag("--print-config", print_cfg, "print the effective configuration and exit");
    app.require_subcommand(0, 1);
    app.fallthrough();
    auto* eig = app.add_subcommand("eigencheck", "spectral closed forms and weights");
    auto* fgr = app.add_subcommand("fgr", "Fermi golden rule constant and H identities");
    auto* dbx = app.add_subcommand("darboux", "Darboux factor identities and probes");
    auto* evo = app.add_subcommand("evolve", "evolve a preset and stream the trace");
    auto* sho = app.add_subcommand("shoot", "centre-stable manifold shooting and damping trace");
    auto* tck = app.add_subcommand("trace-check", "replay exact identities on a stored trace");
    tck->add_option("trace", trace_path, "trace CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForVersion&) {
        out << "kglab 1.0\n";
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "kglab: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (*out_opt) cfg.output_dir = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (*preset_opt) cfg.initial.preset = preset;
        validate(cfg);
        if (print_cfg) {
            print_config(out, cfg);
            return kExitPass;
        }
        if (app.get_subcommands().empty()) {
            err << "kglab: a subcommand is required\n" << app.help();
            return kExitConfigError;
        }
        CommandOutcome result;
        std::string name;
        if (*eig) {
            name = "eigencheck";
            result = cmd_eigencheck(cfg);
        } else if (*fgr) {
            name = "fgr";
            result = cmd_fgr(cfg);
        } else if (*dbx) {
            name = "darboux";
            result = cmd_darboux(cfg);
        } else if (*evo) {
            name = "evolve";
            result = cmd_evolve(cfg);
        } else if (*sho) {
            name = "shoot";
            result = cmd_shoot(cfg, worker_threads());
        } else {
            name = "trace_check";
            result = cmd_trace_check(trace_path);
        }
        const auto dir = prepare_output(cfg);
        auto f = open_out(dir / (name + "_report.json"));
        f << result.report.dump(2) << '\n';
        for (const auto& c : result.report["checks"])
            if (!c["pass"].get<bool>()) err << "FAIL " << c["check_name"].get<std::string>() << '\n';
        out << name << ": " << (result.report["pass"].get<bool>() ? "pass" : "fail") << " (exit "
            << result.exit_code << ")\n";
        return result.exit_code;
    } catch (const SchemaError& e) {
        err << "kglab: schema error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ConfigError& e) {
        err << "kglab: config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const PreconditionError& e) {
        err << "kglab: invalid input: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const BracketError& e) {
        err << "kglab: bracket failure: " << e.what() << '\n';
        return kExitBracketFailure;
    } catch (const BlowUpError& e) {
        err << "kglab: blow-up after t = " << e.last_valid_time << ": " << e.what() << '\n';
        return kExitBlowUp;
    } catch (const std::exception& e) {
        err << "kglab: " << e.what() << '\n';
        return kExitCheckFailure;
    }
}

}  // namespace kglab
