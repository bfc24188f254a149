#pragma once

// Command-line front end: subcommands {run, ensemble, noise, cpt,
// feasibility, presets}, layered configuration (preset < config file <
// flags), validation with key-naming diagnostics, and CSV/SVG emission.
//
// Exit codes: 0 success, 1 internal error, 2 configuration error,
// 3 numerical failure, 4 I/O failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abreact/cpt.hpp"
#include "abreact/ensemble.hpp"
#include "abreact/feasibility.hpp"
#include "abreact/io.hpp"
#include "abreact/noise_analytics.hpp"
#include "abreact/presets.hpp"

namespace abreact {

struct MissingKey : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownKey : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

namespace cli_detail {

// All tunable keys of the run/ensemble subcommands, bound to CLI options;
// preset values are written here before parsing so file and flag values
// override them.
struct Draft {
    double omega0 = 0.0;
    double tau = 1.0;
    double pulse_center = 0.0;
    double delta = 0.0;
    double Delta = std::numeric_limits<double>::quiet_NaN();  // NaN: use -delta
    double gamma = 0.0;
    double lambda = 1.0;
    double lambda_physical = 4.718e4;
    double chi_aa = 0.5303;
    double chi_bb = 0.3214;
    double chi_ab = 0.8731;
    double chi_default = 0.0938;
    std::string statistics = "bosonic";
    double kinetic_ab = 0.0;
    double kinetic_b = 0.0;
    double n_total = 1e5;
    double R = 0.5;
    double t_end = 100.0;
    int report_points = 1001;
    double rel_tol = 1e-11;
    double abs_tol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    int n_traj = 300;
    std::uint64_t master_seed = 0;
    double seed_variance = 0.0;
    int workers = 0;
    std::string preset;
    std::string output_path;
    std::string plot_path;
    bool zero_seeds = false;
    bool dry_run = false;
};

inline const std::vector<std::string>& required_physics_keys() {
    static const std::vector<std::string> keys = {"omega0", "tau", "delta",
                                                  "gamma",  "R",   "n-total"};
    return keys;
}

inline void add_common_options(CLI::App* cmd, Draft& d) {
    cmd->set_config("--config", "", "flat key=value configuration file (# comments)");
    cmd->allow_config_extras(CLI::config_extras_mode::error);
    cmd->add_option("--preset", d.preset, "start from a named preset (see `presets`)");
    cmd->add_option("--omega0", d.omega0, "peak Rabi rate Omega0, units of lambda")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--tau", d.tau, "pulse width, units of 1/lambda");
    cmd->add_option("--pulse-center", d.pulse_center, "pulse peak instant t0 (default 0)");
    cmd->add_option("--delta", d.delta, "one-photon detuning, units of lambda");
    cmd->add_option("--Delta", d.Delta, "second detuning (default -delta, two-photon resonance)");
    cmd->add_option("--gamma", d.gamma, "trimer decay rate, units of lambda")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda", d.lambda, "reduced atom-dimer coupling (1 in reduced units)");
    cmd->add_option("--lambda-physical", d.lambda_physical, "physical lambda in 1/s");
    cmd->add_option("--chi-aa", d.chi_aa, "collision parameter chi_aa, units of lambda");
    cmd->add_option("--chi-bb", d.chi_bb, "collision parameter chi_bb");
    cmd->add_option("--chi-ab", d.chi_ab, "collision parameter chi_ab (A atom with B atom)");
    cmd->add_option("--chi-default", d.chi_default, "all remaining collision channels");
    cmd->add_option("--statistics", d.statistics, "bosonic | bose-fermi")
        ->check(CLI::IsMember({"bosonic", "bose-fermi"}));
    cmd->add_option("--kinetic-ab", d.kinetic_ab, "A_ab kinetic coefficient (bose-fermi)");
    cmd->add_option("--kinetic-b", d.kinetic_b, "A_b kinetic coefficient (bose-fermi)");
    cmd->add_option("--n-total", d.n_total, "total constituent-atom number");
    cmd->add_option("--R", d.R, "initial ratio N_a(0) / 2 N_b2(0)");
    cmd->add_option("--t-end", d.t_end, "integration span, units of 1/lambda");
    cmd->add_option("--report-points", d.report_points, "uniform report-grid size")
        ->check(CLI::Range(2, 100000000));
    cmd->add_option("--rel-tol", d.rel_tol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", d.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--max-step", d.max_step, "integrator step-size cap");
    cmd->add_option("--master-seed", d.master_seed, "64-bit reproducibility seed");
    cmd->add_option("--seed-variance", d.seed_variance,
                    "E|seed|^2 per product mode (default 1/(2 n_total))");
    cmd->add_option("--output", d.output_path, "CSV output path (default: stdout)");
    cmd->add_flag("--dry-run", d.dry_run, "validate and print the resolved configuration only");
}

inline void apply_preset(const CLI::App* cmd, Draft& d) {
    if (d.preset.empty()) return;
    const Preset* p = find_preset(d.preset);
    if (!p) throw UnknownKey("unknown preset '" + d.preset + "'; see `presets`");
    const auto set_double = [&](const std::string& key, double& field, const std::string& v) {
        if (cmd->get_option("--" + key)->count() == 0) field = std::stod(v);
    };
    for (const auto& [key, value] : p->values) {
        if (key == "omega0") set_double(key, d.omega0, value);
        else if (key == "tau") set_double(key, d.tau, value);
        else if (key == "delta") set_double(key, d.delta, value);
        else if (key == "gamma") set_double(key, d.gamma, value);
        else if (key == "R") set_double(key, d.R, value);
        else if (key == "n-total") set_double(key, d.n_total, value);
        else if (key == "t-end") set_double(key, d.t_end, value);
        else if (key == "n-traj") {
            if (cmd->get_option("--n-traj")->count() == 0) d.n_traj = std::stoi(value);
        } else if (key == "report-points") {
            if (cmd->get_option("--report-points")->count() == 0)
                d.report_points = std::stoi(value);
        } else if (key == "statistics") {
            if (cmd->get_option("--statistics")->count() == 0) d.statistics = value;
        } else {
            throw UnknownKey("preset '" + d.preset + "' carries unknown key '" + key + "'");
        }
    }
}

inline void check_required(const CLI::App* cmd, const Draft& d) {
    std::set<std::string> provided;
    if (!d.preset.empty())
        for (const auto& [key, value] : find_preset(d.preset)->values) provided.insert(key);
    std::string missing;
    for (const auto& key : required_physics_keys()) {
        if (provided.count(key)) continue;
        if (cmd->get_option("--" + key)->count() > 0) continue;
        missing += missing.empty() ? key : ", " + key;
    }
    if (!missing.empty())
        throw MissingKey("missing required key(s): " + missing +
                         " (supply flags, a config file, or --preset)");
}

inline EnsembleConfig build_ensemble_config(const Draft& d) {
    ModelParams p;
    p.lambda = d.lambda;
    p.lambda_physical = d.lambda_physical;
    p.omega0 = d.omega0;
    p.tau = d.tau;
    p.pulse_center = d.pulse_center;
    p.delta = d.delta;
    p.Delta = std::isnan(d.Delta) ? -d.delta : d.Delta;
    p.gamma = d.gamma;
    for (auto& row : p.chi) row.fill(d.chi_default);
    p.chi[species::a][species::a] = d.chi_aa;
    p.chi[species::b][species::b] = d.chi_bb;
    p.chi[species::a][species::b] = d.chi_ab;
    p.chi[species::b][species::a] = d.chi_ab;
    p.statistics = d.statistics == "bose-fermi" ? Statistics::BoseFermi : Statistics::AllBosonic;
    p.kinetic_ab = d.kinetic_ab;
    p.kinetic_b = d.kinetic_b;
    p.n_total = d.n_total;

    EnsembleConfig cfg;
    cfg.params = p;
    cfg.R = d.R;
    cfg.n_traj = d.n_traj;
    cfg.master_seed = d.master_seed;
    cfg.seed_variance = d.seed_variance;
    cfg.workers = d.workers;
    cfg.integrator.rel_tol = d.rel_tol;
    cfg.integrator.abs_tol = d.abs_tol;
    cfg.integrator.t_end = d.t_end;
    cfg.integrator.report_points = d.report_points;
    cfg.integrator.max_step = d.max_step;
    return cfg;
}

inline void print_resolved(const Draft& d, std::ostream& out) {
    const auto kv = [&](const std::string& k, const std::string& v) {
        out << k << " = " << v << "\n";
    };
    if (!d.preset.empty()) kv("preset", d.preset);
    kv("omega0", format_value(d.omega0));
    kv("tau", format_value(d.tau));
    kv("pulse-center", format_value(d.pulse_center));
    kv("delta", format_value(d.delta));
    kv("Delta", format_value(std::isnan(d.Delta) ? -d.delta : d.Delta));
    kv("gamma", format_value(d.gamma));
    kv("lambda", format_value(d.lambda));
    kv("chi-aa", format_value(d.chi_aa));
    kv("chi-bb", format_value(d.chi_bb));
    kv("chi-ab", format_value(d.chi_ab));
    kv("chi-default", format_value(d.chi_default));
    kv("statistics", d.statistics);
    if (d.statistics == "bose-fermi") {
        kv("kinetic-ab", format_value(d.kinetic_ab));
        kv("kinetic-b", format_value(d.kinetic_b));
    }
    kv("n-total", format_value(d.n_total));
    kv("R", format_value(d.R));
    kv("t-end", format_value(d.t_end));
    kv("report-points", std::to_string(d.report_points));
    kv("rel-tol", format_value(d.rel_tol));
    kv("abs-tol", format_value(d.abs_tol));
    kv("n-traj", std::to_string(d.n_traj));
    kv("seed-variance", format_value(d.seed_variance > 0.0 ? d.seed_variance
                                                           : 1.0 / (2.0 * d.n_total)));
    kv("master_seed", std::to_string(d.master_seed));
}

inline void write_table(const Table& table, const std::string& path) {
    if (path.empty())
        write_csv(table, std::cout);
    else
        emit_csv(table, path);
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
    using cli_detail::Draft;

    CLI::App app{"abreact - stochastic simulator of the collective abstraction reaction "
                 "A + B2 -> AB + B in quantum-degenerate gases"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.footer("Exit codes: 0 success, 1 internal error, 2 configuration error,\n"
               "            3 numerical failure, 4 I/O failure.");

    Draft run_draft, ens_draft;

    CLI::App* cmd_run = app.add_subcommand("run", "integrate a single trajectory, emit CSV");
    cli_detail::add_common_options(cmd_run, run_draft);
    cmd_run->add_flag("--zero-seeds", run_draft.zero_seeds,
                      "start the product modes at exactly zero");

    CLI::App* cmd_ens =
        app.add_subcommand("ensemble", "run a noise-seeded trajectory ensemble, emit statistics");
    cli_detail::add_common_options(cmd_ens, ens_draft);
    cmd_ens->add_option("--n-traj", ens_draft.n_traj, "number of trajectories")
        ->check(CLI::Range(2, 10000000));
    cmd_ens->add_option("--workers", ens_draft.workers,
                        "worker threads (default: ABREACT_WORKERS or hardware)");
    cmd_ens->add_option("--plot", ens_draft.plot_path, "also write an SVG population plot");

    // dummy so `run --n-traj` is rejected while presets can still carry the key
    cmd_run->add_option("--n-traj", run_draft.n_traj)->group("");

    CLI::App* cmd_noise = app.add_subcommand("noise", "linearized quantum-noise analytics table");
    double noise_gain = 0.0, noise_t = -1.0, noise_t_min = 0.0, noise_t_max = -1.0;
    int noise_points = 101;
    std::string noise_stats = "boson", noise_out;
    cmd_noise->add_option("--gain", noise_gain, "effective gain, units of lambda")->required();
    cmd_noise->add_option("--t", noise_t, "single evaluation time, units of 1/lambda");
    cmd_noise->add_option("--t-min", noise_t_min, "sweep start (default 0)");
    cmd_noise->add_option("--t-max", noise_t_max, "sweep end; enables the sweep");
    cmd_noise->add_option("--points", noise_points, "sweep length")->check(CLI::Range(2, 10000000));
    cmd_noise->add_option("--statistics", noise_stats, "boson | fermion")
        ->check(CLI::IsMember({"boson", "fermion"}));
    cmd_noise->add_option("--output", noise_out, "CSV output path (default: stdout)");

    CLI::App* cmd_cpt = app.add_subcommand("cpt", "CPT dark-state steady-state tables");
    double cpt_r = 0.5, cpt_x = 0.0, cpt_r_min = 0.01, cpt_r_max = -1.0;
    int cpt_points = 101;
    bool cpt_optimize = false;
    std::string cpt_out;
    cmd_cpt->add_option("--R", cpt_r, "initial ratio");
    cmd_cpt->add_option("--omega-over-lambda", cpt_x, "Omega/lambda")->check(CLI::NonNegativeNumber);
    cmd_cpt->add_option("--R-min", cpt_r_min, "sweep start");
    cmd_cpt->add_option("--R-max", cpt_r_max, "sweep end; enables the sweep");
    cmd_cpt->add_option("--points", cpt_points, "sweep length")->check(CLI::Range(2, 10000000));
    cmd_cpt->add_flag("--optimize", cpt_optimize, "report the maximizing R instead");
    cmd_cpt->add_option("--output", cpt_out, "CSV output path (default: stdout)");

    CLI::App* cmd_feas =
        app.add_subcommand("feasibility", "collision-rate feasibility estimate");
    double feas_lambda_phys = 4.718e4, feas_omega0 = 20.0, feas_delta = 3.0, feas_r = 0.5;
    double feas_density_cm3 = -1.0, feas_density_m3 = -1.0, feas_rate_coeff = 1e-17;
    cmd_feas->add_option("--lambda-physical", feas_lambda_phys, "physical lambda in 1/s");
    cmd_feas->add_option("--omega0", feas_omega0, "peak Rabi rate, units of lambda");
    cmd_feas->add_option("--delta", feas_delta, "one-photon detuning, units of lambda");
    cmd_feas->add_option("--R", feas_r, "initial ratio (sets the reactant fractions)");
    auto* opt_cm3 = cmd_feas->add_option("--density-cm3", feas_density_cm3, "sample density, cm^-3");
    auto* opt_m3 = cmd_feas->add_option("--density-m3", feas_density_m3, "sample density, m^-3");
    opt_cm3->excludes(opt_m3);
    cmd_feas->add_option("--rate-coeff", feas_rate_coeff, "inelastic rate coefficient, m^3/s");

    CLI::App* cmd_presets = app.add_subcommand("presets", "list the shipped experiment recipes");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return kExitConfig;
        }

        if (cmd_presets->parsed()) {
            for (const auto& p : presets()) {
                std::cout << p.name << ": " << p.description << "\n";
                for (const auto& [k, v] : p.values) std::cout << "  " << k << " = " << v << "\n";
            }
            return kExitOk;
        }

        if (cmd_noise->parsed()) {
            const NoiseModel model = make_noise_model(
                noise_gain, 1.0, 1.0,
                noise_stats == "boson" ? PairStatistics::Bosonic : PairStatistics::Fermionic);
            std::vector<double> ts;
            if (cmd_noise->get_option("--t-max")->count() > 0) {
                for (int i = 0; i < noise_points; ++i)
                    ts.push_back(noise_t_min +
                                 (noise_t_max - noise_t_min) * i / (noise_points - 1));
            } else if (cmd_noise->get_option("--t")->count() > 0) {
                ts.push_back(noise_t);
            } else {
                throw MissingKey("missing required key(s): t (or t-max for a sweep)");
            }
            Table table;
            table.header = {"t", "pair_population", "pair_correlation", "mandel_q",
                            "cauchy_schwarz_excess"};
            for (double t : ts) {
                const bool cs_ok = model.statistics == PairStatistics::Bosonic && t > 0.0;
                table.rows.push_back({t, pair_population(model, t), pair_correlation(model, t),
                                      mandel_q(model, t),
                                      cs_ok ? cauchy_schwarz_excess(model, t)
                                            : std::numeric_limits<double>::quiet_NaN()});
            }
            cli_detail::write_table(table, noise_out);
            return kExitOk;
        }

        if (cmd_cpt->parsed()) {
            Table table;
            table.header = {"R", "omega_over_lambda", "n_ab_s"};
            if (cpt_optimize) {
                const auto [r_star, value] = optimal_ratio(cpt_x);
                table.rows.push_back({r_star, cpt_x, value});
            } else if (cmd_cpt->get_option("--R-max")->count() > 0) {
                for (int i = 0; i < cpt_points; ++i) {
                    const double r = cpt_r_min + (cpt_r_max - cpt_r_min) * i / (cpt_points - 1);
                    table.rows.push_back({r, cpt_x, cpt_steady_state(r, cpt_x)});
                }
            } else {
                table.rows.push_back({cpt_r, cpt_x, cpt_steady_state(cpt_r, cpt_x)});
            }
            cli_detail::write_table(table, cpt_out);
            return kExitOk;
        }

        if (cmd_feas->parsed()) {
            if (feas_density_cm3 < 0.0 && feas_density_m3 < 0.0)
                throw MissingKey("missing required key(s): density-cm3 or density-m3");
            const double density = feas_density_m3 >= 0.0
                                       ? feas_density_m3
                                       : cm3_to_m3_density(feas_density_cm3);
            ModelParams p;
            p.lambda_physical = feas_lambda_phys;
            p.omega0 = feas_omega0;
            p.delta = feas_delta;
            const double f_b2 = 1.0 / (2.0 * (1.0 + feas_r));
            const double f_a = feas_r / (1.0 + feas_r);
            const FeasibilityReport rep = assess(p, f_a, f_b2, density, feas_rate_coeff);
            std::cout << "gain_physical = " << format_value(rep.gain_physical) << " s^-1\n"
                      << "max_permissible_rate = " << format_value(rep.max_permissible_rate)
                      << " s^-1\n"
                      << "inelastic_rate = " << format_value(rep.inelastic_rate) << " s^-1\n"
                      << "dominated_by_fluctuations = "
                      << (rep.dominated_by_fluctuations ? "true" : "false") << "\n";
            return kExitOk;
        }

        CLI::App* cmd = cmd_run->parsed() ? cmd_run : cmd_ens;
        Draft& draft = cmd_run->parsed() ? run_draft : ens_draft;
        cli_detail::apply_preset(cmd, draft);
        cli_detail::check_required(cmd, draft);
        if (cmd->get_option("--master-seed")->count() == 0 && draft.master_seed == 0)
            draft.master_seed = std::random_device{}();

        EnsembleConfig cfg = cli_detail::build_ensemble_config(draft);
        cfg.validate();
        // Replay recipe (preset, overrides, master_seed); stderr keeps stdout
        // clean for CSV, --dry-run makes it the output itself.
        cli_detail::print_resolved(draft, draft.dry_run ? std::cout : std::cerr);
        if (draft.dry_run) return kExitOk;

        if (cmd_run->parsed()) {
            FieldState init;
            if (draft.zero_seeds) {
                init = initial_state(cfg.R);
            } else {
                const SeedSample seed = sample_seed(cfg.effective_seed_variance(),
                                                    derive_seed(cfg.master_seed, 0));
                init = initial_state(cfg.R, seed.seed_ab, seed.seed_b);
            }
            const TrajectoryResult traj = integrate(init, cfg.params, cfg.integrator);
            cli_detail::write_table(to_table(traj), draft.output_path);
            return kExitOk;
        }

        const EnsembleStats stats = run_ensemble(cfg);
        cli_detail::write_table(to_table(stats), draft.output_path);
        if (!draft.plot_path.empty())
            emit_plot(stats, cpt_steady_state(cfg.R, 0.0), draft.plot_path);
        return kExitOk;
    } catch (const MissingKey& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownKey& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StepSizeUnderflow& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NonFiniteState& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const EnsembleError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "io failure: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

inline int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("abreact");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace abreact
