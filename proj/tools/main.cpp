// Command-line driver: run / check / fit-decay / sweep / resume.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stratsim/harness.hpp"
#include "stratsim/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace stratsim;

namespace {

void add_config_flags(CLI::App* app, RunConfig& cfg, std::string& config_path, std::string& mode_str) {
    app->add_option("--config", config_path, "key=value config file (flags override)");
    app->add_option("-m,--m", cfg.m, "truncation order");
    app->add_option("--dt", cfg.dt, "time step");
    app->add_option("--t-end", cfg.t_end, "horizon");
    app->add_option("--epsilon", cfg.epsilon, "initial total-energy^{1/2} target");
    app->add_option("-k,--k-energy", cfg.k_energy, "diagnostic energy order");
    app->add_option("--gamma", cfg.gamma, "decay parameter");
    app->add_option("--kappa", cfg.kappa, "regularity order");
    app->add_option("--seed", cfg.seed, "RNG seed");
    app->add_option("--spectrum-slope", cfg.spectrum_slope, "initial coefficient decay r");
    app->add_option("--output-every", cfg.output_every, "steps between reports");
    app->add_option("--mode", mode_str, "nonlinear | linearized | quasilinear");
    app->add_option("--checkpoint-every", cfg.checkpoint_every, "steps between checkpoints (0 = off)");
    app->add_option("--blowup-cap", cfg.blowup_cap, "halt when the blow-up integrand exceeds this");
    app->add_option("-o,--out", cfg.out_dir, "output directory (env STRATSIM_OUTPUT_DIR overrides)");
    app->add_option("--name", cfg.run_name, "run name (file prefix)");
}

RunConfig finalize_config(CLI::App* app, const RunConfig& flag_cfg, const std::string& config_path,
                          const std::string& mode_str) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    // flags override file values only when actually given
    auto given = [&](const std::string& name) { return app->count(name) > 0; };
    if (given("--m")) cfg.m = flag_cfg.m;
    if (given("--dt")) cfg.dt = flag_cfg.dt;
    if (given("--t-end")) cfg.t_end = flag_cfg.t_end;
    if (given("--epsilon")) cfg.epsilon = flag_cfg.epsilon;
    if (given("--k-energy")) cfg.k_energy = flag_cfg.k_energy;
    if (given("--gamma")) cfg.gamma = flag_cfg.gamma;
    if (given("--kappa")) cfg.kappa = flag_cfg.kappa;
    if (given("--seed")) cfg.seed = flag_cfg.seed;
    if (given("--spectrum-slope")) cfg.spectrum_slope = flag_cfg.spectrum_slope;
    if (given("--output-every")) cfg.output_every = flag_cfg.output_every;
    if (given("--checkpoint-every")) cfg.checkpoint_every = flag_cfg.checkpoint_every;
    if (given("--blowup-cap")) cfg.blowup_cap = flag_cfg.blowup_cap;
    if (given("--out")) cfg.out_dir = flag_cfg.out_dir;
    if (given("--name")) cfg.run_name = flag_cfg.run_name;
    if (!mode_str.empty()) cfg.mode = mode_from_name(mode_str);
    return cfg;
}

int print_run_summary(const RunResult& r, const RunConfig& cfg, bool assert_bootstrap) {
    std::printf("reports: %zu  final t = %s\n", r.series.size(),
                format_double(r.final_state.t).c_str());
    std::printf("sup E_total(kappa+1)     = %s\n", format_double(r.sup_E_total_kappa1).c_str());
    std::printf("sup |u|_H4 (1+t)^{g/4}   = %s\n", format_double(r.sup_uh4_envelope).c_str());
    std::printf("sup |rho~|_H{kappa+1}    = %s\n", format_double(r.sup_rho_tilde).c_str());
    std::printf("int |u|_H4 ds            = %s\n", format_double(r.gronwall_integral).c_str());
    std::printf("max boundary trace       = %s\n", format_double(r.max_trace).c_str());
    if (!r.csv_path.empty()) std::printf("csv: %s\n", r.csv_path.c_str());
    if (r.blew_up) {
        std::printf("BLOWUP: %s\n", r.blowup_reason.c_str());
        return 2;
    }
    if (assert_bootstrap) {
        const double e2 = cfg.epsilon * cfg.epsilon;
        bool ok = r.sup_E_total_kappa1 <= 3.0 * e2 && r.sup_uh4_envelope <= 10.0 * cfg.epsilon &&
                  r.sup_rho_tilde <= 6.0 * e2 && r.max_trace < 1e-10 &&
                  e2 * std::exp(r.gronwall_integral) <= 3.0 * e2;
        std::printf("bootstrap assertions: %s\n", ok ? "PASS" : "FAIL");
        return ok ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral Galerkin simulator for damped Boussinesq flow on the strip"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "parallel kernel threads (0 = serial)");

    RunConfig cfg;
    std::string config_path, mode_str;

    auto* run_cmd = app.add_subcommand("run", "integrate one trajectory");
    add_config_flags(run_cmd, cfg, config_path, mode_str);
    bool assert_bootstrap = false;
    run_cmd->add_flag("--assert-bootstrap", assert_bootstrap,
                      "exit nonzero unless the bootstrap bounds hold");

    auto* check_cmd = app.add_subcommand("check", "run the property-check suite");
    RunConfig check_cfg;
    check_cfg.m = 8;
    std::string check_config_path, check_mode_str, ledger_out;
    add_config_flags(check_cmd, check_cfg, check_config_path, check_mode_str);
    check_cmd->add_option("--ledger", ledger_out, "write the JSON ledger here");

    auto* fit_cmd = app.add_subcommand("fit-decay", "fit a decay envelope from a run CSV");
    std::string fit_csv, fit_column = "u_h4";
    int fit_gamma = 5;
    double max_envelope = 0.0;
    fit_cmd->add_option("--csv", fit_csv, "run CSV")->required();
    fit_cmd->add_option("--column", fit_column, "CSV column to fit");
    fit_cmd->add_option("--gamma", fit_gamma, "decay parameter");
    fit_cmd->add_option("--max-envelope", max_envelope, "assert envelope below this (0 = report only)");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a seed sweep");
    add_config_flags(sweep_cmd, cfg, config_path, mode_str);
    int n_seeds = 4, jobs = 1;
    sweep_cmd->add_option("--seeds", n_seeds, "number of seeds (seed, seed+1, ...)");
    sweep_cmd->add_option("--jobs", jobs, "concurrent trajectories");

    auto* resume_cmd = app.add_subcommand("resume", "continue from a checkpoint");
    std::string ckpt_path, resume_out;
    double resume_t_end = -1.0;
    resume_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
    resume_cmd->add_option("-o,--out", resume_out, "output directory")->required();
    resume_cmd->add_option("--t-end", resume_t_end, "override horizon");

    CLI11_PARSE(app, argc, argv);

    if (threads > 0) {
        kernels::set_parallel(true);
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
    }

    try {
        if (*run_cmd) {
            RunConfig final_cfg = finalize_config(run_cmd, cfg, config_path, mode_str);
            validate_config(final_cfg, assert_bootstrap);
            RunResult r = run(final_cfg);
            return print_run_summary(r, final_cfg, assert_bootstrap);
        }
        if (*check_cmd) {
            RunConfig final_cfg = finalize_config(check_cmd, check_cfg, check_config_path, check_mode_str);
            Ledger led = check_suite(final_cfg);
            for (const auto& e : led.entries)
                std::printf("%-32s %s  (measured %.3e, threshold %.3e)\n", e.name.c_str(),
                            e.pass ? "PASS" : "FAIL", e.measured, e.threshold);
            if (!ledger_out.empty()) {
                std::ofstream f(ledger_out);
                f << ledger_to_json(led) << "\n";
            }
            return led.all_pass() ? 0 : 1;
        }
        if (*fit_cmd) {
            std::ifstream in(fit_csv);
            if (!in) throw std::runtime_error("cannot open " + fit_csv);
            std::string header;
            std::getline(in, header);
            std::vector<std::string> cols;
            std::stringstream hs(header);
            std::string item;
            while (std::getline(hs, item, ',')) cols.push_back(item);
            int t_idx = -1, v_idx = -1;
            for (int i = 0; i < int(cols.size()); ++i) {
                if (cols[i] == "t") t_idx = i;
                if (cols[i] == fit_column) v_idx = i;
            }
            if (t_idx < 0 || v_idx < 0) throw std::runtime_error("column not found: " + fit_column);
            std::vector<std::pair<double, double>> series;
            std::string line;
            while (std::getline(in, line)) {
                std::stringstream ls(line);
                std::vector<std::string> vals;
                while (std::getline(ls, item, ',')) vals.push_back(item);
                if (int(vals.size()) <= std::max(t_idx, v_idx)) continue;
                series.emplace_back(std::stod(vals[t_idx]), std::stod(vals[v_idx]));
            }
            DecayFit fit = fit_decay(series, fit_gamma);
            std::printf("envelope_constant = %s\n", format_double(fit.envelope_constant).c_str());
            std::printf("fitted_exponent   = %s\n", format_double(fit.fitted_exponent).c_str());
            if (max_envelope > 0.0) return fit.envelope_constant <= max_envelope ? 0 : 1;
            return 0;
        }
        if (*sweep_cmd) {
            RunConfig base = finalize_config(sweep_cmd, cfg, config_path, mode_str);
            validate_config(base);
            std::vector<RunConfig> cfgs;
            for (int i = 0; i < n_seeds; ++i) {
                RunConfig c = base;
                c.seed = base.seed + std::uint64_t(i);
                c.run_name = base.run_name + "_seed" + std::to_string(c.seed);
                cfgs.push_back(c);
            }
            std::vector<RunResult> results(cfgs.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= cfgs.size()) return;
                    results[i] = run(cfgs[i]);
                }
            };
            std::vector<std::thread> pool;
            for (int j = 0; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
            int bad = 0;
            for (std::size_t i = 0; i < cfgs.size(); ++i) {
                std::printf("seed %llu: sup E_total = %s%s\n",
                            static_cast<unsigned long long>(cfgs[i].seed),
                            format_double(results[i].sup_E_total_kappa1).c_str(),
                            results[i].blew_up ? "  [BLOWUP]" : "");
                if (results[i].blew_up) ++bad;
            }
            return bad == 0 ? 0 : 2;
        }
        if (*resume_cmd) {
            std::optional<double> t_end;
            if (resume_t_end >= 0.0) t_end = resume_t_end;
            RunResult r = resume(ckpt_path, resume_out, t_end);
            RunConfig echo = read_checkpoint(ckpt_path).cfg;
            return print_run_summary(r, echo, false);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
