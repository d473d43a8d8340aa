#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stratsim/energy.hpp"
#include "stratsim/linear_oracle.hpp"

namespace stratsim {

struct RunConfig {
    int m = 16;
    double dt = 5e-3;
    double t_end = 50.0;
    double epsilon = 1e-2;       // initial total-energy^{1/2} target
    int k_energy = 3;            // diagnostic order k
    int gamma = 5;               // decay parameter, > 4 for bootstrap runs
    int kappa = 16;              // regularity order, >= 6 + 2 gamma
    std::uint64_t seed = 1;
    double spectrum_slope = 2.0;  // r in |F| ~ (1+kappa^2)^{-r/2}
    int output_every = 20;
    DynamicsMode mode = DynamicsMode::Nonlinear;
    int checkpoint_every = 0;    // 0 = no checkpoints
    double blowup_cap = 1e6;
    std::string out_dir;         // empty = keep everything in memory
    std::string run_name = "run";
};

std::string mode_name(DynamicsMode m);
DynamicsMode mode_from_name(const std::string& s);

/// Throws std::invalid_argument on inconsistent configs; bootstrap
/// constraints (gamma > 4, kappa >= 6 + 2 gamma) only when requested.
void validate_config(const RunConfig& cfg, bool bootstrap = false);

/// key=value file, one entry per line, '#' comments.
RunConfig load_config_file(const std::string& path);
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

/// Random state with |F| ~ (1+kappa^2)^{-slope/2} and uniform phases,
/// velocity built as the perpendicular gradient of a random stream function
/// (divergence-free with the right boundary structure by construction), and
/// the whole state rescaled so the order-(kappa+1) composite energy starts
/// at epsilon^2 to 1e-10
/// relative.  The p = 0 density column is drawn a factor epsilon smaller so
/// the stratification correction starts quadratically small.
StateVector generate_initial_data(const RunConfig& cfg);

struct RunResult {
    std::vector<EnergyReport> series;
    StateVector final_state;
    bool blew_up = false;
    std::string blowup_reason;
    // sup trackers over the whole run
    double sup_E_total_kappa1 = 0.0;
    double sup_uh4_envelope = 0.0;     // sup ||u||_{H4} (1+t)^{gamma/4}
    double sup_rho_tilde = 0.0;        // sup ||rho_tilde||_{H^{kappa+1}}
    double gronwall_integral = 0.0;    // int ||u||_{H4} ds (trapezoid)
    double max_trace = 0.0;
    std::string csv_path;
    std::string json_path;
    std::string last_checkpoint;
};

RunResult run(const RunConfig& cfg);
RunResult run_from_state(const RunConfig& cfg, const StateVector& init);

/// Continue a checkpointed run to cfg-echoed t_end (or the override).
RunResult resume(const std::string& checkpoint_path, const std::string& out_dir,
                 std::optional<double> t_end_override = std::nullopt);

struct Checkpoint {
    RunConfig cfg;
    std::uint64_t step = 0;
    StateVector state;
    double sup_E_total_kappa1 = 0.0;
    double sup_uh4_envelope = 0.0;
    double sup_rho_tilde = 0.0;
    double gronwall_integral = 0.0;
    double max_trace = 0.0;
    double prev_u_h4 = 0.0;
};

void write_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

struct DecayFit {
    double envelope_constant = 0.0;  // sup v (1+t)^{gamma/4}
    double fitted_exponent = 0.0;    // log-log slope over the tail half
};

/// Requires >= 20 samples spanning a decade in (1+t).
DecayFit fit_decay(std::span<const std::pair<double, double>> series, int gamma);

struct LedgerEntry {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct Ledger {
    std::vector<LedgerEntry> entries;
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

/// Property-check battery at cfg.m; failures are data, not errors.
Ledger check_suite(const RunConfig& cfg);

std::string ledger_to_json(const Ledger& l);

std::uint64_t fnv1a64(const std::string& bytes);

/// Round-trippable, locale-independent formatting used for every CSV field.
std::string format_double(double v);

}  // namespace stratsim
