#include "stratsim/harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stratsim/grid.hpp"
#include "stratsim/prng.hpp"
#include "stratsim/summation.hpp"

namespace stratsim {

namespace fs = std::filesystem;

std::string mode_name(DynamicsMode m) {
    switch (m) {
        case DynamicsMode::Nonlinear: return "nonlinear";
        case DynamicsMode::Linearized: return "linearized";
        case DynamicsMode::Quasilinear: return "quasilinear";
    }
    return "nonlinear";
}

DynamicsMode mode_from_name(const std::string& s) {
    if (s == "nonlinear") return DynamicsMode::Nonlinear;
    if (s == "linearized") return DynamicsMode::Linearized;
    if (s == "quasilinear") return DynamicsMode::Quasilinear;
    throw std::invalid_argument("unknown mode: " + s);
}

void validate_config(const RunConfig& cfg, bool bootstrap) {
    if (cfg.m < 1) throw std::invalid_argument("config: m >= 1 required");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: dt > 0 required");
    if (cfg.t_end < 0.0) throw std::invalid_argument("config: t_end >= 0 required");
    if (cfg.epsilon < 0.0) throw std::invalid_argument("config: epsilon >= 0 required");
    if (cfg.k_energy < 0) throw std::invalid_argument("config: k_energy >= 0 required");
    if (cfg.output_every < 1) throw std::invalid_argument("config: output_every >= 1 required");
    if (bootstrap) {
        if (cfg.gamma <= 4) throw std::invalid_argument("config: bootstrap requires gamma > 4");
        if (cfg.kappa < 6 + 2 * cfg.gamma)
            throw std::invalid_argument("config: bootstrap requires kappa >= 6 + 2 gamma");
    }
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "m") cfg.m = as_int();
    else if (key == "dt") cfg.dt = as_double();
    else if (key == "t_end") cfg.t_end = as_double();
    else if (key == "epsilon") cfg.epsilon = as_double();
    else if (key == "k_energy") cfg.k_energy = as_int();
    else if (key == "gamma") cfg.gamma = as_int();
    else if (key == "kappa") cfg.kappa = as_int();
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "spectrum_slope") cfg.spectrum_slope = as_double();
    else if (key == "output_every") cfg.output_every = as_int();
    else if (key == "mode") cfg.mode = mode_from_name(value);
    else if (key == "checkpoint_every") cfg.checkpoint_every = as_int();
    else if (key == "blowup_cap") cfg.blowup_cap = as_double();
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "run_name") cfg.run_name = value;
    else throw std::invalid_argument("unknown config key: " + key);
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](const std::string& s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_kv(cfg, key, value);
    }
    return cfg;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

Dynamics make_dynamics(const RunConfig& cfg, const StateVector& init) {
    if (cfg.mode == DynamicsMode::Quasilinear) {
        auto [mp, bar] = split_mean(init.rho);
        (void)bar;
        return Dynamics(DynamicsMode::Quasilinear, cfg.m, WeightFunction::from_mean_profile(mp));
    }
    return Dynamics(cfg.mode, cfg.m);
}

double total_energy_for_cfg(const StateVector& s, const RunConfig& cfg) {
    Dynamics dyn = make_dynamics(cfg, s);
    return total_energy(s, dyn, cfg.kappa);
}

}  // namespace

StateVector generate_initial_data(const RunConfig& cfg) {
    validate_config(cfg);
    const int m = cfg.m;
    StateVector s(m);
    if (cfg.epsilon == 0.0) return s;

    for (int attempt = 0; attempt < 8; ++attempt) {
        CounterRng rng(cfg.seed + 0x9E3779B97F4A7C15ull * std::uint64_t(attempt));
        SpectralScalar psi(Family::Omega, m);
        for (int p = 0; p <= m; ++p)
            for (int q = 1; q <= m; ++q) {
                double mag = std::pow(1.0 + kappa_sq(p, q), -0.5 * cfg.spectrum_slope);
                if (p == 0) {
                    // stratification correction starts a factor epsilon below
                    // the fluctuation so it is quadratically small after the
                    // global rescale
                    s.rho.at(0, q) = Complex(cfg.epsilon * mag * rng.sign(), 0.0);
                } else {
                    s.rho.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
                }
            }
        for (int p = 0; p <= m; ++p)
            for (int q = 1; q <= m; ++q) {
                double mag = std::pow(1.0 + kappa_sq(p, q), -0.5 * cfg.spectrum_slope);
                if (p == 0)
                    psi.at(0, q) = Complex(mag * rng.sign(), 0.0);
                else
                    psi.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
            }
        s.rho.mirror_from_nonnegative();
        psi.mirror_from_nonnegative();
        s.u1 = dy(psi);
        s.u1 *= -1.0;
        s.u2 = dx(psi);

        double f0 = total_energy_for_cfg(s, cfg);
        if (!(f0 > 0.0) || !std::isfinite(f0)) continue;  // reseed
        double c = cfg.epsilon / std::sqrt(f0);
        StateVector scaled = s;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            scaled = s;
            scaled *= c;
            double f = total_energy_for_cfg(scaled, cfg);
            if (!(f > 0.0) || !std::isfinite(f)) break;
            if (std::abs(f - cfg.epsilon * cfg.epsilon) <= 1e-10 * cfg.epsilon * cfg.epsilon) {
                ok = true;
                break;
            }
            c *= cfg.epsilon / std::sqrt(f);
        }
        if (ok) {
            auto [mp, bar] = split_mean(scaled.rho);
            (void)bar;
            if (!(WeightFunction::from_mean_profile(mp).weight_min() > 0.0)) continue;  // reseed
            scaled.t = 0.0;
            return scaled;
        }
    }
    throw std::runtime_error("generate_initial_data: rescale failed after reseeding");
}

namespace {

// --- checkpoint byte helpers (explicit little-endian) ---------------------

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
struct ByteReader {
    const std::string& b;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > b.size()) throw std::runtime_error("checkpoint: truncated file");
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(b[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(b[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

void put_field(std::string& out, const SpectralScalar& f) {
    put_u64(out, f.size());
    for (const auto& z : f.raw()) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
}

void get_field(ByteReader& r, SpectralScalar& f) {
    std::uint64_t n = r.u64();
    if (n != f.size()) throw std::runtime_error("checkpoint: field size mismatch");
    for (auto& z : f.raw()) {
        double re = r.f64();
        double im = r.f64();
        z = Complex(re, im);
    }
}

}  // namespace

void write_checkpoint(const Checkpoint& c, const std::string& path) {
    std::string out;
    out += "STRA1";
    out.push_back(char(1));  // version
    put_u32(out, std::uint32_t(c.cfg.m));
    put_f64(out, c.cfg.dt);
    put_f64(out, c.cfg.t_end);
    put_f64(out, c.cfg.epsilon);
    put_u32(out, std::uint32_t(c.cfg.k_energy));
    put_u32(out, std::uint32_t(c.cfg.gamma));
    put_u32(out, std::uint32_t(c.cfg.kappa));
    put_u64(out, c.cfg.seed);
    put_f64(out, c.cfg.spectrum_slope);
    put_u32(out, std::uint32_t(c.cfg.output_every));
    out.push_back(char(static_cast<int>(c.cfg.mode)));
    put_u32(out, std::uint32_t(c.cfg.checkpoint_every));
    put_f64(out, c.cfg.blowup_cap);
    put_u64(out, c.step);
    put_f64(out, c.state.t);
    put_field(out, c.state.rho);
    put_field(out, c.state.u1);
    put_field(out, c.state.u2);
    put_f64(out, c.sup_E_total_kappa1);
    put_f64(out, c.sup_uh4_envelope);
    put_f64(out, c.sup_rho_tilde);
    put_f64(out, c.gronwall_integral);
    put_f64(out, c.max_trace);
    put_f64(out, c.prev_u_h4);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.write(out.data(), std::streamsize(out.size()));
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read checkpoint: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string bytes = ss.str();
    if (bytes.size() < 6 || bytes.substr(0, 5) != "STRA1")
        throw std::runtime_error("checkpoint: bad magic");
    if (bytes[5] != char(1)) throw std::runtime_error("checkpoint: unsupported version");

    ByteReader r{bytes, 6};
    Checkpoint c;
    c.cfg.m = int(r.u32());
    c.cfg.dt = r.f64();
    c.cfg.t_end = r.f64();
    c.cfg.epsilon = r.f64();
    c.cfg.k_energy = int(r.u32());
    c.cfg.gamma = int(r.u32());
    c.cfg.kappa = int(r.u32());
    c.cfg.seed = r.u64();
    c.cfg.spectrum_slope = r.f64();
    c.cfg.output_every = int(r.u32());
    r.need(1);
    c.cfg.mode = static_cast<DynamicsMode>(bytes[r.pos++]);
    c.cfg.checkpoint_every = int(r.u32());
    c.cfg.blowup_cap = r.f64();
    c.step = r.u64();
    c.state = StateVector(c.cfg.m);
    c.state.t = r.f64();
    get_field(r, c.state.rho);
    get_field(r, c.state.u1);
    get_field(r, c.state.u2);
    c.sup_E_total_kappa1 = r.f64();
    c.sup_uh4_envelope = r.f64();
    c.sup_rho_tilde = r.f64();
    c.gronwall_integral = r.f64();
    c.max_trace = r.f64();
    c.prev_u_h4 = r.f64();
    return c;
}

namespace {

const char* kCsvHeader =
    "step,t,e_k,E_k,Edot_k1,E_total_k1,psi1,psi2,weight_min,boundary_trace_max,"
    "blowup_integrand,u_h4,rho_bar_h4,rho_tilde_hkappa1,E_total_kappa1,gronwall_integral\n";

std::string csv_row(std::uint64_t step, const EnergyReport& r, double gronwall) {
    std::string row = std::to_string(step);
    for (double v : {r.t, r.e_k, r.E_k, r.Edot_k1, r.E_total_k1, r.psi1, r.psi2, r.weight_min,
                     r.boundary_trace_max, r.blowup_integrand, r.u_h4, r.rho_bar_h4,
                     r.rho_tilde_hkappa1, r.E_total_kappa1, gronwall}) {
        row += ',';
        row += format_double(v);
    }
    row += '\n';
    return row;
}

std::string out_dir_override(const std::string& configured) {
    if (const char* env = std::getenv("STRATSIM_OUTPUT_DIR")) return env;
    return configured;
}

struct RunTrackers {
    double sup_total = 0.0, sup_env = 0.0, sup_rt = 0.0, gronwall = 0.0, max_trace = 0.0, prev_u_h4 = 0.0;
};

RunResult run_loop(const RunConfig& cfg_in, const StateVector& init, std::uint64_t start_step,
                   RunTrackers tr) {
    RunConfig cfg = cfg_in;
    cfg.out_dir = out_dir_override(cfg.out_dir);
    validate_config(cfg);

    RunResult res;
    res.final_state = init;
    Dynamics dyn = make_dynamics(cfg, init);

    const std::uint64_t n_steps = std::uint64_t(std::llround(cfg.t_end / cfg.dt));
    std::string csv;
    const bool writing = !cfg.out_dir.empty();
    if (writing) fs::create_directories(cfg.out_dir);
    csv += kCsvHeader;

    StateVector s = init;
    auto track_step = [&](const StateVector& cur) {
        double uh4 = std::sqrt(hk_norm_sq_velocity(cur.velocity(), 4));
        tr.gronwall += 0.5 * cfg.dt * (tr.prev_u_h4 + uh4);
        tr.prev_u_h4 = uh4;
        double env = uh4 * std::pow(1.0 + cur.t, 0.25 * cfg.gamma);
        tr.sup_env = std::max(tr.sup_env, env);
    };
    auto emit = [&](std::uint64_t step, const StateVector& cur) {
        EnergyReport r = make_report(cur, dyn, cfg.k_energy, cfg.kappa);
        tr.sup_total = std::max(tr.sup_total, r.E_total_kappa1);
        tr.sup_rt = std::max(tr.sup_rt, r.rho_tilde_hkappa1);
        tr.max_trace = std::max(tr.max_trace, r.boundary_trace_max);
        double env = r.u_h4 * std::pow(1.0 + cur.t, 0.25 * cfg.gamma);
        tr.sup_env = std::max(tr.sup_env, env);
        res.series.push_back(r);
        csv += csv_row(step, r, tr.gronwall);
        if (r.blowup_integrand > cfg.blowup_cap) {
            res.blew_up = true;
            res.blowup_reason = "blowup integrand exceeded cap at t = " + format_double(cur.t);
        }
        return !res.blew_up;
    };

    if (start_step == 0) {
        tr.prev_u_h4 = std::sqrt(hk_norm_sq_velocity(s.velocity(), 4));
        emit(0, s);
    }

    std::uint64_t step = start_step;
    while (step < n_steps && !res.blew_up) {
        try {
            s = dyn.step_rk4(s, cfg.dt);
        } catch (const BlowupError& e) {
            res.blew_up = true;
            res.blowup_reason = e.what();
            break;
        }
        ++step;
        track_step(s);
        if (step % std::uint64_t(cfg.output_every) == 0 || step == n_steps) {
            if (!emit(step, s)) break;
        }
        if (writing && cfg.checkpoint_every > 0 &&
            (step % std::uint64_t(cfg.checkpoint_every) == 0 || step == n_steps)) {
            Checkpoint c{cfg, step, s, tr.sup_total, tr.sup_env, tr.sup_rt, tr.gronwall, tr.max_trace,
                         tr.prev_u_h4};
            c.cfg.out_dir.clear();
            std::string path = cfg.out_dir + "/" + cfg.run_name + "_ckpt_" + std::to_string(step) + ".bin";
            write_checkpoint(c, path);
            res.last_checkpoint = path;
        }
    }

    res.final_state = s;
    res.sup_E_total_kappa1 = tr.sup_total;
    res.sup_uh4_envelope = tr.sup_env;
    res.sup_rho_tilde = tr.sup_rt;
    res.gronwall_integral = tr.gronwall;
    res.max_trace = tr.max_trace;

    if (writing) {
        res.csv_path = cfg.out_dir + "/" + cfg.run_name + ".csv";
        std::ofstream f(res.csv_path, std::ios::binary | std::ios::trunc);
        f.write(csv.data(), std::streamsize(csv.size()));
        f.close();

        nlohmann::json j;
        j["config"] = {{"m", cfg.m},
                       {"dt", cfg.dt},
                       {"t_end", cfg.t_end},
                       {"epsilon", cfg.epsilon},
                       {"k_energy", cfg.k_energy},
                       {"gamma", cfg.gamma},
                       {"kappa", cfg.kappa},
                       {"seed", cfg.seed},
                       {"spectrum_slope", cfg.spectrum_slope},
                       {"output_every", cfg.output_every},
                       {"mode", mode_name(cfg.mode)},
                       {"checkpoint_every", cfg.checkpoint_every},
                       {"blowup_cap", cfg.blowup_cap}};
        char hex[19];
        std::snprintf(hex, sizeof(hex), "0x%016llx", static_cast<unsigned long long>(fnv1a64(csv)));
        j["csv_fnv1a64"] = hex;
        j["blew_up"] = res.blew_up;
        if (res.blew_up) j["blowup_reason"] = res.blowup_reason;
        j["sup"] = {{"E_total_kappa1", res.sup_E_total_kappa1},
                    {"uh4_envelope", res.sup_uh4_envelope},
                    {"rho_tilde_hkappa1", res.sup_rho_tilde},
                    {"boundary_trace", res.max_trace}};
        j["gronwall_integral"] = res.gronwall_integral;
        res.json_path = cfg.out_dir + "/" + cfg.run_name + ".json";
        std::ofstream jf(res.json_path, std::ios::binary | std::ios::trunc);
        jf << j.dump(2) << "\n";
    }
    return res;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    StateVector init = generate_initial_data(cfg);
    return run_loop(cfg, init, 0, RunTrackers{});
}

RunResult run_from_state(const RunConfig& cfg, const StateVector& init) {
    return run_loop(cfg, init, 0, RunTrackers{});
}

RunResult resume(const std::string& checkpoint_path, const std::string& out_dir,
                 std::optional<double> t_end_override) {
    Checkpoint c = read_checkpoint(checkpoint_path);
    RunConfig cfg = c.cfg;
    cfg.out_dir = out_dir;
    cfg.run_name = c.cfg.run_name + "_resumed";
    if (t_end_override) cfg.t_end = *t_end_override;
    RunTrackers tr{c.sup_E_total_kappa1, c.sup_uh4_envelope, c.sup_rho_tilde, c.gronwall_integral,
                   c.max_trace, c.prev_u_h4};
    return run_loop(cfg, c.state, c.step, tr);
}

DecayFit fit_decay(std::span<const std::pair<double, double>> series, int gamma) {
    if (series.size() < 20) throw std::invalid_argument("fit_decay: need at least 20 samples");
    double t_lo = series.front().first, t_hi = series.back().first;
    if ((1.0 + t_hi) / (1.0 + t_lo) < 10.0)
        throw std::invalid_argument("fit_decay: need a decade of span in 1+t");
    DecayFit out;
    for (const auto& [t, v] : series)
        out.envelope_constant = std::max(out.envelope_constant, v * std::pow(1.0 + t, 0.25 * gamma));
    // log-log least squares over the tail half
    std::size_t start = series.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = start; i < series.size(); ++i) {
        double v = series[i].second;
        if (v <= 0.0) continue;
        double x = std::log(1.0 + series[i].first);
        double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    out.fitted_exponent = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    return out;
}

std::string ledger_to_json(const Ledger& l) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : l.entries)
        j.push_back({{"name", e.name}, {"pass", e.pass}, {"measured", e.measured}, {"threshold", e.threshold}});
    nlohmann::json root;
    root["checks"] = j;
    root["all_pass"] = l.all_pass();
    return root.dump(2);
}

}  // namespace stratsim
