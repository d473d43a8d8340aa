#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stratsim/harness.hpp"
#include "test_support.hpp"

using namespace stratsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunConfig small_cfg() {
    RunConfig cfg;
    cfg.m = 4;
    cfg.dt = 0.01;
    cfg.t_end = 0.3;
    cfg.epsilon = 1e-2;
    cfg.k_energy = 2;
    cfg.kappa = 4;
    cfg.output_every = 5;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    RunConfig cfg;
    apply_kv(cfg, "m", "12");
    apply_kv(cfg, "dt", "0.25");
    apply_kv(cfg, "mode", "quasilinear");
    CHECK(cfg.m == 12);
    CHECK(cfg.dt == 0.25);
    CHECK(cfg.mode == DynamicsMode::Quasilinear);
    CHECK_THROWS_AS(apply_kv(cfg, "bogus", "1"), std::invalid_argument);
    CHECK_THROWS_AS(mode_from_name("euler"), std::invalid_argument);

    RunConfig bad;
    bad.m = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    RunConfig boot;
    boot.gamma = 4;
    CHECK_THROWS_AS(validate_config(boot, true), std::invalid_argument);
    boot.gamma = 5;
    boot.kappa = 15;
    CHECK_THROWS_AS(validate_config(boot, true), std::invalid_argument);
    boot.kappa = 16;
    validate_config(boot, true);

    // key=value file round trip
    TempDir tmp("stratsim_cfg_test");
    std::ofstream f(tmp.path / "run.cfg");
    f << "# comment\nm = 6\n dt=0.125\nmode = linearized  # trailing\n";
    f.close();
    RunConfig loaded = load_config_file((tmp.path / "run.cfg").string());
    CHECK(loaded.m == 6);
    CHECK(loaded.dt == 0.125);
    CHECK(loaded.mode == DynamicsMode::Linearized);
}

TEST_CASE("generate_initial_data") {
    SUBCASE("epsilon = 0 gives the zero state") {
        RunConfig cfg = small_cfg();
        cfg.epsilon = 0.0;
        StateVector s = generate_initial_data(cfg);
        CHECK(l2_norm_sq(s.rho) + l2_norm_sq(s.u1) + l2_norm_sq(s.u2) == 0.0);
    }
    SUBCASE("total-energy normalization to 1e-10 relative") {
        RunConfig cfg = small_cfg();
        StateVector s = generate_initial_data(cfg);
        Dynamics dyn(cfg.mode, cfg.m);
        double f = total_energy(s, dyn, cfg.kappa);
        CHECK(std::abs(f - cfg.epsilon * cfg.epsilon) <= 1e-10 * cfg.epsilon * cfg.epsilon);
    }
    SUBCASE("fixed seed reproduces the state exactly") {
        RunConfig cfg = small_cfg();
        StateVector a = generate_initial_data(cfg);
        StateVector b = generate_initial_data(cfg);
        CHECK(test::max_coeff_diff(a.rho, b.rho) == 0.0);
        CHECK(test::max_coeff_diff(a.u1, b.u1) == 0.0);
        cfg.seed = 8;
        StateVector c = generate_initial_data(cfg);
        CHECK(test::max_coeff_diff(a.rho, c.rho) > 0.0);
    }
    SUBCASE("generated state passes all invariants; mean column is quadratically small") {
        RunConfig cfg = small_cfg();
        StateVector s = generate_initial_data(cfg);
        CHECK(check_state_invariants(s).empty());
        CHECK(trace_audit(s) < 1e-10);
        auto [mp, bar] = split_mean(s.rho);
        double barn = std::sqrt(l2_norm_sq(bar));
        double tilde = 0.0;
        for (int q = 1; q <= cfg.m; ++q) tilde = std::max(tilde, std::abs(mp.b[q]));
        CHECK(tilde < barn);  // drawn a factor epsilon below the fluctuation
    }
}

TEST_CASE("run: linearized single mode matches the modal propagator") {
    const int m = 4, p = 1, q = 1;
    RunConfig cfg = small_cfg();
    cfg.mode = DynamicsMode::Linearized;
    cfg.t_end = 2.0;
    cfg.dt = 0.005;
    cfg.output_every = 40;

    StateVector init(m);
    init.rho = SpectralScalar::mode(Family::Omega, m, p, q, Complex(0.01, 0.0));
    RunResult res = run_from_state(cfg, init);
    REQUIRE(!res.blew_up);

    auto P = modal_propagator(leray_lambda(p, q), res.final_state.t);
    CHECK(std::abs(res.final_state.rho.at(p, q) - Complex(P[0] * 0.01, 0.0)) < 1e-9);
    CHECK(std::abs(res.final_state.u2.at(p, q) - Complex(P[2] * 0.01, 0.0)) < 1e-9);
}

TEST_CASE("run: t_end = 0 emits the initial report only") {
    RunConfig cfg = small_cfg();
    cfg.t_end = 0.0;
    RunResult res = run(cfg);
    CHECK(res.series.size() == 1);
    CHECK(res.series[0].t == 0.0);
}

TEST_CASE("run: exceeding the blow-up cap halts with a diagnostic") {
    RunConfig cfg = small_cfg();
    cfg.blowup_cap = 1e-12;  // any nonzero state trips it at the first report
    RunResult res = run(cfg);
    CHECK(res.blew_up);
    CHECK(res.blowup_reason.find("cap") != std::string::npos);
    CHECK(res.series.size() <= 2);
}

TEST_CASE("determinism: identical runs produce byte-identical outputs") {
    TempDir tmp("stratsim_det_test");
    RunConfig cfg = small_cfg();
    cfg.checkpoint_every = 10;
    cfg.out_dir = (tmp.path / "a").string();
    RunResult r1 = run(cfg);
    cfg.out_dir = (tmp.path / "b").string();
    RunResult r2 = run(cfg);
    CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
    CHECK(slurp(r1.last_checkpoint) == slurp(r2.last_checkpoint));

    // ... and the parallel kernels do not change the bytes
    kernels::set_parallel(true);
    cfg.out_dir = (tmp.path / "c").string();
    RunResult r3 = run(cfg);
    kernels::set_parallel(false);
    CHECK(slurp(r1.csv_path) == slurp(r3.csv_path));
}

TEST_CASE("checkpoint round trip and bit-exact resume") {
    TempDir tmp("stratsim_resume_test");
    RunConfig cfg = small_cfg();
    cfg.t_end = 0.4;
    cfg.checkpoint_every = 20;  // mid-run checkpoint at step 20, end at 40
    cfg.out_dir = (tmp.path / "full").string();
    RunResult full = run(cfg);
    REQUIRE(!full.blew_up);

    std::string mid_ckpt = cfg.out_dir + "/run_ckpt_20.bin";
    REQUIRE(fs::exists(mid_ckpt));

    // round trip of the checkpoint bytes
    Checkpoint c = read_checkpoint(mid_ckpt);
    CHECK(c.step == 20);
    CHECK(c.cfg.m == cfg.m);
    std::string rewritten = (tmp.path / "rewrite.bin").string();
    write_checkpoint(c, rewritten);
    CHECK(slurp(mid_ckpt) == slurp(rewritten));

    RunResult resumed = resume(mid_ckpt, (tmp.path / "res").string());
    REQUIRE(!resumed.blew_up);

    // the resumed trajectory reproduces the uninterrupted one bit-exactly
    CHECK(test::max_coeff_diff(resumed.final_state.rho, full.final_state.rho) == 0.0);
    CHECK(test::max_coeff_diff(resumed.final_state.u1, full.final_state.u1) == 0.0);
    CHECK(test::max_coeff_diff(resumed.final_state.u2, full.final_state.u2) == 0.0);
    CHECK(resumed.final_state.t == full.final_state.t);
    CHECK(resumed.sup_E_total_kappa1 == full.sup_E_total_kappa1);
    CHECK(resumed.gronwall_integral == full.gronwall_integral);

    // report rows after the checkpoint agree byte-for-byte
    auto data_rows = [](const std::string& csv) {
        std::vector<std::string> rows;
        std::stringstream ss(csv);
        std::string line;
        std::getline(ss, line);  // header
        while (std::getline(ss, line))
            if (!line.empty()) rows.push_back(line);
        return rows;
    };
    auto full_rows = data_rows(slurp(full.csv_path));
    auto res_rows = data_rows(slurp(resumed.csv_path));
    REQUIRE(res_rows.size() <= full_rows.size());
    for (std::size_t i = 0; i < res_rows.size(); ++i)
        CHECK(res_rows[res_rows.size() - 1 - i] == full_rows[full_rows.size() - 1 - i]);

    // final checkpoints are byte-identical
    CHECK(slurp(full.last_checkpoint) == slurp(resumed.last_checkpoint));

    CHECK_THROWS(read_checkpoint((tmp.path / "missing.bin").string()));
}

TEST_CASE("fit_decay on synthetic series") {
    SUBCASE("algebraic decay a/(1+t)^{5/4}") {
        std::vector<std::pair<double, double>> s;
        const double a = 0.7;
        for (int i = 0; i <= 100; ++i) {
            double t = 0.5 * i;
            s.push_back({t, a * std::pow(1.0 + t, -1.25)});
        }
        DecayFit fit = fit_decay(s, 5);
        CHECK(fit.envelope_constant == doctest::Approx(a).epsilon(1e-12));
        CHECK(fit.fitted_exponent == doctest::Approx(-1.25).epsilon(0.01));
    }
    SUBCASE("exponential decay fits steeper than any -gamma/4") {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i <= 100; ++i) {
            double t = 0.5 * i;
            s.push_back({t, std::exp(-t)});
        }
        DecayFit fit = fit_decay(s, 5);
        CHECK(std::isfinite(fit.envelope_constant));
        CHECK(fit.fitted_exponent < -5.0 / 4.0);
    }
    SUBCASE("insufficient span is rejected") {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i < 30; ++i) s.push_back({0.01 * i, 1.0});
        CHECK_THROWS_AS(fit_decay(s, 5), std::invalid_argument);
        std::vector<std::pair<double, double>> s2(10, {0.0, 1.0});
        CHECK_THROWS_AS(fit_decay(s2, 5), std::invalid_argument);
    }
}

TEST_CASE("check_suite") {
    SUBCASE("m = 8 battery passes") {
        RunConfig cfg;
        cfg.m = 8;
        Ledger led = check_suite(cfg);
        for (const auto& e : led.entries) {
            INFO(e.name, " measured ", e.measured, " threshold ", e.threshold);
            CHECK(e.pass);
        }
        std::string js = ledger_to_json(led);
        CHECK(js.find("\"all_pass\": true") != std::string::npos);
    }
    SUBCASE("degenerate m = 1 still runs") {
        RunConfig cfg;
        cfg.m = 1;
        Ledger led = check_suite(cfg);
        CHECK(led.all_pass());
    }
}

TEST_CASE("format_double round trips") {
    for (double v : {0.0, 1.0, -1.5e-300, 3.141592653589793, 1e302, -0.1}) {
        std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}
