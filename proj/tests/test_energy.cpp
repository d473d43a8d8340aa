#include <doctest.h>

#include <array>

#include "stratsim/energy.hpp"
#include "test_support.hpp"

using namespace stratsim;

namespace {

// three consecutive states centered a few steps into a run
std::array<StateVector, 3> window(const Dynamics& dyn, StateVector s, double dt, int lead_steps) {
    for (int i = 0; i < lead_steps; ++i) s = dyn.step_rk4(s, dt);
    StateVector mid = dyn.step_rk4(s, dt);
    StateVector next = dyn.step_rk4(mid, dt);
    return {s, mid, next};
}

}  // namespace

TEST_CASE("compute_e_k and compute_E_k") {
    const int m = 4;
    Dynamics dyn(DynamicsMode::Nonlinear, m);

    SUBCASE("zero state") {
        StateVector s(m);
        CHECK(compute_e_k(s, 2) == 0.0);
        CHECK(compute_E_k(s, dyn, 2) == 0.0);
    }
    SUBCASE("pure buoyancy state, derived closed form") {
        const double eps = 0.3;
        StateVector s(m);
        s.rho = SpectralScalar::mode(Family::Omega, m, 1, 1, Complex(eps, 0.0));
        const double lambda = 1.0 / (1.0 + kHalfPi * kHalfPi);
        // d_t u = L(0, rho): per stored mode |.|^2 = (lambda^2 + (pi/2)^2 lambda^2) eps^2
        double per_mode = (lambda * lambda + kHalfPi * kHalfPi * lambda * lambda) * eps * eps;
        double expect = 0.5 * (2.0 * eps * eps + 2.0 * per_mode);
        CHECK(compute_E_k(s, dyn, 0) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(compute_e_k(s, 0) == doctest::Approx(2.0 * eps * eps).epsilon(1e-14));
    }
    SUBCASE("quadratic homogeneity in the linearized system") {
        Dynamics lin(DynamicsMode::Linearized, m);
        StateVector s = test::random_state(m, 71, 0.2);
        double e1 = compute_E_k(s, lin, 3);
        double small = compute_e_k(s, 3);
        s.rho *= 2.0;
        s.u1 *= 2.0;
        s.u2 *= 2.0;
        CHECK(compute_E_k(s, lin, 3) == doctest::Approx(4.0 * e1).epsilon(1e-12));
        CHECK(compute_e_k(s, 3) == doctest::Approx(4.0 * small).epsilon(1e-12));
    }
}

TEST_CASE("compute_weighted") {
    const int m = 5;
    SUBCASE("no mean profile reduces to the unweighted top layer") {
        StateVector s = test::random_state(m, 73, 0.4);
        s.rho = drop_mean(s.rho);
        WeightedEnergy we = compute_weighted(s, 3);
        WeightFunction unit = WeightFunction::from_c_coeffs(std::vector<double>(m + 1, 0.0));
        double plain = weighted_layer_sq(s.u1, unit, 3) + weighted_layer_sq(s.u2, unit, 3);
        CHECK(we.weighted_integral == doctest::Approx(plain).epsilon(1e-13));
        double semi = sobolev_seminorm(s.rho, 3);
        CHECK(we.value == doctest::Approx(0.5 * (semi * semi + plain)).epsilon(1e-13));
        CHECK(we.weight_min == doctest::Approx(1.0).epsilon(1e-10));
        CHECK_FALSE(we.weight_flagged);
    }
    SUBCASE("weighted integral vs dense-grid quadrature") {
        StateVector s = test::random_state(m, 79, 0.5);
        s.rho = drop_mean(s.rho);
        MeanProfile mp(m);
        mp.b[2] = 0.04;  // d_y rho_tilde = 0.04 pi cos(pi y)
        s.rho += lift_mean(mp);
        WeightedEnergy we = compute_weighted(s, 2);

        GridField g = grid_for_truncation(m);
        double quad = 0.0;
        double dx_cell = 2.0 * kPi / g.nx;
        for (int s1 = 0; s1 <= 2; ++s1) {
            int s2 = 2 - s1;
            for (const SpectralScalar* f : {&s.u1, &s.u2}) {
                SpectralScalar d = *f;
                for (int i = 0; i < s1; ++i) d = dx(d);
                for (int i = 0; i < s2; ++i) d = dy(d);
                GridField dg = synthesize(d, g);
                for (int jy = 0; jy < g.ny; ++jy) {
                    double wy = 1.0 + 0.04 * kPi * std::cos(kPi * g.ys[jy]);
                    for (int ix = 0; ix < g.nx; ++ix)
                        quad += binom(2, s1) * dg.at(ix, jy) * dg.at(ix, jy) * wy * g.yw[jy] * dx_cell;
                }
            }
        }
        CHECK(we.weighted_integral == doctest::Approx(quad).epsilon(1e-10));
    }
    SUBCASE("weight violation is flagged but the value is still returned") {
        StateVector s(m);
        MeanProfile mp(m);
        mp.b[1] = 1.0;  // |d_y rho_tilde| peaks above 1
        s.rho = lift_mean(mp);
        s.u2 = drop_mean(SpectralScalar::mode(Family::Omega, m, 1, 1, Complex(0.1, 0.0)));
        WeightedEnergy we = compute_weighted(s, 2);
        CHECK(we.weight_flagged);
        CHECK(we.weight_min < 0.0);
        CHECK(std::isfinite(we.value));
    }
    SUBCASE("positivity and additivity under a positive weight") {
        Dynamics dyn(DynamicsMode::Nonlinear, m);
        StateVector s = test::random_state(m, 83, 0.05);
        WeightedEnergy we = compute_weighted(s, 3);
        CHECK(we.weight_min > 0.0);
        CHECK(we.value >= 0.0);
        EnergyReport r = make_report(s, dyn, 2, 3);
        CHECK(r.E_total_k1 == r.E_k + r.Edot_k1);  // exact by construction
        CHECK(r.e_k <= 2.0 * r.E_total_k1 + 1e-15);
    }
}

TEST_CASE("compute_psi") {
    const int m = 4;
    Dynamics dyn(DynamicsMode::Nonlinear, m);
    SUBCASE("zero state") {
        StateVector s(m);
        auto [p1, p2] = compute_psi(s, dyn, 2);
        CHECK(p1 == 0.0);
        CHECK(p2 == 0.0);
    }
    SUBCASE("u = 0 specialization of Psi_2") {
        StateVector s(m);
        CounterRng rng(89);
        s.rho = test::random_scalar(Family::Omega, m, rng);
        s.rho *= 0.01;
        auto [p1, p2] = compute_psi(s, dyn, 2);
        auto [mp, bar] = split_mean(s.rho);
        (void)bar;
        WeightFunction w = WeightFunction::from_mean_profile(mp);
        double expect = sobolev_norm(s.rho, 3) / (1.0 - w.sup_abs_g());
        CHECK(p2 == doctest::Approx(expect).epsilon(1e-10));
        CHECK(p1 == doctest::Approx(sobolev_norm(s.rho, 3)).epsilon(1e-10));
    }
    SUBCASE("division guard at saturated weight") {
        StateVector s(m);
        MeanProfile mp(m);
        mp.b[1] = 1.0;
        s.rho = lift_mean(mp);
        auto [p1, p2] = compute_psi(s, dyn, 2);
        CHECK(std::isinf(p1));
        CHECK(std::isinf(p2));
    }
    SUBCASE("linear smallness sweep: Psi <= C eps") {
        auto psi_at = [&](double amp, std::uint64_t seed) {
            StateVector s = test::random_state(m, seed, amp, 2.0);
            auto [p1, p2] = compute_psi(s, dyn, 2);
            return std::max(p1, p2);
        };
        double c_fit = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) c_fit = std::max(c_fit, psi_at(1e-2, seed) / 1e-2);
        for (std::uint64_t seed = 11; seed <= 20; ++seed)
            CHECK(psi_at(1e-3, seed) <= 2.0 * c_fit * 1e-3);
    }
}

TEST_CASE("energy balance identity for E_k") {
    const int m = 5;
    const int k = 3;

    SUBCASE("zero trajectory") {
        Dynamics dyn(DynamicsMode::Nonlinear, m);
        StateVector s(m);
        auto w = window(dyn, s, 1e-3, 3);
        BalanceSample b = energy_balance_residual(w[0], w[1], w[2], dyn, k);
        CHECK(b.residual == 0.0);
    }
    SUBCASE("linearized run: tiny residual (cubic terms vanish)") {
        Dynamics dyn(DynamicsMode::Linearized, m);
        StateVector s0 = test::random_state(m, 97, 1e-4, 2.0);
        auto w = window(dyn, s0, 1e-3, 5);
        BalanceSample b = energy_balance_residual(w[0], w[1], w[2], dyn, k);
        CHECK(b.residual < 1e-8);
    }
    SUBCASE("nonlinear run: residual is small and scales as dt^2") {
        Dynamics dyn(DynamicsMode::Nonlinear, m);
        StateVector s0 = test::random_state(m, 103, 4e-4, 2.0);
        auto res_at = [&](double dt) {
            auto w = window(dyn, s0, dt, 4);
            return energy_balance_residual(w[0], w[1], w[2], dyn, k).residual;
        };
        double r1 = res_at(2e-3);
        double r2 = res_at(1e-3);
        CHECK(r2 < 1e-7);  // the dt = 1e-3 regime
        CHECK(r1 / r2 > 3.0);
        CHECK(r1 / r2 < 5.5);
    }
    SUBCASE("quasilinear run satisfies the same identity") {
        MeanProfile mp(m);
        mp.b[2] = 1e-3;
        Dynamics dyn(DynamicsMode::Quasilinear, m, WeightFunction::from_mean_profile(mp));
        StateVector s0 = test::random_state(m, 107, 1e-4, 2.0);
        auto w = window(dyn, s0, 1e-3, 4);
        BalanceSample b = energy_balance_residual(w[0], w[1], w[2], dyn, k);
        CHECK(b.residual < 1e-8);
    }
}

TEST_CASE("weighted balance identity for Edot_{k+1}") {
    const int m = 5;
    const int k = 3;
    Dynamics dyn(DynamicsMode::Nonlinear, m);
    StateVector s0 = test::random_state(m, 109, 1.5e-4, 2.0);
    // give the state a real mean profile so the weight terms are active
    MeanProfile mp(m);
    mp.b[1] = 0.002;
    mp.b[2] = -0.001;
    s0.rho += lift_mean(mp);

    auto res_at = [&](double dt) {
        auto w = window(dyn, s0, dt, 4);
        return weighted_balance_residual(w[0], w[1], w[2], dyn, k);
    };
    BalanceSample b1 = res_at(2e-3);
    BalanceSample b2 = res_at(1e-3);
    CHECK(b2.residual < 1e-7);  // the dt = 1e-3 regime
    CHECK(b1.residual / b2.residual > 3.0);
    CHECK(b1.residual / b2.residual < 5.5);

    Dynamics lin(DynamicsMode::Linearized, m);
    auto w = window(dyn, s0, 1e-3, 1);
    CHECK_THROWS_AS(weighted_balance_residual(w[0], w[1], w[2], lin, k), std::invalid_argument);
}

TEST_CASE("I6 leading terms cancel") {
    const int m = 6;
    StateVector s = test::random_state(m, 113, 0.5);
    MeanProfile mp(m);
    mp.b[1] = 0.05;
    mp.b[3] = 0.02;
    s.rho += lift_mean(mp);
    for (int k : {2, 3}) {
        auto [first, second] = mean_coupling_leading_terms(s, k);
        CHECK(std::abs(first) > 0.0);  // non-trivial assembly
        CHECK(std::abs(first + second) <= 1e-12 * std::max(1.0, std::abs(first)));
    }
}

TEST_CASE("report fields are consistent") {
    const int m = 4;
    Dynamics dyn(DynamicsMode::Nonlinear, m);
    StateVector s = test::random_state(m, 127, 0.05);
    EnergyReport r = make_report(s, dyn, 2, 3);
    CHECK(r.t == s.t);
    CHECK(r.e_k == doctest::Approx(compute_e_k(s, 2)).epsilon(1e-15));
    CHECK(r.E_total_k1 == r.E_k + r.Edot_k1);
    CHECK(r.boundary_trace_max < 1e-12);
    CHECK(r.u_h4 == doctest::Approx(std::sqrt(hk_norm_sq_velocity(s.velocity(), 4))).epsilon(1e-15));
    CHECK(r.weight_min > 0.0);
}
