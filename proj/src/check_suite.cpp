#include <cmath>

#include "stratsim/grid.hpp"
#include "stratsim/harness.hpp"
#include "stratsim/prng.hpp"
#include "stratsim/quadrature.hpp"

namespace stratsim {

namespace {

SpectralScalar random_scalar(Family fam, int m, CounterRng& rng, double slope = 1.0) {
    SpectralScalar f(fam, m);
    for (int p = 0; p <= m; ++p)
        for (int q = f.q_lo(); q <= m; ++q) {
            double mag = std::pow(1.0 + kappa_sq(p, q), -0.5 * slope);
            if (p == 0)
                f.at(0, q) = Complex(mag * rng.sign(), 0.0);
            else
                f.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
        }
    f.mirror_from_nonnegative();
    return f;
}

VelocityField random_divfree_velocity(int m, CounterRng& rng, double slope = 1.0) {
    SpectralScalar psi = random_scalar(Family::Omega, m, rng, slope);
    VelocityField v(m);
    v.u1 = dy(psi);
    v.u1 *= -1.0;
    v.u2 = dx(psi);
    return v;
}

double field_max_diff(const SpectralScalar& a, const SpectralScalar& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
    return worst;
}

double gram_deviation(Family fam, int m) {
    // Block-diagonal in p by the analytic x-integral; the y-blocks go
    // through the slice pipeline where genuine cancellations happen.
    double worst = 0.0;
    for (int q = q_min(fam); q <= m; ++q)
        for (int r = q_min(fam); r <= m; ++r) {
            Complex ip = integrate_slice(multiply_slices(basis_slice(fam, q), basis_slice(fam, r)));
            double expect = (q == r) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(ip - expect));
        }
    return worst;
}

}  // namespace

Ledger check_suite(const RunConfig& cfg) {
    Ledger led;
    const int m = cfg.m;
    CounterRng rng(cfg.seed ^ 0xC0FFEEull);
    auto add = [&](const std::string& name, double measured, double threshold) {
        led.entries.push_back({name, measured <= threshold, measured, threshold});
    };

    add("gram_omega", gram_deviation(Family::Omega, m), 1e-12);
    add("gram_varpi", gram_deviation(Family::Varpi, m), 1e-12);

    {
        // boundary encoding: omega vanishes at the walls, varpi has zero
        // normal derivative (checked by central differences at 1e-6)
        double worst_val = 0.0, worst_der = 0.0;
        for (int q = 1; q <= m; ++q)
            for (double yw : {-1.0, 1.0}) {
                worst_val = std::max(worst_val, std::abs(eval_b(q, yw)));
                double d = (eval_c(q, yw) - eval_c(q, yw - std::copysign(1e-6, yw))) / std::copysign(1e-6, yw);
                worst_der = std::max(worst_der, std::abs(d));
            }
        add("boundary_dirichlet_omega", worst_val, 1e-12);
        add("boundary_neumann_varpi", worst_der, 1e-4);
    }

    {
        // derivative maps on 101 sample points
        double worst = 0.0;
        for (int q = 1; q <= m; ++q)
            for (int i = 0; i <= 100; ++i) {
                double y = -1.0 + 0.02 * i;
                double h = 1e-6;
                double db = (eval_b(q, std::min(y + h, 1.0)) - eval_b(q, std::max(y - h, -1.0))) /
                            (std::min(y + h, 1.0) - std::max(y - h, -1.0));
                worst = std::max(worst, std::abs(db - dyb_factor(q) * eval_c(q, y)) / (1.0 + q_freq(q)));
            }
        add("derivative_map_fd", worst, 1e-4);
    }

    {
        // exact derivative identities, sampled: d/dy b_q = (-1)^q (q pi/2) c_q
        double worst = 0.0;
        for (int q = 1; q <= m; ++q)
            for (int i = 0; i <= 100; ++i) {
                double y = -1.0 + 0.02 * i;
                double lhs = (q % 2 == 1) ? -q_freq(q) * std::sin(q_freq(q) * y)
                                          : q_freq(q) * std::cos(q_freq(q) * y);
                worst = std::max(worst, std::abs(lhs - dyb_factor(q) * eval_c(q, y)));
            }
        add("derivative_map_exact", worst, 1e-10);
    }

    {
        // slice algebra: commutativity and bilinearity on random slices
        RawTrigSlice a(m), b(m), c(m);
        for (int k = 0; k <= m; ++k) {
            a.gamma[k] = rng.uniform(-1, 1);
            b.gamma[k] = rng.uniform(-1, 1);
            c.gamma[k] = rng.uniform(-1, 1);
            if (k >= 1) {
                a.sigma[k] = rng.uniform(-1, 1);
                b.sigma[k] = rng.uniform(-1, 1);
                c.sigma[k] = rng.uniform(-1, 1);
            }
        }
        RawTrigSlice ab = multiply_slices(a, b);
        RawTrigSlice ba = multiply_slices(b, a);
        double worst = 0.0;
        for (int k = 0; k <= ab.K; ++k)
            worst = std::max({worst, std::abs(ab.gamma[k] - ba.gamma[k]), std::abs(ab.sigma[k] - ba.sigma[k])});
        RawTrigSlice bc = b;
        add_scaled(bc, c, 2.0);
        RawTrigSlice lhs = multiply_slices(a, bc);
        RawTrigSlice rhs = multiply_slices(a, b);
        add_scaled(rhs, multiply_slices(a, c), 2.0);
        for (int k = 0; k <= lhs.K; ++k)
            worst = std::max({worst, std::abs(lhs.gamma[k] - rhs.gamma[k]), std::abs(lhs.sigma[k] - rhs.sigma[k])});
        add("slice_algebra", worst, 1e-13);
    }

    {
        SpectralScalar f = random_scalar(Family::Omega, m, rng);
        GridField g = grid_for_truncation(m);
        SpectralScalar back = analyze(synthesize(f, g), Family::Omega, m);
        add("analyze_synthesize_roundtrip", field_max_diff(f, back), 1e-12);
    }

    {
        // projector-derivative commutation and self-adjointness
        SpectralScalar f = random_scalar(Family::Omega, m, rng);
        int mt = std::max(1, m - 1);
        add("project_dx_commute", field_max_diff(project(dx(f), mt), dx(project(f, mt))), 1e-14);
        add("project_dy_commute", field_max_diff(project(dy(f), mt), dy(project(f, mt))), 1e-14);
        SpectralScalar g = random_scalar(Family::Omega, m, rng);
        double sa = std::abs(l2_inner(project(f, mt), g) - l2_inner(f, project(g, mt)));
        add("project_selfadjoint", sa, 1e-12);
    }

    {
        CounterRng r2(cfg.seed ^ 0xDEADull);
        VelocityField v(m);
        v.u1 = random_scalar(Family::Varpi, m, r2);
        v.u2 = drop_mean(random_scalar(Family::Omega, m, r2));
        VelocityField lv = leray(v);
        add("leray_divfree", std::sqrt(l2_norm_sq(divergence(lv))), 1e-12);
        VelocityField llv = leray(lv);
        add("leray_idempotent",
            std::max(field_max_diff(lv.u1, llv.u1), field_max_diff(lv.u2, llv.u2)), 1e-12);
        int mt = std::max(1, m - 1);
        VelocityField pv(m);
        pv.u1 = project(v.u1, mt);
        pv.u2 = project(v.u2, mt);
        VelocityField lpv = leray(pv);
        VelocityField plv(m);
        plv.u1 = project(lv.u1, mt);
        plv.u2 = project(lv.u2, mt);
        add("leray_project_commute",
            std::max(field_max_diff(lpv.u1, plv.u1), field_max_diff(lpv.u2, plv.u2)), 1e-12);
    }

    {
        // Poincare on the torus for zero-x-average fields
        SpectralScalar f = drop_mean(random_scalar(Family::Omega, m, rng));
        double margin = std::sqrt(l2_norm_sq(dx(f))) - std::sqrt(l2_norm_sq(f));
        add("poincare_zero_average", std::max(0.0, -margin), 1e-12);
    }

    {
        // pressure-gradient bound on a random state
        StateVector s(m);
        s.rho = random_scalar(Family::Omega, m, rng);
        VelocityField v = random_divfree_velocity(m, rng);
        s.u1 = v.u1;
        s.u2 = v.u2;
        SpectralScalar pi = reconstruct_pressure(s);
        auto [mp, rho_bar] = split_mean(s.rho);
        (void)mp;
        double worst = 0.0;
        for (int n = 0; n <= 2; ++n) {
            SpectralScalar gx = dx(pi);
            SpectralScalar gy = dy(pi);
            gy -= rho_bar;
            double lhs = sobolev_norm(rho_bar, n);
            double a = sobolev_norm(gx, n + 1), b = sobolev_norm(gy, n + 1);
            double rhs = std::sqrt(a * a + b * b);
            worst = std::max(worst, lhs - rhs);
        }
        add("pressure_gradient_bound", std::max(0.0, worst), 1e-12);

        // u2 keeps zero horizontal average under the RHS
        Dynamics dyn(DynamicsMode::Nonlinear, m);
        StateVector dudt = dyn.rhs(s);
        double mean_u2 = 0.0;
        for (int q = 1; q <= m; ++q) mean_u2 = std::max(mean_u2, std::abs(dudt.u2.at(0, q)));
        add("u2_mean_preserved", mean_u2, 1e-14);

        // orthogonal mean/fluctuation split of the L2 norm
        double full = l2_norm_sq(s.rho);
        double bar = l2_norm_sq(rho_bar);
        double tilde = 0.0;
        for (int q = 1; q <= m; ++q) tilde += std::norm(s.rho.at(0, q));
        add("orthogonal_split", std::abs(full - bar - tilde) / std::max(1.0, full), 1e-14);
    }

    {
        // damping identity on a linearized state
        SpectralScalar rho_bar = drop_mean(random_scalar(Family::Omega, m, rng));
        StateVector s(m);
        s.rho = rho_bar;
        Dynamics lin(DynamicsMode::Linearized, m);
        StateVector dudt = lin.rhs(s);
        SpectralScalar a1 = dudt.u1;
        a1 += s.u1;
        SpectralScalar a2 = dudt.u2;
        a2 += s.u2;
        double lhs = l2_norm_sq(a1) + l2_norm_sq(a2);
        double rhs = damping_identity_sum(rho_bar);
        add("damping_identity", std::abs(lhs - rhs) / std::max(1.0, rhs), 1e-12);
    }

    {
        // modal propagator semigroup
        double worst = 0.0;
        for (double lambda : {0.0, 0.1, 0.25, 0.5, 1.0}) {
            auto ab = modal_propagator(lambda, 0.7);
            auto cd = modal_propagator(lambda, 0.3);
            auto full = modal_propagator(lambda, 1.0);
            std::array<double, 4> prod{ab[0] * cd[0] + ab[1] * cd[2], ab[0] * cd[1] + ab[1] * cd[3],
                                       ab[2] * cd[0] + ab[3] * cd[2], ab[2] * cd[1] + ab[3] * cd[3]};
            for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(prod[i] - full[i]));
        }
        add("propagator_semigroup", worst, 1e-12);
    }

    {
        // exact advection vs. the dense reference and the grid oracle
        CounterRng r3(cfg.seed ^ 0xFACEull);
        VelocityField v = random_divfree_velocity(m, r3);
        SpectralScalar f = random_scalar(Family::Omega, m, r3);
        SpectralScalar fast = advect(v, f);
        SpectralScalar ref = advect_reference(v, f);
        add("advect_fast_vs_reference", field_max_diff(fast, ref), 1e-12);

        GridField g = grid_for_truncation(m);
        GridField gu1 = synthesize(v.u1, g);
        GridField gu2 = synthesize(v.u2, g);
        GridField gfx = synthesize(dx(f), g);
        GridField gfy = synthesize(dy(f), g);
        GridField prod = g;
        for (std::size_t i = 0; i < prod.v.size(); ++i)
            prod.v[i] = gu1.v[i] * gfx.v[i] + gu2.v[i] * gfy.v[i];
        SpectralScalar oracle = analyze(prod, Family::Omega, m);
        add("advect_vs_grid_oracle", field_max_diff(fast, oracle), 1e-10);
    }

    {
        // reality-constraint validator flags corrupted states
        StateVector s(m);
        s.rho = random_scalar(Family::Omega, m, rng);
        bool clean = check_state_invariants(s).empty();
        s.rho.at(-std::min(1, m), 1) += Complex(0.0, 0.5);
        bool flagged = false;
        for (const auto& viol : check_state_invariants(s))
            if (viol.invariant == "reality") flagged = true;
        add("reality_validator", (clean && flagged) ? 0.0 : 1.0, 0.5);
    }

    return led;
}

}  // namespace stratsim
