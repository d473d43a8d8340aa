#include "stratsim/linear_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "stratsim/quadrature.hpp"
#include "stratsim/summation.hpp"

namespace stratsim {

std::array<double, 4> modal_propagator(double lambda, double t) {
    if (t < 0.0) throw std::invalid_argument("modal_propagator: t must be nonnegative");
    // exp(tA) = e^{-t/2} [ ch(t) I + sh(t) (A + I/2) ] with
    // ch = cosh(sqrt(D) t/2), sh = sinh(sqrt(D) t/2)/(sqrt(D)/2), D = 1-4 lambda.
    // Both are entire functions of z = D (t/2)^2; near z = 0 we sum the series.
    const double D = 1.0 - 4.0 * lambda;
    const double h = 0.5 * t;
    const double z = D * h * h;
    double ch, sh;
    if (std::abs(z) < 1e-4) {
        double term = 1.0, cs = 1.0, ss = 1.0;
        for (int n = 1; n <= 8; ++n) {
            term *= z;
            cs += term / std::tgamma(2.0 * n + 1.0);
            ss += term / std::tgamma(2.0 * n + 2.0);
        }
        ch = cs;
        sh = t * ss;
    } else if (z > 0.0) {
        double r = std::sqrt(z);
        ch = std::cosh(r);
        sh = t * std::sinh(r) / r;
    } else {
        double r = std::sqrt(-z);
        ch = std::cos(r);
        sh = t * std::sin(r) / r;
    }
    const double e = std::exp(-h);
    // A + I/2 = [[1/2, -1], [lambda, -1/2]]
    return {e * (ch + 0.5 * sh), e * (-sh), e * (lambda * sh), e * (ch - 0.5 * sh)};
}

SpectralScalar solve_stream_poisson(const SpectralScalar& rho_bar) {
    if (rho_bar.family() != Family::Omega)
        throw std::invalid_argument("solve_stream_poisson: Omega-family input expected");
    for (int q = 1; q <= rho_bar.m(); ++q)
        if (std::abs(rho_bar.at(0, q)) != 0.0)
            throw std::invalid_argument("solve_stream_poisson: input must have no p = 0 content");
    SpectralScalar phi(Family::Omega, rho_bar.m());
    for (int p = -rho_bar.m(); p <= rho_bar.m(); ++p) {
        if (p == 0) continue;
        for (int q = 1; q <= rho_bar.m(); ++q)
            phi.at(p, q) = Complex(0.0, -double(p) / kappa_sq(p, q)) * rho_bar.at(p, q);
    }
    return phi;
}

double damping_identity_sum(const SpectralScalar& rho_bar) {
    KahanSum s;
    for (int p = -rho_bar.m(); p <= rho_bar.m(); ++p) {
        if (p == 0) continue;
        for (int q = 1; q <= rho_bar.m(); ++q)
            s.add(leray_lambda(p, q) * std::norm(rho_bar.at(p, q)));
    }
    return s.value();
}

LowerBoundSample damping_lower_bound(const SpectralScalar& rho_bar, double N, int alpha) {
    if (!(N > 0.0) || alpha < 1) throw std::invalid_argument("damping_lower_bound: need N > 0, alpha >= 1");
    double l2 = l2_norm_sq(rho_bar);
    double ha = sobolev_norm(rho_bar, alpha);
    return {damping_identity_sum(rho_bar), l2 / N - ha * ha / std::pow(N, 1.0 + alpha)};
}

StateVector quasilinear_rhs(const StateVector& s, const WeightFunction& w, bool* weight_warning) {
    if (weight_warning) *weight_warning = !w.within_bound(0.05, 1) || w.weight_min() <= 0.0;
    Dynamics dyn(DynamicsMode::Quasilinear, s.m(), w);
    return dyn.rhs(s);
}

double weighted_hk_sq(const SpectralScalar& f, const WeightFunction& w, int k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += binom(k, j) * weighted_layer_sq(f, w, j);
    return acc;
}

double quasilinear_monitor(const StateVector& s, const Dynamics& dyn, const WeightFunction& w, int k) {
    StateVector dudt = dyn.rhs(s);
    SpectralScalar rho_bar = drop_mean(s.rho);
    const double rb = sobolev_norm(rho_bar, k);
    const double dt1 = sobolev_norm(dudt.u1, k);
    const double dt2 = sobolev_norm(dudt.u2, k);
    const double u_w = weighted_hk_sq(s.u1, w, k) + weighted_hk_sq(s.u2, w, k);
    const double u2_w = weighted_hk_sq(s.u2, w, k);
    return u_w + rb * rb + (dt1 * dt1 + dt2 * dt2) + u2_w;
}

double decay_envelope_check(std::span<const std::pair<double, double>> series, double E_init_alpha,
                            int alpha) {
    if (series.size() < 20) throw std::invalid_argument("decay_envelope_check: need at least 20 samples");
    if (!(E_init_alpha > 0.0)) return 0.0;
    double sup = 0.0;
    for (const auto& [t, e] : series) sup = std::max(sup, e * std::pow(1.0 + t, 0.5 * alpha) / E_init_alpha);
    return sup;
}

double calculus_lemma_check(int alpha, std::span<const double> t_grid) {
    if (alpha < 1) throw std::invalid_argument("calculus_lemma_check: alpha >= 1");
    double worst = 0.0;
    for (double t : t_grid) {
        const double st = std::sqrt(1.0 + t);
        // substitute s = sigma^2 - 1: integral = 2 int_1^{sqrt(1+t)}
        // e^{-2(sqrt(1+t)-sigma)} sigma^{-alpha} d sigma
        auto f = [&](double sig) { return 2.0 * std::exp(-2.0 * (st - sig)) * std::pow(sig, -double(alpha)); };
        double val = integrate_adaptive(f, 1.0, st, 1e-10);
        worst = std::max(worst, val * std::pow(1.0 + t, 0.5 * alpha));
    }
    return worst;
}

double basic_lemma_check(double delta, double q, std::span<const double> t_grid) {
    if (!(delta > 0.0) || !(q > 0.0)) throw std::invalid_argument("basic_lemma_check: delta, q > 0");
    double worst = 0.0;
    for (double t : t_grid) {
        auto f = [&](double s) {
            return std::pow(1.0 + (t - s), -delta) * std::pow(1.0 + s, -(1.0 + q));
        };
        double val = integrate_adaptive(f, 0.0, t, 1e-10);
        worst = std::max(worst, val * std::pow(1.0 + t, std::min(delta, 1.0 + q)));
    }
    return worst;
}

}  // namespace stratsim
