#pragma once

#include <array>
#include <span>
#include <utility>

#include "stratsim/dynamics.hpp"

namespace stratsim {

/// Per-mode generator of the linearized (rho_hat, u2_hat) pair:
/// d/dt (rho_hat, u2_hat) = [[0, -1], [lambda, -1]] (rho_hat, u2_hat)
/// with lambda = p^2/kappa^2 in [0,1].
struct ModalLinearSystem {
    double lambda = 0.0;

    std::array<double, 4> matrix() const { return {0.0, -1.0, lambda, -1.0}; }
    /// mu_pm = (-1 +- sqrt(1-4 lambda))/2; complex pair for lambda > 1/4.
    double discriminant() const { return 1.0 - 4.0 * lambda; }
};

inline double leray_lambda(int p, int q) { return double(p) * p / kappa_sq(p, q); }

/// exp(t [[0,-1],[lambda,-1]]), row-major.  The defective point lambda=1/4
/// and its neighborhood go through the entire series in the discriminant, so
/// the formula is smooth across the double eigenvalue.
std::array<double, 4> modal_propagator(double lambda, double t);

/// phi = d_t psi_L + psi_L solving Delta phi = d_x rho_bar with phi = 0 on
/// the walls: phi_hat = -ip/(p^2+(q pi/2)^2) rho_hat.  Rejects p = 0 input.
SpectralScalar solve_stream_poisson(const SpectralScalar& rho_bar);

/// ||d_t u + u||^2_{L2} on linearized states: sum p^2/kappa^2 |F_w[rho_bar]|^2.
double damping_identity_sum(const SpectralScalar& rho_bar);

struct LowerBoundSample {
    double lhs;
    double rhs;
};

/// Lower bound pair: lhs = sum p^2/kappa^2 |F|^2,
/// rhs = ||rho_bar||^2_{L2}/N - ||rho_bar||^2_{H^alpha}/N^{1+alpha}.
LowerBoundSample damping_lower_bound(const SpectralScalar& rho_bar, double N, int alpha);

/// RHS of the quasilinear system: d_t rho_bar = -P_m[(1+G) u2], momentum as
/// in the linearized system.  Sets *weight_warning when the weight violates
/// the smallness hypothesis (the decay guarantees are then void).
StateVector quasilinear_rhs(const StateVector& s, const WeightFunction& w,
                            bool* weight_warning = nullptr);

/// The quantity that is non-increasing along quasilinear trajectories:
/// ||u||^2_{Hk_w} + ||rho_bar||^2_{Hk} + ||d_t u||^2_{Hk} + ||u2||^2_{Hk_w}.
double quasilinear_monitor(const StateVector& s, const Dynamics& dyn, const WeightFunction& w, int k);

/// Weighted Sobolev square sum_j C(k,j) int |del^j f|^2 w dx dy (the
/// w-weighted version of the diagonal H^k convention).
double weighted_hk_sq(const SpectralScalar& f, const WeightFunction& w, int k);

/// sup_t E_k(t) (1+t)^{alpha/2} / E_init_alpha over a (t, E_k) series.
/// Rejects series with fewer than 20 samples.
double decay_envelope_check(std::span<const std::pair<double, double>> series, double E_init_alpha,
                            int alpha);

/// max over t_grid of (1+t)^{alpha/2} int_0^t e^{-2(sqrt(1+t)-sqrt(1+s))}
/// (1+s)^{-(1+alpha)/2} ds.
double calculus_lemma_check(int alpha, std::span<const double> t_grid);

/// max over t_grid of (1+t)^{min(delta,1+q)} int_0^t (1+(t-s))^{-delta}
/// (1+s)^{-(1+q)} ds.
double basic_lemma_check(double delta, double q, std::span<const double> t_grid);

}  // namespace stratsim
