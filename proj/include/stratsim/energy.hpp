#pragma once

#include "stratsim/dynamics.hpp"

namespace stratsim {

/// One diagnostic row along a run.  e_k carries no 1/2, E_k does; the two
/// conventions are exposed side by side and never mixed.
struct EnergyReport {
    double t = 0.0;
    double e_k = 0.0;                 // ||u||^2_{Hk} + ||rho||^2_{Hk}
    double E_k = 0.0;                 // (1/2){..., + ||d_t u||^2 + ||u2||^2}
    double Edot_k1 = 0.0;             // weighted top-order energy at k+1
    double E_total_k1 = 0.0;            // E_k + Edot_k1
    double psi1 = 0.0;
    double psi2 = 0.0;
    double weight_min = 0.0;          // min over y of 1 + d_y rho_tilde
    double boundary_trace_max = 0.0;
    double blowup_integrand = 0.0;
    // run-level extras
    double u_h4 = 0.0;
    double rho_bar_h4 = 0.0;
    double rho_tilde_hkappa1 = 0.0;
    double E_total_kappa1 = 0.0;
};

double compute_e_k(const StateVector& s, int k);

/// E_k with d_t u always re-assembled from the RHS, never finite-differenced.
double compute_E_k(const StateVector& s, const Dynamics& dyn, int k);

struct WeightedEnergy {
    double value = 0.0;               // (1/2)(||rho||^2_{Hdot^{k+1}} + weighted integral)
    double weighted_integral = 0.0;   // int |del^{k+1} u|^2 (1 + d_y rho_tilde)
    double rho_seminorm_sq = 0.0;
    double weight_min = 0.0;
    bool weight_flagged = false;      // weight_min <= 0; value still returned
};

WeightedEnergy compute_weighted(const StateVector& s, int k_plus_1);

/// (Psi_1, Psi_2).  When ||d_y rho_tilde||_inf >= 1 the ratio terms are
/// undefined and +inf is returned for both.
std::pair<double, double> compute_psi(const StateVector& s, const Dynamics& dyn, int k);

/// The composite energy E_k + Edot_{k+1}.
double total_energy(const StateVector& s, const Dynamics& dyn, int k);

struct BalanceSample {
    double dE_dt = 0.0;      // central difference along the trajectory
    double rhs = 0.0;        // spectrally assembled right-hand side
    double residual = 0.0;   // |dE_dt - rhs|
};

/// Energy-balance equality for E_k along three consecutive states spaced dt.
/// Holds in every mode (the advection pieces are read off the breakdown).
BalanceSample energy_balance_residual(const StateVector& prev, const StateVector& mid,
                                      const StateVector& next, const Dynamics& dyn, int k);

/// Weighted balance equality for Edot_{k+1}; nonlinear mode only.
BalanceSample weighted_balance_residual(const StateVector& prev, const StateVector& mid,
                                        const StateVector& next, const Dynamics& dyn, int k);

/// The two leading integrals of the mean-gradient coupling split (the
/// commutator route and the transport route); they cancel, so
/// first + second is zero up to round-off.
std::pair<double, double> mean_coupling_leading_terms(const StateVector& s, int k);

EnergyReport make_report(const StateVector& s, const Dynamics& dyn, int k, int kappa);

}  // namespace stratsim
