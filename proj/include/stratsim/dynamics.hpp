#pragma once

#include <stdexcept>
#include <string>

#include "stratsim/spectral_ops.hpp"

namespace stratsim {

enum class DynamicsMode { Nonlinear, Linearized, Quasilinear };

/// Galerkin unknowns at truncation m: density perturbation and velocity
/// coefficients, all reality-constrained, div u = 0, u2 without p = 0
/// content.  Time is in units of the damping time.
struct StateVector {
    SpectralScalar rho;  // Omega
    SpectralScalar u1;   // Varpi
    SpectralScalar u2;   // Omega
    double t = 0.0;

    StateVector() = default;
    explicit StateVector(int m)
        : rho(Family::Omega, m), u1(Family::Varpi, m), u2(Family::Omega, m) {}

    int m() const { return rho.m(); }

    VelocityField velocity() const {
        VelocityField v(m());
        v.u1 = u1;
        v.u2 = u2;
        return v;
    }

    StateVector& operator+=(const StateVector& o) {
        rho += o.rho;
        u1 += o.u1;
        u2 += o.u2;
        return *this;
    }
    StateVector& operator*=(double a) {
        rho *= a;
        u1 *= a;
        u2 *= a;
        return *this;
    }
    void axpy(double a, const StateVector& o) {
        rho.axpy(a, o.rho);
        u1.axpy(a, o.u1);
        u2.axpy(a, o.u2);
    }
};

/// The RHS split into its named pieces; summing them in field order
/// (damping, buoyancy, advection_rho, advection_u, forcing_rho) reproduces
/// `total` exactly.
struct RhsBreakdown {
    StateVector linear_damping;
    StateVector buoyancy_leray;
    StateVector advection_rho;
    StateVector advection_u;
    StateVector forcing_rho;
    StateVector total;
};

struct StateViolation {
    std::string invariant;
    double magnitude;
};

std::vector<StateViolation> check_state_invariants(const StateVector& s, double tol = 1e-12);

class BlowupError : public std::runtime_error {
  public:
    BlowupError(double t, const std::string& what) : std::runtime_error(what), t_blowup(t) {}
    double t_blowup;
};

/// Exact coefficients of (v . grad) f followed by projection to truncation
/// m, assembled band-by-band with the graded trig kernels.
SpectralScalar advect(const VelocityField& v, const SpectralScalar& f);

/// Straightforward dense-slice implementation, kept as the reference the
/// optimized kernel is tested against.
SpectralScalar advect_reference(const VelocityField& v, const SpectralScalar& f);

/// RHS evaluator and RK4 stepper for one mode of the system.
class Dynamics {
  public:
    explicit Dynamics(DynamicsMode mode, int m);
    Dynamics(DynamicsMode mode, int m, WeightFunction weight);

    DynamicsMode mode() const { return mode_; }
    int m() const { return m_; }
    const WeightFunction& weight() const { return weight_; }

    StateVector rhs(const StateVector& s) const;
    RhsBreakdown rhs_breakdown(const StateVector& s) const;

    /// Classical fixed-step RK4.  Throws BlowupError on non-finite output.
    StateVector step_rk4(const StateVector& s, double dt) const;

    /// Step-doubling error monitor: one full step against two half steps.
    /// Returns the two-half-step state and the Richardson estimate of its
    /// local error (coefficient max-norm of the difference / 15).
    std::pair<StateVector, double> step_rk4_doubled(const StateVector& s, double dt) const;

    /// Projected advection pair (Q_m, P_m)[(u . grad) u] before Leray.
    VelocityField advection_pair(const StateVector& s) const;

    static double default_dt(int m) { return 0.1 / (1.0 + m); }

  private:
    void velocity_rhs(const StateVector& s, SpectralScalar& du1, SpectralScalar& du2,
                      VelocityField* adv_out) const;
    void rho_rhs(const StateVector& s, SpectralScalar& drho, SpectralScalar* adv_out) const;

    DynamicsMode mode_;
    int m_;
    WeightFunction weight_;  // quasilinear G; unused otherwise
};

/// Pressure of the projected system, Pi = Pi_L + Pi_NL with
/// Pi_L = -(-Delta)^{-1} d_y rho_bar and Pi_NL = (-Delta)^{-1} div of the
/// projected advection (zero in the linearized/quasilinear modes).
SpectralScalar reconstruct_pressure(const StateVector& s, DynamicsMode mode = DynamicsMode::Nonlinear);

/// sup |grad u| + sup |grad rho| on a 4x-refined diagnostic grid with a
/// parabolic polish at the discrete argmax.
double blowup_integrand(const StateVector& s);

/// Largest wall trace among rho, u2, their second y-derivatives and
/// d_y u1, maximized over x at y = +-1.
double trace_audit(const StateVector& s);

}  // namespace stratsim
