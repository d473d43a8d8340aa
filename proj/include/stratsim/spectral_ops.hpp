#pragma once

#include "stratsim/kernels.hpp"
#include "stratsim/slices.hpp"

namespace stratsim {

/// d/dx: coefficient-wise multiplication by ip; family unchanged.
SpectralScalar dx(const SpectralScalar& f);

/// d/dy: family flips.  Omega -> Varpi with factor (-1)^q (q pi/2),
/// Varpi -> Omega with factor (-1)^{q+1} (q pi/2); q = 0 maps to zero.
SpectralScalar dy(const SpectralScalar& f);

/// Truncation projector onto |p| <= m_t, q <= m_t (storage truncation kept).
SpectralScalar project(const SpectralScalar& f, int m_t);

/// (-Delta)^{-1}: divide by kappa^2 = p^2 + (q pi/2)^2; the Varpi (0,0)
/// kernel mode maps to zero by convention.
SpectralScalar inv_neg_laplacian(const SpectralScalar& f);

struct VelocityField {
    SpectralScalar u1;  // Varpi family
    SpectralScalar u2;  // Omega family

    VelocityField() = default;
    explicit VelocityField(int m) : u1(Family::Varpi, m), u2(Family::Omega, m) {}
    int m() const { return u1.m(); }
};

/// div v = d_x u1 + d_y u2, a Varpi-family scalar.
SpectralScalar divergence(const VelocityField& v);

/// Leray projection v + grad (-Delta)^{-1} div v, mode-wise.  The (0,0)
/// mean-flow mode is already divergence-free and passes through unchanged.
VelocityField leray(const VelocityField& v);

/// Horizontal-mean profile: rho_tilde(y) = sum_q b[q] b_q(y), real.
struct MeanProfile {
    int m = 0;
    std::vector<double> b;  // index q = 1..m; b[0] unused

    MeanProfile() = default;
    explicit MeanProfile(int m_) : m(m_), b(std::size_t(m_) + 1, 0.0) {}
};

/// Split f = bar(f) + tilde(f): the p = 0 column (rescaled by a_0 so the
/// profile is the true x-average) and the zero-x-average remainder.
std::pair<MeanProfile, SpectralScalar> split_mean(const SpectralScalar& f);

/// Embed a mean profile back as the p = 0 column of an Omega field.
SpectralScalar lift_mean(const MeanProfile& mp);

/// Remove the p = 0 column.
SpectralScalar drop_mean(const SpectralScalar& f);

/// L2(Omega) inner product from coefficients, Re sum F_f conj(F_g).
double l2_inner(const SpectralScalar& f, const SpectralScalar& g);

/// H^k inner product with the spectrally diagonal (1+kappa^2)^k weights.
double hk_inner(const SpectralScalar& f, const SpectralScalar& g, int k);

double l2_norm_sq(const SpectralScalar& f);

/// ||f||_{H^k} = (sum (1+kappa^2)^k |F|^2)^{1/2}.  This diagonal convention
/// equals sum_j C(k,j) ||del^j f||^2 with the full multinomial collection of
/// order-j derivatives, so all identities tested here are layer sums.
double sobolev_norm(const SpectralScalar& f, int k);

/// Homogeneous seminorm: (sum kappa^{2k} |F|^2)^{1/2}.
double sobolev_seminorm(const SpectralScalar& f, int k);

double hk_norm_sq_velocity(const VelocityField& v, int k);

/// Analytic L2 inner product through the slice pipeline (band-by-band
/// multiply + closed-form integrate); used to cross-check the diagonal sums.
Complex analytic_l2_inner(const SpectralScalar& f, const SpectralScalar& g);

/// 1D Sobolev norm of a mean profile, (sum (1+(q pi/2)^2)^k b_q^2)^{1/2}.
double profile_hk_norm(const MeanProfile& mp, int k);

class WeightFunction;

/// int |del^j f|^2 w dx dy with the multinomial collection of order-j
/// derivatives; w is the y-only weight.  The y-factors go through the exact
/// graded-slice algebra, the x-derivatives reduce to powers of p^2.
double weighted_layer_sq(const SpectralScalar& f, const WeightFunction& w, int j);

double binom(int n, int r);

/// Sup of |slice(y)| over [-1,1]: dense sampling with one parabolic polish
/// of the discrete argmax.
double sup_abs(const RawTrigSlice& s);
/// Min of a real slice over [-1,1], same scheme.
double min_real(const RawTrigSlice& s);

/// Weight w(y) = 1 + G(y) with G in the c-basis (the role of d_y rho_tilde).
class WeightFunction {
  public:
    WeightFunction() = default;

    /// G = d_y rho_tilde for a given mean profile.
    static WeightFunction from_mean_profile(const MeanProfile& mp);
    /// G = sum_q g[q] c_q (g[0] multiplies the normalized c_0).
    static WeightFunction from_c_coeffs(std::vector<double> g);

    int m() const { return int(g_.size()) - 1; }
    const std::vector<double>& c_coeffs() const { return g_; }

    /// Packed C-grade slots of w = 1 + G for the graded kernels.
    const std::vector<Complex>& w_packed() const { return w_packed_; }
    /// w as a dense slice.
    RawTrigSlice w_slice() const;

    double weight_min() const;          // min over y of 1 + G
    double sup_abs_g() const;           // ||G||_{L^inf}
    double g_h_norm(int k) const;       // ||G||_{H^k[-1,1]}, diagonal weights
    bool within_bound(double eps, int k) const {
        return g_h_norm(k + 1) <= eps && sup_abs_g() < 1.0;
    }

  private:
    std::vector<double> g_;            // c-basis coefficients of G, q = 0..m
    std::vector<Complex> w_packed_;    // raw slots of 1 + G
    void rebuild();
};

}  // namespace stratsim
