#include "stratsim/energy.hpp"

#include <cmath>
#include <limits>

#include "stratsim/summation.hpp"

namespace stratsim {

using kernels::Grade;

double compute_e_k(const StateVector& s, int k) {
    double r = sobolev_norm(s.rho, k);
    return hk_norm_sq_velocity(s.velocity(), k) + r * r;
}

double compute_E_k(const StateVector& s, const Dynamics& dyn, int k) {
    StateVector dudt = dyn.rhs(s);
    double r = sobolev_norm(s.rho, k);
    double u2n = sobolev_norm(s.u2, k);
    double dt1 = sobolev_norm(dudt.u1, k);
    double dt2 = sobolev_norm(dudt.u2, k);
    return 0.5 * (hk_norm_sq_velocity(s.velocity(), k) + r * r + (dt1 * dt1 + dt2 * dt2) + u2n * u2n);
}

WeightedEnergy compute_weighted(const StateVector& s, int k_plus_1) {
    WeightedEnergy out;
    auto [mp, rho_bar] = split_mean(s.rho);
    (void)rho_bar;
    WeightFunction w = WeightFunction::from_mean_profile(mp);
    out.weight_min = w.weight_min();
    out.weight_flagged = !(out.weight_min > 0.0);
    out.weighted_integral =
        weighted_layer_sq(s.u1, w, k_plus_1) + weighted_layer_sq(s.u2, w, k_plus_1);
    double semi = sobolev_seminorm(s.rho, k_plus_1);
    out.rho_seminorm_sq = semi * semi;
    out.value = 0.5 * (out.rho_seminorm_sq + out.weighted_integral);
    return out;
}

std::pair<double, double> compute_psi(const StateVector& s, const Dynamics& dyn, int k) {
    (void)dyn;
    auto [mp, rho_bar] = split_mean(s.rho);
    (void)rho_bar;
    WeightFunction w = WeightFunction::from_mean_profile(mp);
    const double sup_g = w.sup_abs_g();
    const double rho_n = sobolev_norm(s.rho, k + 1);
    const double u_n = std::sqrt(hk_norm_sq_velocity(s.velocity(), k));
    if (sup_g >= 1.0) {
        double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    const double wint = weighted_layer_sq(s.u1, w, k + 1) + weighted_layer_sq(s.u2, w, k + 1);
    double psi1 = rho_n + u_n + std::sqrt((1.0 + sup_g) / (1.0 - sup_g)) * std::sqrt(std::max(wint, 0.0));
    double psi2 = (rho_n + u_n + rho_n * u_n) / (1.0 - sup_g);
    return {psi1, psi2};
}

double total_energy(const StateVector& s, const Dynamics& dyn, int k) {
    return compute_E_k(s, dyn, k) + compute_weighted(s, k + 1).value;
}

namespace {

double hk_inner_vel(const VelocityField& a, const VelocityField& b, int k) {
    return hk_inner(a.u1, b.u1, k) + hk_inner(a.u2, b.u2, k);
}

VelocityField as_velocity(const StateVector& s) { return s.velocity(); }

}  // namespace

BalanceSample energy_balance_residual(const StateVector& prev, const StateVector& mid,
                                      const StateVector& next, const Dynamics& dyn, int k) {
    const double dt = mid.t - prev.t;
    BalanceSample out;
    out.dE_dt = (compute_E_k(next, dyn, k) - compute_E_k(prev, dyn, k)) / (2.0 * dt);

    RhsBreakdown b = dyn.rhs_breakdown(mid);
    const StateVector& dudt = b.total;

    // A_rho and L A_u as evolved by this mode's system.
    SpectralScalar a_rho = b.advection_rho.rho;
    a_rho *= -1.0;
    VelocityField la_u(mid.m());
    la_u.u1 = b.advection_u.u1;
    la_u.u2 = b.advection_u.u2;
    la_u.u1 *= -1.0;
    la_u.u2 *= -1.0;

    // d_t of the projected velocity advection: (Q,P)[(du.grad)u + (u.grad)du].
    VelocityField dt_a(mid.m());
    if (dyn.mode() == DynamicsMode::Nonlinear) {
        VelocityField v = as_velocity(mid);
        VelocityField dv(mid.m());
        dv.u1 = dudt.u1;
        dv.u2 = dudt.u2;
        dt_a.u1 = advect(dv, mid.u1);
        dt_a.u1 += advect(v, dudt.u1);
        dt_a.u2 = advect(dv, mid.u2);
        dt_a.u2 += advect(v, dudt.u2);
    }

    VelocityField vel = as_velocity(mid);
    VelocityField dvel(mid.m());
    dvel.u1 = dudt.u1;
    dvel.u2 = dudt.u2;

    KahanSum rhs;
    rhs.add(-hk_norm_sq_velocity(vel, k));
    rhs.add(-hk_norm_sq_velocity(dvel, k));
    rhs.add(-hk_inner(a_rho, mid.rho, k));
    rhs.add(-hk_inner_vel(vel, la_u, k));
    rhs.add(-hk_inner(dudt.u2, a_rho, k));
    rhs.add(-hk_inner_vel(dvel, dt_a, k));
    out.rhs = rhs.value();
    out.residual = std::abs(out.dE_dt - out.rhs);
    return out;
}

// ---------------------------------------------------------------------------
// Weighted-balance assembly: band tables of (possibly quadratic) fields with
// arbitrary slice length, paired layer-by-layer with an optional y-weight.

namespace {

struct SliceBands {
    Grade g = Grade::B;
    int m = 0;   // band range
    int K = 0;   // slice length
    std::vector<Complex> z;

    void init(Grade grade, int m_, int K_) {
        g = grade;
        m = m_;
        K = K_;
        z.assign(std::size_t(2 * m_ + 1) * (K_ + 1), Complex(0.0, 0.0));
    }
    Complex* band(int p) { return z.data() + std::size_t(p + m) * (K + 1); }
    const Complex* band(int p) const { return z.data() + std::size_t(p + m) * (K + 1); }
};

SliceBands bands_from_field(const SpectralScalar& f) {
    SliceBands sb;
    sb.init(kernels::grade_of(f.family()), f.m(), f.m());
    for (int p = -f.m(); p <= f.m(); ++p) kernels::band_of(f, p, sb.band(p));
    return sb;
}

/// acc += pointwise product a*b, bands |p| <= acc.m (inputs at truncation m).
void conv_product_acc(SliceBands& acc, const SpectralScalar& a, const SpectralScalar& b) {
    const int m = a.m();
    SliceBands sa = bands_from_field(a);
    SliceBands sb = bands_from_field(b);
    assert(acc.K >= 2 * m && kernels::product_grade(sa.g, sb.g) == acc.g);
    std::vector<Complex> tmp(2 * m + 1, Complex(0.0, 0.0));
    for (int p = -acc.m; p <= acc.m; ++p) {
        std::fill(tmp.begin(), tmp.end(), Complex(0.0, 0.0));
        for (int p1 = std::max(-m, p - m); p1 <= std::min(m, p + m); ++p1)
            kernels::mul_acc(sa.g, sa.band(p1), m, sb.g, sb.band(p - p1), m, tmp.data());
        Complex* dst = acc.band(p);
        const double scale = 1.0 / kSqrt2Pi;
        for (int kk = 0; kk <= 2 * m; ++kk) dst[kk] += scale * tmp[kk];
    }
}

/// Bands of w(y) * f for a y-only weight (no x-convolution, no 1/sqrt(2pi)).
SliceBands yweight_product(const std::vector<Complex>& w, const SpectralScalar& f) {
    const int m = f.m();
    const int kw = int(w.size()) - 1;
    SliceBands out;
    out.init(kernels::grade_of(f.family()), m, m + kw);
    std::vector<Complex> band(m + 1);
    for (int p = -m; p <= m; ++p) {
        kernels::band_of(f, p, band.data());
        kernels::mul_acc(Grade::C, w.data(), kw, kernels::grade_of(f.family()), band.data(), m,
                         out.band(p));
    }
    return out;
}

/// sum_{s1+s2=j} C(j,s1) sum_p p^{2 s1} Re int (d_y^{s2} A_p) conj(d_y^{s2} B_p) w dy.
/// Pass an empty weight for w = 1.
double weighted_pair_layer(const SliceBands& A, const SliceBands& B, const std::vector<Complex>& w,
                           Grade gw, int j) {
    assert(A.m == B.m);
    const int kw = int(w.size()) - 1;
    std::vector<Complex> ca(A.K + 1), na(A.K + 1), cb(B.K + 1), nb(B.K + 1);
    std::vector<Complex> prod(A.K + B.K + 1), wprod(A.K + B.K + (kw > 0 ? kw : 0) + 1);
    KahanSum total;
    for (int p = 0; p <= A.m; ++p) {
        const double sym = (p == 0) ? 1.0 : 2.0;
        std::copy(A.band(p), A.band(p) + A.K + 1, ca.begin());
        std::copy(B.band(p), B.band(p) + B.K + 1, cb.begin());
        Grade ga = A.g, gb = B.g;
        const double p2 = double(p) * p;
        for (int s2 = 0; s2 <= j; ++s2) {
            const double xw = binom(j, s2) * ((j == s2) ? 1.0 : std::pow(p2, double(j - s2)));
            if (xw != 0.0) {
                std::fill(prod.begin(), prod.end(), Complex(0.0, 0.0));
                for (int kk = 0; kk <= B.K; ++kk) nb[kk] = std::conj(cb[kk]);
                kernels::mul_acc(ga, ca.data(), A.K, gb, nb.data(), B.K, prod.data());
                double val;
                if (kw >= 0) {
                    std::fill(wprod.begin(), wprod.end(), Complex(0.0, 0.0));
                    kernels::mul_acc(kernels::product_grade(ga, gb), prod.data(), A.K + B.K, gw, w.data(),
                                     kw, wprod.data());
                    val = kernels::integrate(kernels::product_grade(kernels::product_grade(ga, gb), gw),
                                             wprod.data(), A.K + B.K + kw)
                              .real();
                } else {
                    val = kernels::integrate(kernels::product_grade(ga, gb), prod.data(), A.K + B.K).real();
                }
                total.add(sym * xw * val);
            }
            if (s2 < j) {
                kernels::ddy(ga, ca.data(), A.K, na.data());
                std::swap(ca, na);
                ga = kernels::flip(ga);
                kernels::ddy(gb, cb.data(), B.K, nb.data());
                std::swap(cb, nb);
                gb = kernels::flip(gb);
            }
        }
    }
    return total.value();
}

/// Packed B-grade slice of d_y^n rho_tilde for a mean profile.
std::vector<Complex> profile_dyn_slice(const MeanProfile& mp, int n, Grade& g_out) {
    std::vector<Complex> z(std::size_t(mp.m) + 1, Complex(0.0, 0.0));
    for (int q = 1; q <= mp.m; ++q) z[q] = Complex(mp.b[q], 0.0);
    Grade g = Grade::B;
    std::vector<Complex> nxt(z.size());
    for (int i = 0; i < n; ++i) {
        kernels::ddy(g, z.data(), mp.m, nxt.data());
        std::swap(z, nxt);
        g = kernels::flip(g);
    }
    g_out = g;
    return z;
}

}  // namespace

BalanceSample weighted_balance_residual(const StateVector& prev, const StateVector& mid,
                                        const StateVector& next, const Dynamics& dyn, int k) {
    if (dyn.mode() != DynamicsMode::Nonlinear)
        throw std::invalid_argument("weighted_balance_residual: nonlinear mode only");
    const double dt = mid.t - prev.t;
    const int m = mid.m();
    const int k1 = k + 1;

    BalanceSample out;
    out.dE_dt = (compute_weighted(next, k1).value - compute_weighted(prev, k1).value) / (2.0 * dt);

    auto [mp, rho_bar] = split_mean(mid.rho);
    WeightFunction w = WeightFunction::from_mean_profile(mp);
    const std::vector<Complex>& wz = w.w_packed();

    VelocityField n_u = dyn.advection_pair(mid);
    SpectralScalar pi = reconstruct_pressure(mid, DynamicsMode::Nonlinear);

    SliceBands u1b = bands_from_field(mid.u1);
    SliceBands u2b = bands_from_field(mid.u2);
    SliceBands rbb = bands_from_field(rho_bar);

    // T1 + T2: -int |d^{k+1} u|^2 w - int d^{k+1}u . d^{k+1}N_u w.
    double t1 = weighted_layer_sq(mid.u1, w, k1) + weighted_layer_sq(mid.u2, w, k1);
    double t2 = weighted_pair_layer(u1b, bands_from_field(n_u.u1), wz, Grade::C, k1) +
                weighted_pair_layer(u2b, bands_from_field(n_u.u2), wz, Grade::C, k1);

    // T3: int d^{k+1}u2 d^{k+1}Pi d_y^2 rho_tilde.
    Grade g_ddw;
    std::vector<Complex> ddw = profile_dyn_slice(mp, 2, g_ddw);
    double t3 = weighted_pair_layer(u2b, bands_from_field(pi), ddw, g_ddw, k1);

    // T4: -int d^{k+1}(u . grad rho_bar) d^{k+1} rho_bar  (unprojected product).
    SliceBands adv_rb;
    adv_rb.init(kernels::grade_of(Family::Omega), m, 2 * m);
    conv_product_acc(adv_rb, mid.u1, dx(rho_bar));
    conv_product_acc(adv_rb, mid.u2, dy(rho_bar));
    std::vector<Complex> unit;  // empty = unweighted
    double t4 = weighted_pair_layer(adv_rb, rbb, unit, Grade::C, k1);

    // T5: int [w d^{k+1}u2 - d^{k+1}(w u2)] d^{k+1} rho_bar.
    SliceBands wu2 = yweight_product(wz, mid.u2);
    double t5 = weighted_pair_layer(u2b, rbb, wz, Grade::C, k1) -
                weighted_pair_layer(wu2, rbb, unit, Grade::C, k1);

    // T6: (1/2) int |d^{k+1}u|^2 d_t d_y rho_tilde, with d_t rho_tilde from
    // the evolved system.
    StateVector dudt = dyn.rhs(mid);
    auto [dmp, dbar] = split_mean(dudt.rho);
    (void)dbar;
    std::vector<Complex> wdt(std::size_t(m) + 1, Complex(0.0, 0.0));
    for (int q = 1; q <= m; ++q) wdt[q] = Complex(dyb_factor(q) * dmp.b[q], 0.0);
    double t6 = 0.5 * (weighted_pair_layer(u1b, u1b, wdt, Grade::C, k1) +
                       weighted_pair_layer(u2b, u2b, wdt, Grade::C, k1));

    // T7: sqrt(2 pi) int d_y^{k+2} rho_tilde d_y^{k+1} (u2 rho_bar)_0 dy.
    SliceBands u2rb;
    u2rb.init(kernels::product_grade(Grade::B, Grade::B), m, 2 * m);
    conv_product_acc(u2rb, mid.u2, rho_bar);
    Grade g_rt;
    std::vector<Complex> rt_k2 = profile_dyn_slice(mp, k + 2, g_rt);
    std::vector<Complex> band0(u2rb.band(0), u2rb.band(0) + 2 * m + 1);
    Grade g_b0 = u2rb.g;
    for (int i = 0; i < k1; ++i) {
        std::vector<Complex> nx(band0.size());
        kernels::ddy(g_b0, band0.data(), 2 * m, nx.data());
        band0 = std::move(nx);
        g_b0 = kernels::flip(g_b0);
    }
    std::vector<Complex> prod(std::size_t(mp.m + 2 * m) + 1, Complex(0.0, 0.0));
    kernels::mul_acc(g_rt, rt_k2.data(), mp.m, g_b0, band0.data(), 2 * m, prod.data());
    double t7 =
        kSqrt2Pi *
        kernels::integrate(kernels::product_grade(g_rt, g_b0), prod.data(), mp.m + 2 * m).real();

    out.rhs = -t1 - t2 + t3 - t4 + t5 + t6 + t7;
    out.residual = std::abs(out.dE_dt - out.rhs);
    return out;
}

std::pair<double, double> mean_coupling_leading_terms(const StateVector& s, int k) {
    const int m = s.m();
    auto [mp, rho_bar] = split_mean(s.rho);

    // Commutator route: the top Leibniz term of [w d^{k+1} - d^{k+1} w.] u2,
    // -int d_y^{k+2} rho_tilde u2 d_y^{k+1} rho_bar, via per-band triple
    // slice products.
    Grade g_rt;
    std::vector<Complex> rt = profile_dyn_slice(mp, k + 2, g_rt);
    SliceBands u2b = bands_from_field(s.u2);
    SliceBands rbb = bands_from_field(rho_bar);
    KahanSum first;
    std::vector<Complex> drb(m + 1), tmp1(2 * m + 1), tmp2(std::size_t(2 * m + mp.m) + 1);
    for (int p = 0; p <= m; ++p) {
        const double sym = (p == 0) ? 1.0 : 2.0;
        std::vector<Complex> cb(rbb.band(p), rbb.band(p) + m + 1);
        Grade gb = rbb.g;
        for (int i = 0; i < k + 1; ++i) {
            kernels::ddy(gb, cb.data(), m, drb.data());
            std::swap(cb, drb);
            gb = kernels::flip(gb);
        }
        for (int kk = 0; kk <= m; ++kk) cb[kk] = std::conj(cb[kk]);
        std::fill(tmp1.begin(), tmp1.end(), Complex(0.0, 0.0));
        kernels::mul_acc(u2b.g, u2b.band(p), m, gb, cb.data(), m, tmp1.data());
        std::fill(tmp2.begin(), tmp2.end(), Complex(0.0, 0.0));
        Grade g12 = kernels::product_grade(u2b.g, gb);
        kernels::mul_acc(g_rt, rt.data(), mp.m, g12, tmp1.data(), 2 * m, tmp2.data());
        first.add(sym *
                  kernels::integrate(kernels::product_grade(g_rt, g12), tmp2.data(), 2 * m + mp.m).real());
    }

    // Transport route: the j = 0 Leibniz term of the mean-density transport,
    // +int d_y^{k+2} rho_tilde [u2 d_y^{k+1} rho_bar]_0 dy, through the
    // product field's zero band.
    SpectralScalar drho = rho_bar;
    for (int i = 0; i < k + 1; ++i) drho = dy(drho);
    SliceBands prodb;
    prodb.init(kernels::product_grade(Grade::B, kernels::grade_of(drho.family())), m, 2 * m);
    conv_product_acc(prodb, s.u2, drho);
    std::vector<Complex> pr(std::size_t(mp.m + 2 * m) + 1, Complex(0.0, 0.0));
    kernels::mul_acc(g_rt, rt.data(), mp.m, prodb.g, prodb.band(0), 2 * m, pr.data());
    double second = kSqrt2Pi *
                    kernels::integrate(kernels::product_grade(g_rt, prodb.g), pr.data(), mp.m + 2 * m).real();

    return {-first.value(), second};
}

EnergyReport make_report(const StateVector& s, const Dynamics& dyn, int k, int kappa) {
    EnergyReport r;
    r.t = s.t;
    r.e_k = compute_e_k(s, k);
    r.E_k = compute_E_k(s, dyn, k);
    WeightedEnergy we = compute_weighted(s, k + 1);
    r.Edot_k1 = we.value;
    r.E_total_k1 = r.E_k + r.Edot_k1;
    auto [p1, p2] = compute_psi(s, dyn, k);
    r.psi1 = p1;
    r.psi2 = p2;
    r.weight_min = we.weight_min;
    r.boundary_trace_max = trace_audit(s);
    r.blowup_integrand = blowup_integrand(s);

    auto [mp, rho_bar] = split_mean(s.rho);
    r.u_h4 = std::sqrt(hk_norm_sq_velocity(s.velocity(), 4));
    r.rho_bar_h4 = sobolev_norm(rho_bar, 4);
    r.rho_tilde_hkappa1 = sobolev_norm(lift_mean(mp), kappa + 1);
    r.E_total_kappa1 = compute_E_k(s, dyn, kappa) + compute_weighted(s, kappa + 1).value;
    return r;
}

}  // namespace stratsim
