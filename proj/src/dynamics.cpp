#include "stratsim/dynamics.hpp"

#include <cmath>

#include "stratsim/summation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stratsim {

using kernels::BandDeriv;
using kernels::BandTable;
using kernels::Grade;

namespace {

/// Band-convolution core: out(p_out) = P[(vel1 * a) + (vel2 * b)] where a, b
/// are the dx/dy band tables of the advected scalar.  Output bands p >= 0
/// are computed independently (one thread each) and mirrored to p < 0, so
/// the result does not depend on the thread count.
void convolve_advection(const BandTable& vel1, const BandTable& dxf, const BandTable& vel2,
                        const BandTable& dyf, Family out_family, SpectralScalar& out) {
    const int m = vel1.m;
    const int kacc = 2 * m + 1;
    const Grade tg = kernels::grade_of(out_family);
    assert(kernels::product_grade(vel1.g, dxf.g) == tg);
    assert(kernels::product_grade(vel2.g, dyf.g) == tg);

    static thread_local std::vector<Complex> acc_store;
    std::vector<Complex>& acc_all = acc_store;
    acc_all.assign(std::size_t(m + 1) * kacc, Complex(0.0, 0.0));

#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
    for (int p_out = 0; p_out <= m; ++p_out) {
        Complex* acc = acc_all.data() + std::size_t(p_out) * kacc;
        const int lo = std::max(-m, p_out - m);
        const int hi = std::min(m, p_out + m);
        for (int p1 = lo; p1 <= hi; ++p1) {
            const int p2 = p_out - p1;
            kernels::mul_acc(vel1.g, vel1.band(p1), m, dxf.g, dxf.band(p2), m, acc);
            kernels::mul_acc(vel2.g, vel2.band(p1), m, dyf.g, dyf.band(p2), m, acc);
        }
    }

    const double scale = 1.0 / kSqrt2Pi;  // a_{p1} a_{p2} = a_{p1+p2}/sqrt(2 pi)
    const int q0 = q_min(out_family);
    std::vector<Complex> coeffs(m + 1 - q0);
    for (int p_out = 0; p_out <= m; ++p_out) {
        kernels::read_coeffs(tg, acc_all.data() + std::size_t(p_out) * kacc, kacc - 1, out_family, m,
                             coeffs.data());
        for (int q = q0; q <= m; ++q) out.at(p_out, q) = scale * coeffs[q - q0];
    }
    out.mirror_from_nonnegative();
}

struct LerayFactors {
    // u1' = a11 f1 + a12 f2 ; u2' = a22 f2 + a21 f1, all at one (p,q).
    double a11;
    Complex a12, a21;
    double a22;
};

LerayFactors leray_factors(int p, int q) {
    const double k2 = kappa_sq(p, q);
    const double q2 = q_freq(q) * q_freq(q);
    const Complex ip(0.0, double(p));
    LerayFactors f;
    f.a11 = q2 / k2;
    f.a12 = ip * (dyb_factor(q) / k2);
    f.a21 = ip * (dyc_factor(q) / k2);
    f.a22 = double(p) * p / k2;
    return f;
}

}  // namespace

SpectralScalar advect(const VelocityField& v, const SpectralScalar& f) {
    BandTable vel1, vel2, dxf, dyf;
    kernels::fill_bands(v.u1, BandDeriv::None, vel1);
    kernels::fill_bands(v.u2, BandDeriv::None, vel2);
    kernels::fill_bands(f, BandDeriv::Dx, dxf);
    kernels::fill_bands(f, BandDeriv::Dy, dyf);
    SpectralScalar out(f.family(), f.m());
    convolve_advection(vel1, dxf, vel2, dyf, f.family(), out);
    return out;
}

SpectralScalar advect_reference(const VelocityField& v, const SpectralScalar& f) {
    const int m = f.m();
    SpectralScalar out(f.family(), m);
    SpectralScalar fx = dx(f);
    SpectralScalar fy = dy(f);
    std::vector<RawTrigSlice> su1, su2, sfx, sfy;
    for (int p = -m; p <= m; ++p) {
        su1.push_back(to_raw_trig(v.u1, p));
        su2.push_back(to_raw_trig(v.u2, p));
        sfx.push_back(to_raw_trig(fx, p));
        sfy.push_back(to_raw_trig(fy, p));
    }
    for (int p_out = -m; p_out <= m; ++p_out) {
        RawTrigSlice acc(2 * m);
        for (int p1 = std::max(-m, p_out - m); p1 <= std::min(m, p_out + m); ++p1) {
            const int p2 = p_out - p1;
            add_scaled(acc, multiply_slices(su1[p1 + m], sfx[p2 + m]), 1.0);
            add_scaled(acc, multiply_slices(su2[p1 + m], sfy[p2 + m]), 1.0);
        }
        for (int q = f.q_lo(); q <= m; ++q)
            out.at(p_out, q) = inner_product_with_basis(acc, f.family(), q) / kSqrt2Pi;
    }
    return out;
}

Dynamics::Dynamics(DynamicsMode mode, int m) : mode_(mode), m_(m) {
    if (mode == DynamicsMode::Quasilinear)
        weight_ = WeightFunction::from_c_coeffs(std::vector<double>(std::size_t(m) + 1, 0.0));
}

Dynamics::Dynamics(DynamicsMode mode, int m, WeightFunction weight)
    : mode_(mode), m_(m), weight_(std::move(weight)) {}

VelocityField Dynamics::advection_pair(const StateVector& s) const {
    VelocityField a(m_);
    if (mode_ == DynamicsMode::Nonlinear) {
        VelocityField v = s.velocity();
        a.u1 = advect(v, s.u1);
        a.u2 = advect(v, s.u2);
    }
    return a;
}

void Dynamics::velocity_rhs(const StateVector& s, SpectralScalar& du1, SpectralScalar& du2,
                            VelocityField* adv_out) const {
    VelocityField adv = advection_pair(s);
    VelocityField ladv = (mode_ == DynamicsMode::Nonlinear) ? leray(adv) : VelocityField(m_);

    // du = (-u + L[(0,rho)]) - L(Q,P)[(u.grad)u], assembled mode-wise.
    for (int p = -m_; p <= m_; ++p) {
        du1.at(p, 0) = -s.u1.at(p, 0) - ladv.u1.at(p, 0);
        for (int q = 1; q <= m_; ++q) {
            const LerayFactors lf = leray_factors(p, q);
            const Complex r = s.rho.at(p, q);
            du1.at(p, q) = (-s.u1.at(p, q) + lf.a12 * r) + (-ladv.u1.at(p, q));
            du2.at(p, q) = (-s.u2.at(p, q) + lf.a22 * r) + (-ladv.u2.at(p, q));
        }
    }
    if (adv_out) *adv_out = adv;
}

void Dynamics::rho_rhs(const StateVector& s, SpectralScalar& drho, SpectralScalar* adv_out) const {
    SpectralScalar adv(Family::Omega, m_);
    switch (mode_) {
        case DynamicsMode::Linearized:
            break;
        case DynamicsMode::Quasilinear: {
            // P_m[(1+G) u2] - u2: the remainder beyond the plain -u2 forcing.
            const auto& w = weight_.w_packed();
            const int kw = int(w.size()) - 1;
            std::vector<Complex> band(m_ + 1), acc(m_ + kw + 1), coeffs(m_);
            for (int p = 0; p <= m_; ++p) {
                kernels::band_of(s.u2, p, band.data());
                std::fill(acc.begin(), acc.end(), Complex(0.0, 0.0));
                kernels::mul_acc(Grade::C, w.data(), kw, Grade::B, band.data(), m_, acc.data());
                kernels::read_coeffs(Grade::B, acc.data(), m_ + kw, Family::Omega, m_, coeffs.data());
                for (int q = 1; q <= m_; ++q) adv.at(p, q) = coeffs[q - 1] - s.u2.at(p, q);
            }
            adv.mirror_from_nonnegative();
            break;
        }
        case DynamicsMode::Nonlinear:
            adv = advect(s.velocity(), s.rho);
            break;
    }
    for (int p = -m_; p <= m_; ++p)
        for (int q = 1; q <= m_; ++q) drho.at(p, q) = (-adv.at(p, q)) + (-s.u2.at(p, q));
    if (adv_out) *adv_out = adv;
}

StateVector Dynamics::rhs(const StateVector& s) const {
    StateVector out(m_);
    out.t = s.t;
    rho_rhs(s, out.rho, nullptr);
    velocity_rhs(s, out.u1, out.u2, nullptr);
    return out;
}

RhsBreakdown Dynamics::rhs_breakdown(const StateVector& s) const {
    RhsBreakdown b{StateVector(m_), StateVector(m_), StateVector(m_),
                   StateVector(m_), StateVector(m_), StateVector(m_)};

    SpectralScalar adv_rho(Family::Omega, m_);
    rho_rhs(s, b.total.rho, &adv_rho);
    VelocityField adv(m_);
    velocity_rhs(s, b.total.u1, b.total.u2, &adv);
    VelocityField ladv = (mode_ == DynamicsMode::Nonlinear) ? leray(adv) : VelocityField(m_);

    for (int p = -m_; p <= m_; ++p) {
        b.linear_damping.u1.at(p, 0) = -s.u1.at(p, 0);
        b.advection_u.u1.at(p, 0) = -ladv.u1.at(p, 0);
        for (int q = 1; q <= m_; ++q) {
            const LerayFactors lf = leray_factors(p, q);
            b.linear_damping.u1.at(p, q) = -s.u1.at(p, q);
            b.linear_damping.u2.at(p, q) = -s.u2.at(p, q);
            b.buoyancy_leray.u1.at(p, q) = lf.a12 * s.rho.at(p, q);
            b.buoyancy_leray.u2.at(p, q) = lf.a22 * s.rho.at(p, q);
            b.advection_u.u1.at(p, q) = -ladv.u1.at(p, q);
            b.advection_u.u2.at(p, q) = -ladv.u2.at(p, q);
            b.advection_rho.rho.at(p, q) = -adv_rho.at(p, q);
            b.forcing_rho.rho.at(p, q) = -s.u2.at(p, q);
        }
    }
    for (auto* part : {&b.linear_damping, &b.buoyancy_leray, &b.advection_rho, &b.advection_u, &b.forcing_rho, &b.total})
        part->t = s.t;
    return b;
}

StateVector Dynamics::step_rk4(const StateVector& s, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    StateVector k1 = rhs(s);
    StateVector s2 = s;
    s2.axpy(0.5 * dt, k1);
    StateVector k2 = rhs(s2);
    StateVector s3 = s;
    s3.axpy(0.5 * dt, k2);
    StateVector k3 = rhs(s3);
    StateVector s4 = s;
    s4.axpy(dt, k3);
    StateVector k4 = rhs(s4);

    StateVector acc = k1;
    acc.axpy(2.0, k2);
    acc.axpy(2.0, k3);
    acc.axpy(1.0, k4);
    StateVector out = s;
    out.axpy(dt / 6.0, acc);
    out.t = s.t + dt;

    double check = l2_norm_sq(out.rho) + l2_norm_sq(out.u1) + l2_norm_sq(out.u2);
    if (!std::isfinite(check)) throw BlowupError(out.t, "step_rk4: non-finite state");
    return out;
}

std::pair<StateVector, double> Dynamics::step_rk4_doubled(const StateVector& s, double dt) const {
    StateVector full = step_rk4(s, dt);
    StateVector half = step_rk4(step_rk4(s, 0.5 * dt), 0.5 * dt);
    double worst = 0.0;
    auto diff = [&](const SpectralScalar& a, const SpectralScalar& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
    };
    diff(full.rho, half.rho);
    diff(full.u1, half.u1);
    diff(full.u2, half.u2);
    half.t = s.t + dt;
    return {half, worst / 15.0};
}

std::vector<StateViolation> check_state_invariants(const StateVector& s, double tol) {
    std::vector<StateViolation> out;
    const double scale =
        std::max({1.0, std::sqrt(l2_norm_sq(s.rho)), std::sqrt(l2_norm_sq(s.u1)), std::sqrt(l2_norm_sq(s.u2))});

    double r = std::max({s.rho.max_reality_violation(), s.u1.max_reality_violation(), s.u2.max_reality_violation()});
    if (r > tol * scale) out.push_back({"reality", r});

    double dvn = std::sqrt(l2_norm_sq(divergence(s.velocity())));
    double un = std::sqrt(l2_norm_sq(s.u1) + l2_norm_sq(s.u2));
    if (dvn > tol * std::max(1.0, un)) out.push_back({"divergence_free", dvn});

    double mean_u2 = 0.0;
    for (int q = 1; q <= s.m(); ++q) mean_u2 = std::max(mean_u2, std::abs(s.u2.at(0, q)));
    if (mean_u2 > tol * scale) out.push_back({"u2_zero_average", mean_u2});
    return out;
}

SpectralScalar reconstruct_pressure(const StateVector& s, DynamicsMode mode) {
    const int m = s.m();
    SpectralScalar pi(Family::Varpi, m);
    auto [mp, rho_bar] = split_mean(s.rho);
    (void)mp;
    for (int p = -m; p <= m; ++p) {
        if (p == 0) continue;
        for (int q = 1; q <= m; ++q)
            pi.at(p, q) = -(dyb_factor(q) / kappa_sq(p, q)) * rho_bar.at(p, q);
    }
    if (mode == DynamicsMode::Nonlinear) {
        Dynamics dyn(DynamicsMode::Nonlinear, m);
        VelocityField a = dyn.advection_pair(s);
        SpectralScalar d = divergence(a);
        SpectralScalar nl = inv_neg_laplacian(d);
        pi += nl;
    }
    return pi;
}

namespace {

double sup_gradient_norm(const std::vector<const SpectralScalar*>& comps, int nx, int ny) {
    // max over the grid of sqrt(sum of squared component values), then one
    // parabolic polish along each axis at the discrete argmax.
    auto value = [&](double x, double y) {
        double acc = 0.0;
        for (auto* f : comps) {
            double v = eval(*f, x, y).real();
            acc += v * v;
        }
        return std::sqrt(acc);
    };
    std::vector<double> xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i) xs[i] = 2.0 * kPi * i / nx;
    for (int j = 0; j < ny; ++j) ys[j] = -1.0 + 2.0 * j / (ny - 1);

    // Separable synthesis: band profiles at the y-nodes, then x-phases.
    const int m_all = comps.front()->m();
    std::vector<Complex> phase(std::size_t(2 * m_all + 1) * nx);
    for (int i = 0; i < nx; ++i) {
        const Complex w = std::polar(1.0, xs[i]);
        Complex e(1.0 / kSqrt2Pi, 0.0);
        phase[std::size_t(m_all) * nx + i] = e;
        Complex ep = e, em = e;
        for (int p = 1; p <= m_all; ++p) {
            ep *= w;
            em *= std::conj(w);
            phase[std::size_t(m_all + p) * nx + i] = ep;
            phase[std::size_t(m_all - p) * nx + i] = em;
        }
    }
    std::vector<double> vals(std::size_t(nx) * ny, 0.0);
    for (auto* f : comps) {
        const int m = f->m();
        std::vector<Complex> prof(std::size_t(2 * m + 1) * ny);
        for (int p = -m; p <= m; ++p)
            for (int j = 0; j < ny; ++j) {
                Complex acc(0.0, 0.0);
                for (int q = f->q_lo(); q <= m; ++q) {
                    double by = (f->family() == Family::Omega) ? eval_b(q, ys[j]) : eval_c(q, ys[j]);
                    acc += f->at(p, q) * by;
                }
                prof[std::size_t(p + m) * ny + j] = acc;
            }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Complex acc(0.0, 0.0);
                for (int p = -m; p <= m; ++p)
                    acc += prof[std::size_t(p + m) * ny + j] * phase[std::size_t(p + m) * nx + i];
                double v = acc.real();
                vals[std::size_t(j) * nx + i] += v * v;
            }
    }
    double best = -1.0, bx = 0.0, by = 0.0;
    int bi = 0, bj = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double v = std::sqrt(vals[std::size_t(j) * nx + i]);
            vals[std::size_t(j) * nx + i] = v;
            if (v > best) {
                best = v;
                bx = xs[i];
                by = ys[j];
                bi = i;
                bj = j;
            }
        }
    auto at = [&](int i, int j) { return vals[std::size_t(j) * nx + ((i % nx) + nx) % nx]; };
    double hx = 2.0 * kPi / nx;
    double vm = at(bi - 1, bj), v0 = at(bi, bj), vp = at(bi + 1, bj);
    double den = vm - 2.0 * v0 + vp;
    double px = bx + ((den != 0.0) ? 0.5 * (vm - vp) / den * hx : 0.0);
    double py = by;
    if (bj > 0 && bj < ny - 1) {
        double wm = at(bi, bj - 1), wp = at(bi, bj + 1);
        double deny = wm - 2.0 * v0 + wp;
        if (deny != 0.0) py = std::clamp(by + 0.5 * (wm - wp) / deny * (2.0 / (ny - 1)), -1.0, 1.0);
    }
    return std::max(best, value(px, py));
}

}  // namespace

double blowup_integrand(const StateVector& s) {
    const int m = s.m();
    SpectralScalar rx = dx(s.rho), ry = dy(s.rho);
    SpectralScalar u1x = dx(s.u1), u1y = dy(s.u1);
    SpectralScalar u2x = dx(s.u2), u2y = dy(s.u2);
    int nx = 4 * (2 * m + 1), ny = 4 * (2 * m + 1) + 1;
    double grad_rho = sup_gradient_norm({&rx, &ry}, nx, ny);
    double grad_u = sup_gradient_norm({&u1x, &u1y, &u2x, &u2y}, nx, ny);
    return grad_u + grad_rho;
}

namespace {

double wall_trace_max(const SpectralScalar& f, double ywall, int nx) {
    const int m = f.m();
    std::vector<Complex> prof(2 * m + 1, Complex(0.0, 0.0));
    for (int p = -m; p <= m; ++p) {
        Complex acc(0.0, 0.0);
        for (int q = f.q_lo(); q <= m; ++q) {
            double by = (f.family() == Family::Omega) ? eval_b(q, ywall) : eval_c(q, ywall);
            acc += f.at(p, q) * by;
        }
        prof[p + m] = acc;
    }
    double worst = 0.0;
    for (int i = 0; i < nx; ++i) {
        double x = 2.0 * kPi * i / nx;
        Complex acc(0.0, 0.0);
        for (int p = -m; p <= m; ++p) acc += prof[p + m] * eval_a(p, x);
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

}  // namespace

double trace_audit(const StateVector& s) {
    const int m = s.m();
    const int nx = 4 * m + 9;
    SpectralScalar rho_yy = dy(dy(s.rho));
    SpectralScalar u2_yy = dy(dy(s.u2));
    SpectralScalar u1_y = dy(s.u1);
    double worst = 0.0;
    for (double yw : {-1.0, 1.0}) {
        worst = std::max(worst, wall_trace_max(s.rho, yw, nx));
        worst = std::max(worst, wall_trace_max(s.u2, yw, nx));
        worst = std::max(worst, wall_trace_max(rho_yy, yw, nx));
        worst = std::max(worst, wall_trace_max(u2_yy, yw, nx));
        worst = std::max(worst, wall_trace_max(u1_y, yw, nx));
    }
    return worst;
}

}  // namespace stratsim
