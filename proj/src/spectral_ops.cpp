#include "stratsim/spectral_ops.hpp"

#include <stdexcept>

#include "stratsim/summation.hpp"

namespace stratsim {

SpectralScalar dx(const SpectralScalar& f) {
    SpectralScalar out(f.family(), f.m());
    for (int p = -f.m(); p <= f.m(); ++p) {
        const Complex ip(0.0, double(p));
        for (int q = f.q_lo(); q <= f.m(); ++q) out.at(p, q) = ip * f.at(p, q);
    }
    return out;
}

SpectralScalar dy(const SpectralScalar& f) {
    const int m = f.m();
    if (f.family() == Family::Omega) {
        SpectralScalar out(Family::Varpi, m);
        for (int p = -m; p <= m; ++p)
            for (int q = 1; q <= m; ++q) out.at(p, q) = dyb_factor(q) * f.at(p, q);
        return out;
    }
    SpectralScalar out(Family::Omega, m);
    for (int p = -m; p <= m; ++p)
        for (int q = 1; q <= m; ++q) out.at(p, q) = dyc_factor(q) * f.at(p, q);
    return out;
}

SpectralScalar project(const SpectralScalar& f, int m_t) {
    if (m_t > f.m()) throw std::invalid_argument("project: m_t exceeds stored truncation");
    SpectralScalar out(f.family(), f.m());
    for (int p = -m_t; p <= m_t; ++p)
        for (int q = f.q_lo(); q <= std::min(m_t, f.m()); ++q) out.at(p, q) = f.at(p, q);
    return out;
}

SpectralScalar inv_neg_laplacian(const SpectralScalar& f) {
    SpectralScalar out(f.family(), f.m());
    for (int p = -f.m(); p <= f.m(); ++p)
        for (int q = f.q_lo(); q <= f.m(); ++q) {
            double k2 = kappa_sq(p, q);
            out.at(p, q) = (k2 == 0.0) ? Complex(0.0, 0.0) : f.at(p, q) / k2;
        }
    return out;
}

SpectralScalar divergence(const VelocityField& v) {
    SpectralScalar out = dx(v.u1);
    out += dy(v.u2);
    return out;
}

VelocityField leray(const VelocityField& v) {
    const int m = v.m();
    VelocityField out(m);
    for (int p = -m; p <= m; ++p) {
        // q = 0 row: u1 only.  kappa^2 = p^2; the p != 0 modes are pure
        // gradients and die, the (0,0) mean flow is divergence-free already.
        out.u1.at(p, 0) = (p == 0) ? v.u1.at(p, 0) : Complex(0.0, 0.0);
        for (int q = 1; q <= m; ++q) {
            const double k2 = kappa_sq(p, q);
            const double q2 = q_freq(q) * q_freq(q);
            const Complex ip(0.0, double(p));
            const Complex f1 = v.u1.at(p, q);
            const Complex f2 = v.u2.at(p, q);
            out.u1.at(p, q) = (q2 / k2) * f1 + (ip * (dyb_factor(q) / k2)) * f2;
            out.u2.at(p, q) = (double(p) * p / k2) * f2 + (ip * (dyc_factor(q) / k2)) * f1;
        }
    }
    return out;
}

std::pair<MeanProfile, SpectralScalar> split_mean(const SpectralScalar& f) {
    if (f.family() != Family::Omega) throw std::invalid_argument("split_mean: Omega-family input expected");
    MeanProfile mp(f.m());
    for (int q = 1; q <= f.m(); ++q) mp.b[q] = f.at(0, q).real() / kSqrt2Pi;
    SpectralScalar bar = drop_mean(f);
    return {mp, bar};
}

SpectralScalar lift_mean(const MeanProfile& mp) {
    SpectralScalar f(Family::Omega, mp.m);
    for (int q = 1; q <= mp.m; ++q) f.at(0, q) = mp.b[q] * kSqrt2Pi;
    return f;
}

SpectralScalar drop_mean(const SpectralScalar& f) {
    SpectralScalar out = f;
    for (int q = f.q_lo(); q <= f.m(); ++q) out.at(0, q) = Complex(0.0, 0.0);
    return out;
}

double l2_inner(const SpectralScalar& f, const SpectralScalar& g) {
    assert(f.compatible(g));
    KahanSum s;
    for (std::size_t i = 0; i < f.size(); ++i) s.add((f.raw()[i] * std::conj(g.raw()[i])).real());
    return s.value();
}

double hk_inner(const SpectralScalar& f, const SpectralScalar& g, int k) {
    assert(f.compatible(g));
    KahanSum s;
    for (int p = -f.m(); p <= f.m(); ++p)
        for (int q = f.q_lo(); q <= f.m(); ++q) {
            double w = std::pow(1.0 + kappa_sq(p, q), k);
            s.add(w * (f.at(p, q) * std::conj(g.at(p, q))).real());
        }
    return s.value();
}

double l2_norm_sq(const SpectralScalar& f) {
    KahanSum s;
    for (const auto& z : f.raw()) s.add(std::norm(z));
    return s.value();
}

double sobolev_norm(const SpectralScalar& f, int k) {
    KahanSum s;
    for (int p = -f.m(); p <= f.m(); ++p)
        for (int q = f.q_lo(); q <= f.m(); ++q)
            s.add(std::pow(1.0 + kappa_sq(p, q), k) * std::norm(f.at(p, q)));
    return std::sqrt(s.value());
}

double sobolev_seminorm(const SpectralScalar& f, int k) {
    KahanSum s;
    for (int p = -f.m(); p <= f.m(); ++p)
        for (int q = f.q_lo(); q <= f.m(); ++q)
            s.add(std::pow(kappa_sq(p, q), k) * std::norm(f.at(p, q)));
    return std::sqrt(s.value());
}

double hk_norm_sq_velocity(const VelocityField& v, int k) {
    double a = sobolev_norm(v.u1, k);
    double b = sobolev_norm(v.u2, k);
    return a * a + b * b;
}

Complex analytic_l2_inner(const SpectralScalar& f, const SpectralScalar& g) {
    if (f.m() != g.m()) throw std::invalid_argument("analytic_l2_inner: truncation mismatch");
    Complex acc(0.0, 0.0);
    for (int p = -f.m(); p <= f.m(); ++p) {
        RawTrigSlice a = to_raw_trig(f, p);
        RawTrigSlice b = conj_slice(to_raw_trig(g, p));
        acc += integrate_slice(multiply_slices(a, b));
    }
    return acc;
}

double profile_hk_norm(const MeanProfile& mp, int k) {
    KahanSum s;
    for (int q = 1; q <= mp.m; ++q) {
        double w = std::pow(1.0 + q_freq(q) * q_freq(q), k);
        s.add(w * mp.b[q] * mp.b[q]);
    }
    return std::sqrt(s.value());
}

namespace {

// Dense sampling plus one parabolic (Newton-on-quadratic) polish at the
// discrete arg-extremum.
template <typename F>
double extremum_1d(int n, F&& value, bool maximize) {
    double best = maximize ? -1e300 : 1e300;
    double besty = -1.0;
    int besti = 0;
    std::vector<double> ys(n), vs(n);
    for (int i = 0; i < n; ++i) {
        ys[i] = -1.0 + 2.0 * i / (n - 1);
        vs[i] = value(ys[i]);
        if ((maximize && vs[i] > best) || (!maximize && vs[i] < best)) {
            best = vs[i];
            besty = ys[i];
            besti = i;
        }
    }
    if (besti > 0 && besti < n - 1) {
        double vm = vs[besti - 1], v0 = vs[besti], vp = vs[besti + 1];
        double denom = vm - 2.0 * v0 + vp;
        if (denom != 0.0) {
            double h = 2.0 / (n - 1);
            double shift = 0.5 * (vm - vp) / denom * h;
            double yq = besty + shift;
            if (yq >= -1.0 && yq <= 1.0) {
                double vq = value(yq);
                if ((maximize && vq > best) || (!maximize && vq < best)) best = vq;
            }
        }
    }
    (void)besty;
    return best;
}

}  // namespace

double sup_abs(const RawTrigSlice& s) {
    int n = std::max(64, 8 * (s.K + 1));
    return extremum_1d(n, [&](double y) { return std::abs(s.eval(y)); }, true);
}

double min_real(const RawTrigSlice& s) {
    int n = std::max(64, 8 * (s.K + 1));
    return extremum_1d(n, [&](double y) { return s.eval(y).real(); }, false);
}

double binom(int n, int r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
    return c;
}

double weighted_layer_sq(const SpectralScalar& f, const WeightFunction& w, int j) {
    const int m = f.m();
    const auto& wz = w.w_packed();
    const int kw = int(wz.size()) - 1;

    std::vector<Complex> cur(m + 1), nxt(m + 1), sq(2 * m + 1), wsq(2 * m + kw + 1);
    KahanSum total;
    for (int p = 0; p <= m; ++p) {
        const double sym = (p == 0) ? 1.0 : 2.0;  // conjugate band pairs
        kernels::band_of(f, p, cur.data());
        kernels::Grade gc = kernels::grade_of(f.family());
        const double p2 = double(p) * p;
        for (int s2 = 0; s2 <= j; ++s2) {
            const double xw = binom(j, s2) * ((j == s2) ? 1.0 : std::pow(p2, double(j - s2)));
            if (xw != 0.0) {
                std::fill(sq.begin(), sq.end(), Complex(0.0, 0.0));
                kernels::abs2_acc(gc, cur.data(), m, sq.data());
                std::fill(wsq.begin(), wsq.end(), Complex(0.0, 0.0));
                kernels::mul_acc(kernels::Grade::C, sq.data(), 2 * m, kernels::Grade::C, wz.data(), kw,
                                 wsq.data());
                total.add(sym * xw * kernels::integrate(kernels::Grade::C, wsq.data(), 2 * m + kw).real());
            }
            if (s2 < j) {
                kernels::ddy(gc, cur.data(), m, nxt.data());
                std::swap(cur, nxt);
                gc = kernels::flip(gc);
            }
        }
    }
    return total.value();
}

WeightFunction WeightFunction::from_mean_profile(const MeanProfile& mp) {
    WeightFunction w;
    w.g_.assign(std::size_t(mp.m) + 1, 0.0);
    for (int q = 1; q <= mp.m; ++q) w.g_[q] = dyb_factor(q) * mp.b[q];
    w.rebuild();
    return w;
}

WeightFunction WeightFunction::from_c_coeffs(std::vector<double> g) {
    WeightFunction w;
    w.g_ = std::move(g);
    if (w.g_.empty()) w.g_.assign(1, 0.0);
    w.rebuild();
    return w;
}

void WeightFunction::rebuild() {
    w_packed_.assign(g_.size(), Complex(0.0, 0.0));
    w_packed_[0] = Complex(1.0 + g_[0] * kInvSqrt2, 0.0);
    for (std::size_t q = 1; q < g_.size(); ++q) w_packed_[q] = Complex(g_[q], 0.0);
}

RawTrigSlice WeightFunction::w_slice() const {
    int K = m();
    RawTrigSlice s(std::max(K, 0));
    for (int k = 0; k <= K; ++k) {
        if (kernels::slot_is_cos(kernels::Grade::C, k))
            s.gamma[k] = w_packed_[k];
        else
            s.sigma[k] = w_packed_[k];
    }
    return s;
}

double WeightFunction::weight_min() const { return min_real(w_slice()); }

double WeightFunction::sup_abs_g() const {
    RawTrigSlice s = w_slice();
    s.gamma[0] -= 1.0;
    return sup_abs(s);
}

double WeightFunction::g_h_norm(int k) const {
    KahanSum s;
    for (std::size_t q = 0; q < g_.size(); ++q) {
        double w = std::pow(1.0 + q_freq(int(q)) * q_freq(int(q)), k);
        s.add(w * g_[q] * g_[q]);
    }
    return std::sqrt(s.value());
}

}  // namespace stratsim
