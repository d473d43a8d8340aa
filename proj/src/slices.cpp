#include "stratsim/slices.hpp"

#include <stdexcept>

namespace stratsim {

Complex RawTrigSlice::eval(double y) const {
    Complex acc = gamma[0];
    for (int k = 1; k <= K; ++k) {
        double a = q_freq(k) * y;
        acc += gamma[k] * std::cos(a) + sigma[k] * std::sin(a);
    }
    return acc;
}

RawTrigSlice multiply_slices(const RawTrigSlice& u, const RawTrigSlice& v) {
    RawTrigSlice out(u.K + v.K);
    for (int j = 0; j <= u.K; ++j) {
        const Complex gj = u.gamma[j];
        const Complex sj = (j >= 1) ? u.sigma[j] : Complex(0.0, 0.0);
        for (int k = 0; k <= v.K; ++k) {
            const Complex gk = v.gamma[k];
            const Complex sk = (k >= 1) ? v.sigma[k] : Complex(0.0, 0.0);
            const int s = j + k;
            const int d = std::abs(j - k);
            // cos cos = (cos(j-k) + cos(j+k))/2, sin sin = (cos(j-k) - cos(j+k))/2
            out.gamma[s] += 0.5 * (gj * gk - sj * sk);
            out.gamma[d] += 0.5 * (gj * gk + sj * sk);
            // sin_j cos_k = (sin(j+k) + sin(j-k))/2, cos_j sin_k symmetric
            out.sigma[s] += 0.5 * (sj * gk + gj * sk);
            if (j != k) {
                Complex cross = (j > k) ? (sj * gk - gj * sk) : (gj * sk - sj * gk);
                out.sigma[d] += 0.5 * cross;
            }
        }
    }
    return out;
}

Complex integrate_slice(const RawTrigSlice& u) {
    // int_{-1}^{1} cos(k pi y/2) dy = 2 delta_{k0} + (4/(k pi)) sin(k pi/2).
    Complex acc = 2.0 * u.gamma[0];
    for (int k = 1; k <= u.K; k += 2) {
        double s = (k % 4 == 1) ? 1.0 : -1.0;
        acc += u.gamma[k] * (4.0 * s / (k * kPi));
    }
    return acc;
}

Complex inner_product_with_basis(const RawTrigSlice& u, Family fam, int q) {
    if (q < q_min(fam)) throw std::invalid_argument("inner_product_with_basis: q invalid for family");
    return integrate_slice(multiply_slices(u, basis_slice(fam, q)));
}

RawTrigSlice to_raw_trig(const SpectralScalar& f, int p) {
    if (p < -f.m() || p > f.m()) throw std::invalid_argument("to_raw_trig: |p| > m");
    RawTrigSlice out(f.m());
    if (f.family() == Family::Omega) {
        for (int q = 1; q <= f.m(); ++q) {
            if (q % 2 == 1)
                out.gamma[q] = f.at(p, q);
            else
                out.sigma[q] = f.at(p, q);
        }
    } else {
        out.gamma[0] = f.at(p, 0) * kInvSqrt2;
        for (int q = 1; q <= f.m(); ++q) {
            if (q % 2 == 1)
                out.sigma[q] = f.at(p, q);
            else
                out.gamma[q] = f.at(p, q);
        }
    }
    return out;
}

RawTrigSlice basis_slice(Family fam, int q) {
    if (q < q_min(fam)) throw std::invalid_argument("basis_slice: q invalid for family");
    RawTrigSlice out(std::max(q, 1));
    if (fam == Family::Omega) {
        (q % 2 == 1 ? out.gamma[q] : out.sigma[q]) = 1.0;
    } else if (q == 0) {
        out.gamma[0] = kInvSqrt2;
    } else {
        (q % 2 == 1 ? out.sigma[q] : out.gamma[q]) = 1.0;
    }
    return out;
}

RawTrigSlice ddy_slice(const RawTrigSlice& u) {
    RawTrigSlice out(u.K);
    for (int k = 1; k <= u.K; ++k) {
        double f = q_freq(k);
        out.sigma[k] = -f * u.gamma[k];
        out.gamma[k] = f * u.sigma[k];
    }
    return out;
}

RawTrigSlice conj_slice(const RawTrigSlice& u) {
    RawTrigSlice out(u.K);
    for (int k = 0; k <= u.K; ++k) {
        out.gamma[k] = std::conj(u.gamma[k]);
        out.sigma[k] = std::conj(u.sigma[k]);
    }
    return out;
}

void add_scaled(RawTrigSlice& dst, const RawTrigSlice& u, Complex a) {
    if (u.K > dst.K) {
        dst.gamma.resize(u.K + 1);
        dst.sigma.resize(u.K + 1);
        dst.K = u.K;
    }
    for (int k = 0; k <= u.K; ++k) {
        dst.gamma[k] += a * u.gamma[k];
        dst.sigma[k] += a * u.sigma[k];
    }
}

}  // namespace stratsim
