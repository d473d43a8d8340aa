#include "stratsim/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace stratsim::kernels {

namespace {
std::atomic<bool> g_parallel{false};
}

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }
bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void mul_acc(Grade ga, const Complex* a, int Ka, Grade gb, const Complex* b, int Kb, Complex* acc) {
    for (int j = 0; j <= Ka; ++j) {
        const Complex za = a[j];
        if (za == Complex(0.0, 0.0)) continue;
        const bool ca = slot_is_cos(ga, j);
        for (int k = 0; k <= Kb; ++k) {
            const Complex half = 0.5 * (za * b[k]);
            const bool cb = slot_is_cos(gb, k);
            const int s = j + k;
            const int d = j > k ? j - k : k - j;
            if (ca && cb) {
                acc[s] += half;
                acc[d] += half;
            } else if (!ca && !cb) {
                acc[s] -= half;
                acc[d] += half;
            } else if (!ca) {  // sin_j * cos_k
                acc[s] += half;
                if (j > k)
                    acc[d] += half;
                else if (j < k)
                    acc[d] -= half;
            } else {  // cos_j * sin_k
                acc[s] += half;
                if (k > j)
                    acc[d] += half;
                else if (k < j)
                    acc[d] -= half;
            }
        }
    }
}

void abs2_acc(Grade ga, const Complex* a, int Ka, Complex* acc) {
    // |a|^2 = a * conj(a); same index algebra with b = conj(a), gb = ga.
    for (int j = 0; j <= Ka; ++j) {
        const Complex za = a[j];
        if (za == Complex(0.0, 0.0)) continue;
        const bool ca = slot_is_cos(ga, j);
        for (int k = 0; k <= Ka; ++k) {
            const Complex half = 0.5 * (za * std::conj(a[k]));
            const bool cb = slot_is_cos(ga, k);
            const int s = j + k;
            const int d = j > k ? j - k : k - j;
            if (ca && cb) {
                acc[s] += half;
                acc[d] += half;
            } else if (!ca && !cb) {
                acc[s] -= half;
                acc[d] += half;
            } else if (!ca) {
                acc[s] += half;
                if (j > k)
                    acc[d] += half;
                else if (j < k)
                    acc[d] -= half;
            } else {
                acc[s] += half;
                if (k > j)
                    acc[d] += half;
                else if (k < j)
                    acc[d] -= half;
            }
        }
    }
}

void ddy(Grade g, const Complex* z, int K, Complex* out) {
    for (int k = 0; k <= K; ++k) {
        double f = q_freq(k);
        out[k] = slot_is_cos(g, k) ? -f * z[k] : f * z[k];
    }
}

Complex integrate(Grade g, const Complex* z, int K) {
    Complex acc(0.0, 0.0);
    if (g == Grade::C) {
        acc = 2.0 * z[0];  // only the constant slot survives in grade C
    } else {
        for (int k = 1; k <= K; k += 2) {
            double s = (k % 4 == 1) ? 1.0 : -1.0;
            acc += z[k] * (4.0 * s / (k * kPi));
        }
    }
    return acc;
}

void read_coeffs(Grade g, const Complex* z, int K, Family fam, int m, Complex* out) {
    if (g != grade_of(fam)) throw std::invalid_argument("read_coeffs: grade does not match family");
    int q0 = q_min(fam);
    if (fam == Family::Varpi) out[0] = kSqrt2 * z[0];
    for (int q = std::max(1, q0); q <= m; ++q) out[q - q0] = (q <= K) ? z[q] : Complex(0.0, 0.0);
}

void band_of(const SpectralScalar& f, int p, Complex* z) {
    const int m = f.m();
    if (f.family() == Family::Omega) {
        z[0] = Complex(0.0, 0.0);
        for (int q = 1; q <= m; ++q) z[q] = f.at(p, q);
    } else {
        z[0] = f.at(p, 0) * kInvSqrt2;
        for (int q = 1; q <= m; ++q) z[q] = f.at(p, q);
    }
}

void fill_bands(const SpectralScalar& f, BandDeriv d, BandTable& out) {
    const int m = f.m();
    Grade g = grade_of(f.family());
    if (d == BandDeriv::Dy) g = flip(g);
    out.resize(g, m);
    for (int p = -m; p <= m; ++p) {
        Complex* z = out.band(p);
        switch (d) {
            case BandDeriv::None:
                band_of(f, p, z);
                break;
            case BandDeriv::Dx: {
                band_of(f, p, z);
                const Complex ip(0.0, double(p));
                for (int k = 0; k <= m; ++k) z[k] *= ip;
                break;
            }
            case BandDeriv::Dy: {
                // Mode-wise d/dy: b_q -> (-1)^q (q pi/2) c_q and
                // c_q -> (-1)^{q+1} (q pi/2) b_q; slot q keeps index q.
                z[0] = Complex(0.0, 0.0);
                if (f.family() == Family::Omega) {
                    for (int q = 1; q <= m; ++q) z[q] = dyb_factor(q) * f.at(p, q);
                } else {
                    for (int q = 1; q <= m; ++q) z[q] = dyc_factor(q) * f.at(p, q);
                }
                break;
            }
        }
    }
}

}  // namespace stratsim::kernels
