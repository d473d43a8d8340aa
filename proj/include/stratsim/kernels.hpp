#pragma once

#include "stratsim/basis.hpp"

namespace stratsim::kernels {

/// Packed graded y-slices.  Every profile that arises from the two bases is
/// one of two closed parity classes:
///   B: cos at odd k, sin at even k   (the b_q profiles)
///   C: sin at odd k, cos at even k   (the c_q profiles; k=0 is the constant)
/// Products obey B*B = C, B*C = B, C*C = C, and projection onto b_q / c_q is
/// a slot read-off.  The dense RawTrigSlice algebra is the reference
/// implementation for these kernels.
enum class Grade : unsigned char { C = 0, B = 1 };

inline Grade product_grade(Grade a, Grade b) {
    return static_cast<Grade>(static_cast<unsigned char>(a) ^ static_cast<unsigned char>(b));
}

inline Grade flip(Grade g) { return static_cast<Grade>(static_cast<unsigned char>(g) ^ 1u); }

inline Grade grade_of(Family f) { return f == Family::Omega ? Grade::B : Grade::C; }

inline bool slot_is_cos(Grade g, int k) {
    return (g == Grade::B) ? (k % 2 == 1) : (k % 2 == 0);
}

/// acc += a*b in the graded trig algebra; acc has grade product_grade(ga,gb)
/// and must have room for Ka+Kb+1 slots.
void mul_acc(Grade ga, const Complex* a, int Ka, Grade gb, const Complex* b, int Kb, Complex* acc);

/// acc += |a|^2 (a times its own conjugate); acc grade is always C.
void abs2_acc(Grade ga, const Complex* a, int Ka, Complex* acc);

/// out[k] = (d/dy factor) * z[k]; the result has grade flip(g).
void ddy(Grade g, const Complex* z, int K, Complex* out);

/// Closed-form integral over [-1,1] of a graded slice.
Complex integrate(Grade g, const Complex* z, int K);

/// Orthonormal-basis coefficients of a graded slice, q = q_min..m.
/// Requires g == grade_of(fam).  For Varpi, coeff(0) = sqrt(2) z[0].
void read_coeffs(Grade g, const Complex* z, int K, Family fam, int m, Complex* out);

/// Band p of a coefficient field as a packed graded slice of length m+1.
void band_of(const SpectralScalar& f, int p, Complex* z);

/// Toggle OpenMP parallelism in the band-convolution kernels.  Results are
/// schedule-independent: each output band is reduced by a single thread in a
/// fixed order, so serial and parallel runs agree bitwise.
void set_parallel(bool on);
bool parallel_enabled();

/// All bands p = -m..m of a field, packed contiguously (stride m+1).
struct BandTable {
    Grade g = Grade::B;
    int m = 0;
    std::vector<Complex> z;

    void resize(Grade grade, int m_) {
        g = grade;
        m = m_;
        z.assign(std::size_t(2 * m_ + 1) * (m_ + 1), Complex(0.0, 0.0));
    }
    Complex* band(int p) { return z.data() + std::size_t(p + m) * (m + 1); }
    const Complex* band(int p) const { return z.data() + std::size_t(p + m) * (m + 1); }
};

/// Fill a band table from a field, optionally applying d/dx (times ip) or
/// d/dy (family flip) mode-wise.
enum class BandDeriv { None, Dx, Dy };
void fill_bands(const SpectralScalar& f, BandDeriv d, BandTable& out);

}  // namespace stratsim::kernels
