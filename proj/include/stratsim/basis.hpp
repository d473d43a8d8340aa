#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

namespace stratsim {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kHalfPi = kPi / 2.0;
inline const double kSqrt2Pi = std::sqrt(2.0 * kPi);
inline const double kSqrt2 = std::sqrt(2.0);
inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// The two product bases on T x [-1,1].
///   Omega:  omega_{p,q} = a_p(x) b_q(y), q >= 1.  b_q vanishes at y = +-1.
///   Varpi:  varpi_{p,q} = a_p(x) c_q(y), q >= 0.  d/dy c_q vanishes at y = +-1.
/// a_p(x) = exp(ipx)/sqrt(2 pi).  b_q is cos(q pi y/2) for odd q and
/// sin(q pi y/2) for even q; c_q swaps the two.  c_0 is normalized to
/// 1/sqrt(2) so that {c_q} is orthonormal on [-1,1].
enum class Family { Omega, Varpi };

struct ModeIndex {
    int p = 0;
    int q = 0;
};

inline int q_min(Family f) { return f == Family::Omega ? 1 : 0; }

/// q pi / 2, the vertical half-frequency of index q.
inline double q_freq(int q) { return q * kHalfPi; }

/// Eigenvalue of -Laplacian on either basis: p^2 + (q pi/2)^2.
inline double kappa_sq(int p, int q) {
    double qf = q_freq(q);
    return double(p) * double(p) + qf * qf;
}

/// d/dy b_q = (-1)^q (q pi/2) c_q.
inline double dyb_factor(int q) { return (q % 2 == 0) ? q_freq(q) : -q_freq(q); }
/// d/dy c_q = (-1)^{q+1} (q pi/2) b_q.
inline double dyc_factor(int q) { return (q % 2 == 0) ? -q_freq(q) : q_freq(q); }

double eval_b(int q, double y);
double eval_c(int q, double y);
Complex eval_a(int p, double x);
Complex eval_basis(Family fam, ModeIndex idx, double x, double y);

/// Coefficient array of a scalar field in one family at truncation m:
/// modes (p,q) with |p| <= m and q_min <= q <= m.  Real-valued fields
/// satisfy coeff(-p,q) = conj(coeff(p,q)).
class SpectralScalar {
  public:
    SpectralScalar() = default;
    SpectralScalar(Family fam, int m)
        : family_(fam), m_(m), q0_(q_min(fam)), nq_(m + 1 - q0_), c_(std::size_t(2 * m + 1) * nq_) {}

    Family family() const { return family_; }
    int m() const { return m_; }
    int q_lo() const { return q0_; }
    int n_q() const { return nq_; }
    std::size_t size() const { return c_.size(); }

    bool has_mode(int p, int q) const { return p >= -m_ && p <= m_ && q >= q0_ && q <= m_; }

    Complex& at(int p, int q) {
        assert(has_mode(p, q));
        return c_[idx(p, q)];
    }
    const Complex& at(int p, int q) const {
        assert(has_mode(p, q));
        return c_[idx(p, q)];
    }

    const std::vector<Complex>& raw() const { return c_; }
    std::vector<Complex>& raw() { return c_; }

    void set_zero() { std::fill(c_.begin(), c_.end(), Complex(0.0, 0.0)); }

    /// Overwrite negative-p modes with the conjugates of the positive-p ones.
    void mirror_from_nonnegative() {
        for (int p = 1; p <= m_; ++p)
            for (int q = q0_; q <= m_; ++q) at(-p, q) = std::conj(at(p, q));
    }

    double max_reality_violation() const {
        double worst = 0.0;
        for (int p = 0; p <= m_; ++p)
            for (int q = q0_; q <= m_; ++q) {
                Complex d = at(-p, q) - std::conj(at(p, q));
                worst = std::max(worst, std::abs(d));
            }
        return worst;
    }

    SpectralScalar& operator+=(const SpectralScalar& o) {
        assert(compatible(o));
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    SpectralScalar& operator-=(const SpectralScalar& o) {
        assert(compatible(o));
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    SpectralScalar& operator*=(double a) {
        for (auto& z : c_) z *= a;
        return *this;
    }
    /// this += a * o
    void axpy(double a, const SpectralScalar& o) {
        assert(compatible(o));
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * o.c_[i];
    }

    bool compatible(const SpectralScalar& o) const { return family_ == o.family_ && m_ == o.m_; }

    /// Single-mode field: amp at (p,q) plus the conjugate at (-p,q).
    static SpectralScalar mode(Family fam, int m, int p, int q, Complex amp) {
        SpectralScalar f(fam, m);
        f.at(p, q) = amp;
        if (p != 0) f.at(-p, q) = std::conj(amp);
        return f;
    }

  private:
    std::size_t idx(int p, int q) const { return std::size_t(p + m_) * nq_ + std::size_t(q - q0_); }

    Family family_ = Family::Omega;
    int m_ = 0;
    int q0_ = 1;
    int nq_ = 0;
    std::vector<Complex> c_;
};

/// Pointwise evaluation by direct summation (diagnostics only).
Complex eval(const SpectralScalar& f, double x, double y);

}  // namespace stratsim
