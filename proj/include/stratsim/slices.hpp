#pragma once

#include "stratsim/basis.hpp"

namespace stratsim {

/// Raw trigonometric representation of a y-profile on [-1,1]:
///   u(y) = sum_k gamma[k] cos(k pi y/2) + sum_k sigma[k] sin(k pi y/2).
/// Products of two such profiles are again of this form with index sums, so
/// nonlinear terms and inner products against b_q / c_q are exact here.
/// Amplitudes are complex so a slice can hold one x-band of a complex
/// coefficient field; real profiles simply carry zero imaginary parts.
struct RawTrigSlice {
    int K = 0;
    std::vector<Complex> gamma;  // gamma[k], k = 0..K
    std::vector<Complex> sigma;  // sigma[k], k = 1..K; sigma[0] stays zero

    RawTrigSlice() : gamma(1), sigma(1) {}
    explicit RawTrigSlice(int K_) : K(K_), gamma(std::size_t(K_) + 1), sigma(std::size_t(K_) + 1) {}

    Complex eval(double y) const;
};

/// Exact product via product-to-sum identities; output K = Ku + Kv.
RawTrigSlice multiply_slices(const RawTrigSlice& u, const RawTrigSlice& v);

/// Closed-form integral over [-1,1]; sin terms contribute nothing.
Complex integrate_slice(const RawTrigSlice& u);

/// Exact integral of u against b_q (Omega) or c_q (Varpi) over [-1,1].
Complex inner_product_with_basis(const RawTrigSlice& u, Family fam, int q);

/// The y-profile of x-band p of a coefficient field:
/// sum_q coeff(p,q) b_q(y) (or c_q).  Odd q of b maps to cos, even q to sin,
/// reversed for c; c_0 lands on cos_0 with amplitude coeff/sqrt(2).
RawTrigSlice to_raw_trig(const SpectralScalar& f, int p);

/// Slice of a single basis profile b_q or c_q.
RawTrigSlice basis_slice(Family fam, int q);

/// Termwise d/dy; cos_k -> -(k pi/2) sin_k, sin_k -> (k pi/2) cos_k.
RawTrigSlice ddy_slice(const RawTrigSlice& u);

RawTrigSlice conj_slice(const RawTrigSlice& u);

void add_scaled(RawTrigSlice& dst, const RawTrigSlice& u, Complex a);

}  // namespace stratsim
