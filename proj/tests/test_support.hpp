#pragma once

// Shared helpers for the test suites: random fields, quadrature oracles, a
// dense least-squares fit, a small matrix-exponential series, and the
// finite-difference Poisson oracle for the Leray projection.

#include <cmath>
#include <vector>

#include "stratsim/dynamics.hpp"
#include "stratsim/grid.hpp"
#include "stratsim/prng.hpp"

namespace stratsim::test {

inline SpectralScalar random_scalar(Family fam, int m, CounterRng& rng, double slope = 1.0) {
    SpectralScalar f(fam, m);
    for (int p = 0; p <= m; ++p)
        for (int q = f.q_lo(); q <= m; ++q) {
            double mag = std::pow(1.0 + kappa_sq(p, q), -0.5 * slope);
            if (p == 0)
                f.at(0, q) = Complex(mag * rng.sign(), 0.0);
            else
                f.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
        }
    f.mirror_from_nonnegative();
    return f;
}

inline VelocityField random_divfree_velocity(int m, CounterRng& rng, double slope = 1.0) {
    SpectralScalar psi = random_scalar(Family::Omega, m, rng, slope);
    VelocityField v(m);
    v.u1 = dy(psi);
    v.u1 *= -1.0;
    v.u2 = dx(psi);
    return v;
}

inline StateVector random_state(int m, std::uint64_t seed, double amp, double slope = 1.0) {
    CounterRng rng(seed);
    StateVector s(m);
    s.rho = random_scalar(Family::Omega, m, rng, slope);
    VelocityField v = random_divfree_velocity(m, rng, slope);
    s.u1 = v.u1;
    s.u2 = v.u2;
    s.rho *= amp;
    s.u1 *= amp;
    s.u2 *= amp;
    return s;
}

inline double max_coeff_diff(const SpectralScalar& a, const SpectralScalar& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
    return worst;
}

/// Gauss-Legendre quadrature of f over [-1,1].
template <typename F>
double gl_integrate(F&& f, int n = 64) {
    Quadrature1D q = gauss_legendre(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += q.w[i] * f(q.x[i]);
    return acc;
}

/// Solve the (small, dense) normal equations A x = b by Gaussian elimination
/// with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = int(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int k = r + 1; k < n; ++k) acc -= A[r][k] * x[k];
        x[r] = acc / A[r][r];
    }
    return x;
}

/// exp(A) of an n x n matrix by plain series summation (oracle only).
inline std::vector<double> matrix_exp_series(const std::vector<double>& A, int n, int terms = 80) {
    std::vector<double> out(n * n, 0.0), term(n * n, 0.0), tmp(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        out[i * n + i] = 1.0;
        term[i * n + i] = 1.0;
    }
    for (int k = 1; k <= terms; ++k) {
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) tmp[i * n + j] += term[i * n + l] * A[l * n + j];
        for (int i = 0; i < n * n; ++i) {
            term[i] = tmp[i] / k;
            out[i] += term[i];
        }
    }
    return out;
}

/// Finite-difference Poisson oracle for the Leray projection: solves
/// (d_yy - p^2) phi_p = (div v)_p per x-band on a uniform y-grid with the
/// Neumann condition d_y phi = -u2 at the walls, and Richardson-extrapolates
/// two grids.  Returns max abs deviation from the given exact projection at
/// the coarse nodes.
inline double leray_fd_oracle_error(const VelocityField& v, const VelocityField& exact, int ny_coarse = 513) {
    const int m = v.m();
    double worst = 0.0;
    for (int p = -m; p <= m; ++p) {
        if (p == 0) continue;  // p = 0 divergence content vanishes identically
        auto solve_band = [&](int ny, std::vector<Complex>& u1n, std::vector<Complex>& u2n,
                              std::vector<double>& ygrid) {
            const double h = 2.0 / (ny - 1);
            ygrid.resize(ny);
            std::vector<Complex> u1(ny), u2(ny), d(ny);
            for (int j = 0; j < ny; ++j) {
                double y = -1.0 + j * h;
                ygrid[j] = y;
                Complex a1(0, 0), a2(0, 0);
                for (int q = 0; q <= m; ++q) a1 += v.u1.at(p, q) * eval_c(q, y);
                for (int q = 1; q <= m; ++q) a2 += v.u2.at(p, q) * eval_b(q, y);
                u1[j] = a1;
                u2[j] = a2;
            }
            const Complex ip(0.0, double(p));
            for (int j = 0; j < ny; ++j) {
                Complex dy_u2 = (j == 0)        ? (u2[1] - u2[0]) / h
                                : (j == ny - 1) ? (u2[ny - 1] - u2[ny - 2]) / h
                                                : (u2[j + 1] - u2[j - 1]) / (2.0 * h);
                d[j] = ip * u1[j] + dy_u2;
            }
            // tridiagonal solve with ghost-node Neumann closure
            std::vector<Complex> phi(ny), diag(ny), rhs(ny), upper(ny), lower(ny);
            const double p2 = double(p) * p;
            for (int j = 0; j < ny; ++j) {
                diag[j] = -2.0 / (h * h) - p2;
                upper[j] = 1.0 / (h * h);
                lower[j] = 1.0 / (h * h);
                rhs[j] = -d[j];  // (-Delta) phi = div v, so Delta phi = -div v
            }
            // d_y phi(+-1) = -u2(+-1) = 0 on the walls (u2 vanishes there)
            upper[0] = 2.0 / (h * h);
            lower[ny - 1] = 2.0 / (h * h);
            for (int j = 1; j < ny; ++j) {
                Complex f = lower[j] / diag[j - 1];
                diag[j] -= f * upper[j - 1];
                rhs[j] -= f * rhs[j - 1];
            }
            phi[ny - 1] = rhs[ny - 1] / diag[ny - 1];
            for (int j = ny - 2; j >= 0; --j) phi[j] = (rhs[j] - upper[j] * phi[j + 1]) / diag[j];

            u1n.resize(ny);
            u2n.resize(ny);
            for (int j = 0; j < ny; ++j) {
                Complex dphi = (j == 0)        ? (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)
                               : (j == ny - 1) ? (3.0 * phi[ny - 1] - 4.0 * phi[ny - 2] + phi[ny - 3]) / (2.0 * h)
                                               : (phi[j + 1] - phi[j - 1]) / (2.0 * h);
                u1n[j] = u1[j] + ip * phi[j];
                u2n[j] = u2[j] + dphi;
            }
        };
        std::vector<Complex> c1, c2, f1, f2;
        std::vector<double> yc, yf;
        solve_band(ny_coarse, c1, c2, yc);
        solve_band(2 * (ny_coarse - 1) + 1, f1, f2, yf);
        for (int j = 0; j < ny_coarse; ++j) {
            Complex r1 = (4.0 * f1[2 * j] - c1[j]) / 3.0;
            Complex r2 = (4.0 * f2[2 * j] - c2[j]) / 3.0;
            Complex e1(0, 0), e2(0, 0);
            for (int q = 0; q <= m; ++q) e1 += exact.u1.at(p, q) * eval_c(q, yc[j]);
            for (int q = 1; q <= m; ++q) e2 += exact.u2.at(p, q) * eval_b(q, yc[j]);
            worst = std::max({worst, std::abs(r1 - e1), std::abs(r2 - e2)});
        }
    }
    // p = 0 band: projection must act as the identity
    for (int q = 0; q <= m; ++q)
        worst = std::max(worst, std::abs(v.u1.at(0, q) - exact.u1.at(0, q)));
    return worst;
}

}  // namespace stratsim::test
