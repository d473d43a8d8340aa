#include "stratsim/grid.hpp"

#include <stdexcept>

#include "stratsim/summation.hpp"

namespace stratsim {

Quadrature1D gauss_legendre(int n) {
    Quadrature1D q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.w[i] = w;
        q.w[n - 1 - i] = w;
    }
    return q;
}

GridField make_grid(int nx, int ny) {
    GridField g;
    g.nx = nx;
    g.ny = ny;
    g.xs.resize(nx);
    for (int i = 0; i < nx; ++i) g.xs[i] = 2.0 * kPi * i / nx;
    Quadrature1D q = gauss_legendre(ny);
    g.ys = q.x;
    g.yw = q.w;
    g.v.assign(std::size_t(nx) * ny, 0.0);
    return g;
}

GridField grid_for_truncation(int m) {
    return make_grid(std::max(8, 3 * m + 1), std::max(32, 12 * m + 16));
}

GridField synthesize(const SpectralScalar& f, const GridField& grid) {
    GridField out = grid;
    const int m = f.m();
    // Separable evaluation: per-band y-profiles, then the x-phases.
    std::vector<Complex> prof(std::size_t(2 * m + 1) * grid.ny, Complex(0.0, 0.0));
    for (int p = -m; p <= m; ++p)
        for (int j = 0; j < grid.ny; ++j) {
            Complex acc(0.0, 0.0);
            for (int q = f.q_lo(); q <= m; ++q) {
                double by = (f.family() == Family::Omega) ? eval_b(q, grid.ys[j]) : eval_c(q, grid.ys[j]);
                acc += f.at(p, q) * by;
            }
            prof[std::size_t(p + m) * grid.ny + j] = acc;
        }
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            Complex acc(0.0, 0.0);
            for (int p = -m; p <= m; ++p) acc += prof[std::size_t(p + m) * grid.ny + j] * eval_a(p, grid.xs[i]);
            out.at(i, j) = acc.real();
        }
    return out;
}

SpectralScalar analyze(const GridField& g, Family fam, int m) {
    if (g.nx < 2 * m + 1 || g.ny < 2 * (m + 1))
        throw std::invalid_argument("analyze: grid cannot resolve truncation m");
    SpectralScalar f(fam, m);
    const double dx = 2.0 * kPi / g.nx;
    // x-DFT per y-row, then Gauss-Legendre in y against the basis profiles.
    std::vector<Complex> hat(std::size_t(2 * m + 1) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int p = -m; p <= m; ++p) {
            Complex acc(0.0, 0.0);
            for (int i = 0; i < g.nx; ++i) acc += g.at(i, j) * std::conj(eval_a(p, g.xs[i]));
            hat[std::size_t(p + m) * g.ny + j] = acc * dx;
        }
    for (int p = -m; p <= m; ++p)
        for (int q = f.q_lo(); q <= m; ++q) {
            KahanSum re, im;
            for (int j = 0; j < g.ny; ++j) {
                double by = (fam == Family::Omega) ? eval_b(q, g.ys[j]) : eval_c(q, g.ys[j]);
                Complex term = hat[std::size_t(p + m) * g.ny + j] * (by * g.yw[j]);
                re.add(term.real());
                im.add(term.imag());
            }
            f.at(p, q) = Complex(re.value(), im.value());
        }
    return f;
}

}  // namespace stratsim
