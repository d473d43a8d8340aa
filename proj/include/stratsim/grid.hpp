#pragma once

#include "stratsim/basis.hpp"

namespace stratsim {

struct Quadrature1D {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1,1].
Quadrature1D gauss_legendre(int n);

/// Real samples on a tensor grid: uniform x_j = 2 pi j / nx on the torus and
/// Gauss-Legendre y-nodes on [-1,1].  Values are stored row-major in y:
/// v[j*nx + i] = f(x_i, y_j).
struct GridField {
    int nx = 0, ny = 0;
    std::vector<double> xs;
    std::vector<double> ys, yw;
    std::vector<double> v;

    double& at(int i, int j) { return v[std::size_t(j) * nx + i]; }
    double at(int i, int j) const { return v[std::size_t(j) * nx + i]; }
};

GridField make_grid(int nx, int ny);

/// Grid sized so that transforms of truncation-m fields and quadratures of
/// their triple products are resolved: nx >= 3m+1 and an over-resolved
/// Gauss-Legendre rule in y.
GridField grid_for_truncation(int m);

/// Evaluate f on the grid (values overwritten, geometry shared).
GridField synthesize(const SpectralScalar& f, const GridField& grid);

/// Quadrature projection onto the family's modes up to truncation m.
/// Throws if the grid cannot resolve the requested truncation.
SpectralScalar analyze(const GridField& g, Family fam, int m);

}  // namespace stratsim
