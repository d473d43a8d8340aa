#include "stratsim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "stratsim/grid.hpp"
#include "stratsim/summation.hpp"

namespace stratsim {

namespace {

double composite_gl(const std::function<double(double)>& f, double a, double b, int panels,
                    const Quadrature1D& rule) {
    KahanSum s;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < rule.x.size(); ++i)
            s.add(0.5 * h * rule.w[i] * f(mid + 0.5 * h * rule.x[i]));
    }
    return s.value();
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    static const Quadrature1D rule = gauss_legendre(16);
    double prev = composite_gl(f, a, b, 1, rule);
    for (int panels = 2; panels <= 1 << 14; panels *= 2) {
        double cur = composite_gl(f, a, b, panels, rule);
        double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw std::runtime_error("integrate_adaptive: no convergence");
}

}  // namespace stratsim
