#include "stratsim/basis.hpp"

#include <stdexcept>

namespace stratsim {

double eval_b(int q, double y) {
    assert(q >= 1);
    double a = q_freq(q) * y;
    return (q % 2 == 1) ? std::cos(a) : std::sin(a);
}

double eval_c(int q, double y) {
    assert(q >= 0);
    if (q == 0) return kInvSqrt2;
    double a = q_freq(q) * y;
    return (q % 2 == 1) ? std::sin(a) : std::cos(a);
}

Complex eval_a(int p, double x) {
    return std::polar(1.0 / kSqrt2Pi, p * x);
}

Complex eval_basis(Family fam, ModeIndex idx, double x, double y) {
    if (idx.q < q_min(fam)) throw std::invalid_argument("eval_basis: q out of range for family");
    double prof = (fam == Family::Omega) ? eval_b(idx.q, y) : eval_c(idx.q, y);
    return eval_a(idx.p, x) * prof;
}

Complex eval(const SpectralScalar& f, double x, double y) {
    Complex acc(0.0, 0.0);
    for (int p = -f.m(); p <= f.m(); ++p) {
        Complex prof(0.0, 0.0);
        for (int q = f.q_lo(); q <= f.m(); ++q) {
            double by = (f.family() == Family::Omega) ? eval_b(q, y) : eval_c(q, y);
            prof += f.at(p, q) * by;
        }
        acc += prof * eval_a(p, x);
    }
    return acc;
}

}  // namespace stratsim
