// Timing comparison of the advection kernels: dense-slice reference vs. the
// packed graded kernel, serial and OpenMP.

#include <chrono>
#include <cstdio>

#include "stratsim/dynamics.hpp"
#include "stratsim/prng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace stratsim;

namespace {

StateVector random_state(int m, std::uint64_t seed) {
    CounterRng rng(seed);
    StateVector s(m);
    SpectralScalar psi(Family::Omega, m);
    for (int p = 0; p <= m; ++p)
        for (int q = 1; q <= m; ++q) {
            double mag = std::pow(1.0 + kappa_sq(p, q), -1.0);
            s.rho.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
            psi.at(p, q) = std::polar(mag, 2.0 * kPi * rng.next_double());
        }
    s.rho.mirror_from_nonnegative();
    psi.mirror_from_nonnegative();
    s.u1 = dy(psi);
    s.u1 *= -1.0;
    s.u2 = dx(psi);
    return s;
}

template <typename F>
double time_ms(F&& f, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int reps = (argc > 1) ? std::atoi(argv[1]) : 20;
    std::printf("%-6s %-10s %-14s %-14s %-14s\n", "m", "ref [ms]", "fast ser [ms]", "fast omp [ms]",
                "speedup omp");
    for (int m : {8, 16, 24, 32}) {
        StateVector s = random_state(m, 42);
        VelocityField v = s.velocity();
        double sink = 0.0;

        kernels::set_parallel(false);
        double t_ref = time_ms([&] { sink += advect_reference(v, s.rho).at(1, 1).real(); },
                               std::max(1, reps / 4));
        double t_fast = time_ms([&] { sink += advect(v, s.rho).at(1, 1).real(); }, reps);

        kernels::set_parallel(true);
        double t_omp = time_ms([&] { sink += advect(v, s.rho).at(1, 1).real(); }, reps);
        kernels::set_parallel(false);

        std::printf("%-6d %-10.3f %-14.4f %-14.4f %-14.2f\n", m, t_ref, t_fast, t_omp, t_fast / t_omp);
        if (sink == 0.12345) std::printf("~\n");
    }
#ifdef _OPENMP
    std::printf("omp max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif
    return 0;
}
