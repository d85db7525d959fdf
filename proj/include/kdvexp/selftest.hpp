#ifndef KDVEXP_SELFTEST_HPP
#define KDVEXP_SELFTEST_HPP

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"

namespace kdvexp {

// Fast built-in verification: the frequency identity behind the closed-form
// integrals, transform and propagator invariants, twist equivalence, and
// stepper-vs-oracle agreement on small grids. Prints one line per check;
// returns true when everything passed.

namespace detail {

inline SpectralField random_band_limited(const Grid& g, int kmax, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SpectralField f(g);
    for (int k = 1; k <= kmax; ++k) {
        const cplx z = amp * cplx(U(rng), U(rng));
        f.set_coeff(k, z);
        f.set_coeff(-k, std::conj(z));
    }
    return f;
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

} // namespace detail

inline bool run_selftest(std::ostream& os) {
    bool all_ok = true;
    auto report = [&](const std::string& name, double measured, double tol) {
        const bool ok = measured <= tol;
        all_ok = all_ok && ok;
        os << (ok ? "ok   " : "FAIL ") << std::left << std::setw(44) << name << std::scientific
           << std::setprecision(2) << " max " << measured << "  (tol " << tol << ")\n";
    };

    // Integer cube identity that collapses the oscillatory integrals:
    // k1^3 + k2^3 - (k1+k2)^3 = -3 k1 k2 (k1+k2), exhaustively on a box.
    {
        long worst = 0;
        for (std::int64_t k1 = -400; k1 <= 400; ++k1)
            for (std::int64_t k2 = -400; k2 <= 400; ++k2) {
                const std::int64_t m = k1 + k2;
                const std::int64_t lhs = k1 * k1 * k1 + k2 * k2 * k2 - m * m * m;
                if (lhs != -3 * k1 * k2 * m) ++worst;
            }
        report("frequency identity (|k| <= 400)", static_cast<double>(worst), 0.0);
    }

    // Transform round trip, power-of-two and Bluestein sizes.
    {
        double worst = 0.0;
        int idx = 0;
        for (int K : {8, 24, 32}) {
            Grid g(K, 0.7);
            SpectralField f = detail::random_band_limited(g, K / 2 - 1, 1.0, 11 + idx++);
            const RealField r = inverse_transform(f);
            worst = std::max(worst, detail::max_coeff_diff(f, forward_transform(r)));
        }
        report("transform round trip (K = 8, 24, 32)", worst, 1e-13);
    }

    // Parseval: the r = 0 norm equals the quadrature L2 norm of the samples.
    {
        Grid g(32, 1.3);
        SpectralField f = detail::random_band_limited(g, 15, 0.8, 23);
        const RealField r = inverse_transform(f);
        double sum = 0.0;
        for (double v : r.v) sum += v * v;
        const double quadr = std::sqrt(g.spacing() * sum);
        report("Parseval (K = 32)", std::abs(quadr - sobolev_norm(f, 0)), 1e-13);
    }

    // Propagator isometry and group property.
    {
        Grid g(32, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            SpectralField f = detail::random_band_limited(g, 15, 1.0, 100 + trial);
            const double t = 0.123 + 0.371 * trial;
            for (int r = 0; r <= 2; ++r)
                worst = std::max(worst, std::abs(sobolev_norm(propagate_airy(f, t), r) - sobolev_norm(f, r)));
            const SpectralField once = propagate_airy(propagate_airy(f, t), 0.77);
            worst = std::max(worst, detail::max_coeff_diff(once, propagate_airy(f, t + 0.77)));
            worst = std::max(worst, detail::max_coeff_diff(f, propagate_airy(propagate_airy(f, t), -t)));
        }
        // Two-hop composition carries phase roundoff ~ kappa^3 t eps (~1e-11
        // at |kappa| = 15, t ~ 4), so the bound sits above that floor.
        report("propagator isometry/composition", worst, 5e-11);
    }

    // Collocation square against the explicit aliased convolution.
    {
        Grid g(32, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            SpectralField f = detail::random_band_limited(g, 15, 0.5, 200 + trial);
            worst = std::max(worst, detail::max_coeff_diff(pointwise_square(f),
                                                           direct_convolution_square(f, true)));
        }
        report("pointwise square vs direct convolution", worst, 1e-13);
    }

    // Twisting the state, stepping, untwisting must match the plain step.
    {
        Grid g(32, 1.0);
        double worst = 0.0;
        for (double tn : {0.0, 0.37}) {
            for (int trial = 0; trial < 5; ++trial) {
                SpectralField u = detail::random_band_limited(g, 8, 0.1, 300 + trial);
                const SpectralField v = propagate_shifted_airy(u, tn, 0.0);
                const SpectralField u1a = step_expint1(u, 1e-2);
                const SpectralField u1b = propagate_shifted_airy(
                    step_expint1_twisted(v, tn, 1e-2), -(tn + 1e-2), 0.0);
                worst = std::max(worst, detail::max_coeff_diff(u1a, u1b));
                const SpectralField u2a = step_expint2(u, 1e-2);
                const SpectralField u2b = propagate_shifted_airy(
                    step_expint2_twisted(v, tn, 1e-2), -(tn + 1e-2), 0.0);
                worst = std::max(worst, detail::max_coeff_diff(u2a, u2b));
            }
        }
        report("twist equivalence (both orders)", worst, 1e-12);
    }

    // Stepper vs closed-form and quadrature oracles (band-limited data).
    {
        Grid g(32, 1.0);
        double worst1 = 0.0, worstq = 0.0, worst2 = 0.0;
        for (double tn : {0.0, 0.37}) {
            for (double tau : {1e-2, 1e-3}) {
                for (int trial = 0; trial < 10; ++trial) {
                    SpectralField u = detail::random_band_limited(g, 8, 0.1, 400 + trial);
                    const SpectralField v = propagate_shifted_airy(u, tn, 0.0);
                    const SpectralField vo1 = oracle_first_order_step(v, tn, tau);
                    const SpectralField voq = oracle_quadrature_step(v, tn, tau, 1e-12);
                    const SpectralField vo2 = oracle_second_order_step(v, tn, tau);
                    const SpectralField vs1 = propagate_shifted_airy(step_expint1(u, tau), tn + tau, 0.0);
                    const SpectralField vs2 = propagate_shifted_airy(step_expint2(u, tau), tn + tau, 0.0);
                    worst1 = std::max(worst1, detail::max_coeff_diff(vs1, vo1));
                    worstq = std::max(worstq, detail::max_coeff_diff(vo1, voq));
                    worst2 = std::max(worst2, detail::max_coeff_diff(vs2, vo2));
                }
            }
        }
        report("first-order step vs closed-form oracle", worst1, 1e-10);
        report("closed-form vs quadrature oracle", worstq, 1e-10);
        report("second-order step vs closed-form oracle", worst2, 1e-10);
    }

    // Conservation and realness over a short evolution.
    {
        Grid g(32, 1.0);
        SpectralField u = detail::random_band_limited(g, 10, 0.2, 500);
        double worst_mean = 0.0, worst_sym = 0.0;
        for (int n = 0; n < 200; ++n) {
            u = (n % 2 == 0) ? step_expint1(u, 5e-3) : step_expint2(u, 5e-3);
            worst_mean = std::max(worst_mean, std::abs(u.c[0]));
            worst_sym = std::max(worst_sym, hermitian_defect(u));
        }
        report("zero-mode conservation (200 steps)", worst_mean, 1e-14);
        report("realness preservation (200 steps)", worst_sym, 1e-12);
    }

    os << (all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES detected\n");
    return all_ok;
}

} // namespace kdvexp

#endif
