#ifndef KDVEXP_TESTS_SUPPORT_HPP
#define KDVEXP_TESTS_SUPPORT_HPP

#include <cstdint>
#include <random>

#include <kdvexp/field.hpp>

namespace testsup {

using kdvexp::cplx;
using kdvexp::Grid;
using kdvexp::SpectralField;

// Zero-mean real field with conjugate-paired random coefficients on
// 1 <= |k| <= kmax.
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

// Random real samples in [-amp, amp].
inline kdvexp::RealField random_samples(const Grid& g, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-amp, amp);
    kdvexp::RealField f(g);
    for (double& v : f.v) v = U(rng);
    return f;
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

} // namespace testsup

#endif
