#ifndef KDVEXP_SPECTRAL_HPP
#define KDVEXP_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "field.hpp"

namespace kdvexp {

// ---------------------------------------------------------------------------
// Transforms.
//
// Coefficient convention: xi_k = (1/K) sum_a f(x_a) e^{-i k (2 pi/K) a} with
// both k and the sample index a running over {-K/2, ..., K/2-1}, so that
// f(x_a) = sum_k xi_k e^{i kappa_k x_a}. Samples are stored left to right
// over [-pi/L, pi/L), i.e. a = j - K/2; the index shift turns into the
// (-1)^k checkerboard applied around a standard transform.
// ---------------------------------------------------------------------------

inline SpectralField forward_transform(const Grid& g, const std::vector<cplx>& samples) {
    if (static_cast<int>(samples.size()) != g.size())
        throw GridMismatchError("forward_transform: sample count does not match grid size");
    SpectralField out(g);
    out.c = samples;
    g.plan().forward(out.c.data());
    const double inv_k = 1.0 / g.size();
    for (int i = 0; i < g.size(); ++i) {
        out.c[i] *= (i & 1) ? -inv_k : inv_k;
    }
    return out;
}

inline SpectralField forward_transform(const RealField& f) {
    std::vector<cplx> buf(f.v.begin(), f.v.end());
    return forward_transform(f.grid, buf);
}

// Point values allowing complex fields (no symmetry requirement).
inline std::vector<cplx> inverse_transform_complex(const SpectralField& f) {
    std::vector<cplx> buf(f.c);
    for (int i = 1; i < f.size(); i += 2) buf[i] = -buf[i];
    f.grid.plan().inverse(buf.data());
    return buf;
}

// Point values of a real field; rejects coefficients that are not
// conjugate-symmetric within rel_tol (relative to the largest coefficient;
// see is_real_tagged for why the default tolerates stepper roundoff).
inline RealField inverse_transform(const SpectralField& f, double rel_tol = 1e-10) {
    if (!is_real_tagged(f, rel_tol))
        throw SymmetryError("inverse_transform: coefficients are not conjugate-symmetric; real samples undefined");
    std::vector<cplx> buf = inverse_transform_complex(f);
    RealField out(f.grid);
    for (int i = 0; i < f.size(); ++i) out.v[i] = buf[i].real();
    return out;
}

// ---------------------------------------------------------------------------
// Diagonal (Fourier-multiplier) operators.
// ---------------------------------------------------------------------------

// Airy flow e^{-t dxxx}: multiplies mode k by e^{+i t kappa_k^3}. This is the
// solution operator of u_t + u_xxx = 0 over time t.
inline SpectralField propagate_airy(const SpectralField& f, double t,
                                    NyquistPolicy pol = NyquistPolicy::ZeroNyquist) {
    SpectralField out(f.grid);
    const int K = f.size();
    for (int i = 0; i < K; ++i) {
        if (i == K / 2 && pol == NyquistPolicy::ZeroNyquist) {
            out.c[i] = f.c[i];
            continue;
        }
        const double kap = f.grid.kappa_at_index(i);
        const double ang = t * kap * kap * kap;
        out.c[i] = f.c[i] * cplx(std::cos(ang), std::sin(ang));
    }
    return out;
}

// Twist operator e^{t (dxxx - alpha dx)}: multiplies mode k by
// e^{-i t (kappa_k^3 + alpha kappa_k)}. Note the sign convention is opposite
// to propagate_airy: propagate_shifted_airy(f, t, 0) == propagate_airy(f, -t).
inline SpectralField propagate_shifted_airy(const SpectralField& f, double t, double alpha,
                                            NyquistPolicy pol = NyquistPolicy::ZeroNyquist) {
    SpectralField out(f.grid);
    const int K = f.size();
    for (int i = 0; i < K; ++i) {
        if (i == K / 2 && pol == NyquistPolicy::ZeroNyquist) {
            out.c[i] = f.c[i];
            continue;
        }
        const double kap = f.grid.kappa_at_index(i);
        const double ang = -t * (kap * kap * kap + alpha * kap);
        out.c[i] = f.c[i] * cplx(std::cos(ang), std::sin(ang));
    }
    return out;
}

// d/dx: multiplies mode k by i*kappa_k. The zero mode is annihilated; the
// Nyquist mode is zeroed under the default policy.
inline SpectralField apply_derivative(const SpectralField& f,
                                      NyquistPolicy pol = NyquistPolicy::ZeroNyquist) {
    SpectralField out(f.grid);
    const int K = f.size();
    for (int i = 0; i < K; ++i) {
        if (i == K / 2 && pol == NyquistPolicy::ZeroNyquist) continue; // stays zero
        const double kap = f.grid.kappa_at_index(i);
        out.c[i] = f.c[i] * cplx(0.0, kap);
    }
    return out;
}

// Regularized antiderivative: multiplies mode k != 0 by 1/(i*kappa_k) and
// sends the zero mode to zero. Nyquist follows the policy.
inline SpectralField apply_inverse_derivative(const SpectralField& f,
                                              NyquistPolicy pol = NyquistPolicy::ZeroNyquist) {
    SpectralField out(f.grid);
    const int K = f.size();
    for (int i = 1; i < K; ++i) {
        if (i == K / 2 && pol == NyquistPolicy::ZeroNyquist) continue;
        const double kap = f.grid.kappa_at_index(i);
        out.c[i] = f.c[i] / cplx(0.0, kap);
    }
    return out;
}

namespace detail {

// Zero all modes with 3*|k| >= K (the classical 2/3 rule support).
inline void truncate_two_thirds(SpectralField& f) {
    const int K = f.size();
    for (int i = 0; i < K; ++i) {
        const int k = f.grid.mode_of_index(i);
        if (3 * std::abs(k) >= K) f.c[i] = cplx(0.0, 0.0);
    }
}

} // namespace detail

// Collocation product of two fields: inverse transform, multiply samples,
// forward transform. Equivalent to the mod-K circular convolution of the
// coefficients. With dealias set, both factors and the result are truncated
// to the 2/3-rule band, which removes every aliased pair.
inline SpectralField pointwise_product(const SpectralField& a, const SpectralField& b,
                                       bool dealias = false) {
    require_same_grid(a, b, "pointwise_product");
    const Grid& g = a.grid;
    SpectralField fa = a;
    SpectralField fb = b;
    if (dealias) {
        detail::truncate_two_thirds(fa);
        detail::truncate_two_thirds(fb);
    }
    std::vector<cplx> sa = inverse_transform_complex(fa);
    const std::vector<cplx> sb = inverse_transform_complex(fb);
    for (int i = 0; i < g.size(); ++i) sa[i] *= sb[i];
    SpectralField out = forward_transform(g, sa);
    if (dealias) detail::truncate_two_thirds(out);
    return out;
}

inline SpectralField pointwise_square(const SpectralField& f, bool dealias = false) {
    SpectralField fa = f;
    if (dealias) detail::truncate_two_thirds(fa);
    std::vector<cplx> s = inverse_transform_complex(fa);
    for (cplx& z : s) z *= z;
    SpectralField out = forward_transform(f.grid, s);
    if (dealias) detail::truncate_two_thirds(out);
    return out;
}

// Discrete Sobolev norm of order r:
//   ||xi||_r = sqrt(2 pi / L) * sqrt( sum_k (1 + kappa_k^2)^r |xi_k|^2 ),
// normalized so that r = 0 matches the continuum L^2 norm of the
// trigonometric interpolant (constant 1 on an L = 1 torus has norm
// sqrt(2 pi)).
inline double sobolev_norm(const SpectralField& f, int r) {
    if (r < 0) throw std::invalid_argument("sobolev_norm: order must be non-negative");
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double kap = f.grid.kappa_at_index(i);
        double w = 1.0;
        for (int p = 0; p < r; ++p) w *= 1.0 + kap * kap;
        acc += w * std::norm(f.c[i]);
    }
    return std::sqrt(2.0 * std::numbers::pi / f.grid.scale() * acc);
}

// Splits off the mean: returns (alpha, xi - alpha*delta_{k0}) where alpha is
// the real zero-mode value. Errors if the zero mode has a non-negligible
// imaginary part, since the mean of a real field must be real.
inline std::pair<double, SpectralField> split_mean(const SpectralField& f) {
    const double scale = std::max(1.0, max_abs_coeff(f));
    if (std::abs(f.c[0].imag()) > 1e-13 * scale)
        throw SymmetryError("split_mean: zero mode has a non-real mean");
    SpectralField rest = f;
    rest.c[0] = cplx(0.0, 0.0);
    return {f.c[0].real(), rest};
}

// Projection used on the schemes' quadratic increments: the zero mode is
// always excluded (the defining frequency sums skip k1 + k2 = 0), and the
// Nyquist mode is excluded under the default policy (non-dynamical mode).
inline void project_increment(SpectralField& f, NyquistPolicy pol) {
    f.c[0] = cplx(0.0, 0.0);
    if (pol == NyquistPolicy::ZeroNyquist) f.c[f.size() / 2] = cplx(0.0, 0.0);
}

} // namespace kdvexp

#endif
