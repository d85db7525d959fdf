#ifndef KDVEXP_FFT_HPP
#define KDVEXP_FFT_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kdvexp {
namespace detail {

using cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Unnormalized complex DFT engine. Power-of-two sizes run an iterative
// radix-2 Cooley-Tukey with precomputed bit-reversal and twiddle tables;
// other sizes fall back to Bluestein's chirp-z algorithm on top of an
// internal power-of-two plan. Plans are immutable after construction and
// therefore safe to share between threads.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("FftPlan: size must be positive");
        if (is_pow2(n_)) {
            build_pow2_tables();
        } else {
            build_bluestein_tables();
        }
    }

    int size() const { return n_; }

    // In-place forward transform: X_k = sum_j x_j exp(-2*pi*i*j*k/n).
    void forward(cplx* x) const {
        if (inner_) bluestein(x);
        else radix2(x, tw_fwd_.data());
    }

    // In-place unscaled inverse: x_j = sum_k X_k exp(+2*pi*i*j*k/n).
    void inverse(cplx* x) const {
        if (inner_) {
            // Inverse via conjugation around the forward transform.
            for (int i = 0; i < n_; ++i) x[i] = std::conj(x[i]);
            bluestein(x);
            for (int i = 0; i < n_; ++i) x[i] = std::conj(x[i]);
        } else {
            radix2(x, tw_inv_.data());
        }
    }

private:
    int n_;
    // Radix-2 tables (power-of-two sizes).
    std::vector<int> bitrev_;
    std::vector<cplx> tw_fwd_; // stage-packed e^{-2 pi i k/len}
    std::vector<cplx> tw_inv_;
    // Bluestein tables (other sizes).
    std::unique_ptr<FftPlan> inner_;
    std::vector<cplx> chirp_;     // e^{-i pi j^2 / n}, j in [0, n)
    std::vector<cplx> filter_ft_; // forward transform of the wrapped conjugate chirp

    void build_pow2_tables() {
        bitrev_.assign(n_, 0);
        int lg = 0;
        while ((1 << lg) < n_) ++lg;
        for (int i = 1; i < n_; ++i) bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) << (lg - 1));
        tw_fwd_.reserve(n_);
        for (int len = 2; len <= n_; len <<= 1) {
            const int half = len >> 1;
            for (int k = 0; k < half; ++k) {
                const double ang = -2.0 * std::numbers::pi * k / len;
                tw_fwd_.emplace_back(std::cos(ang), std::sin(ang));
            }
        }
        tw_inv_.resize(tw_fwd_.size());
        for (std::size_t i = 0; i < tw_fwd_.size(); ++i) tw_inv_[i] = std::conj(tw_fwd_[i]);
    }

    void radix2(cplx* x, const cplx* tw) const {
        for (int i = 0; i < n_; ++i) {
            const int r = bitrev_[i];
            if (i < r) std::swap(x[i], x[r]);
        }
        // Butterflies on raw doubles: the spelled-out complex multiply
        // vectorizes, std::complex operator* does not.
        for (int len = 2; len <= n_; len <<= 1) {
            const int half = len >> 1;
            const double* w = reinterpret_cast<const double*>(tw);
            for (int base = 0; base < n_; base += len) {
                double* lo = reinterpret_cast<double*>(x + base);
                double* hi = reinterpret_cast<double*>(x + base + half);
                for (int k = 0; k < half; ++k) {
                    const double wr = w[2 * k], wi = w[2 * k + 1];
                    const double hr = hi[2 * k], hm = hi[2 * k + 1];
                    const double tr = hr * wr - hm * wi;
                    const double ti = hr * wi + hm * wr;
                    const double ur = lo[2 * k], um = lo[2 * k + 1];
                    lo[2 * k] = ur + tr;
                    lo[2 * k + 1] = um + ti;
                    hi[2 * k] = ur - tr;
                    hi[2 * k + 1] = um - ti;
                }
            }
            tw += half;
        }
    }

    void build_bluestein_tables() {
        int m = 1;
        while (m < 2 * n_ - 1) m <<= 1;
        inner_ = std::make_unique<FftPlan>(m);
        chirp_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            // Reduce j^2 mod 2n before scaling so the phase stays accurate.
            const long r = (static_cast<long>(j) * j) % (2L * n_);
            const double ang = -std::numbers::pi * static_cast<double>(r) / n_;
            chirp_[j] = cplx(std::cos(ang), std::sin(ang));
        }
        std::vector<cplx> b(m, cplx(0.0, 0.0));
        b[0] = std::conj(chirp_[0]);
        for (int j = 1; j < n_; ++j) {
            b[j] = std::conj(chirp_[j]);
            b[m - j] = std::conj(chirp_[j]);
        }
        inner_->forward(b.data());
        filter_ft_ = std::move(b);
    }

    void bluestein(cplx* x) const {
        const int m = inner_->size();
        std::vector<cplx> a(m, cplx(0.0, 0.0));
        for (int j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
        inner_->forward(a.data());
        for (int i = 0; i < m; ++i) a[i] *= filter_ft_[i];
        inner_->inverse(a.data());
        const double scale = 1.0 / m;
        for (int k = 0; k < n_; ++k) x[k] = a[k] * scale * chirp_[k];
    }
};

} // namespace detail
} // namespace kdvexp

#endif
