#ifndef KDVEXP_GRID_HPP
#define KDVEXP_GRID_HPP

#include <memory>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace kdvexp {

// Treatment of the unpaired Nyquist mode k = -K/2.
//
// ZeroNyquist (default): the derivative and antiderivative zero that mode,
// propagators act on it as the identity (a phase there would break conjugate
// symmetry of real data, zeroing it would break norm preservation), and the
// schemes project their quadratic increments to zero there. The Nyquist mode
// is carried along unchanged instead of being evolved.
//
// PaperExact: every Fourier symbol is applied literally at k = -K/2 as well
// (phase e^{i t kappa^3}, division by i*kappa, ...). Useful for hand checks
// of single-mode algebra; real-valuedness is not preserved at that mode.
enum class NyquistPolicy { ZeroNyquist, PaperExact };

// Uniform periodic grid on the torus [-pi/L, pi/L) with K collocation points
// x_j = (2*pi/(K*L)) * (j - K/2) and integer modes k in {-K/2, ..., K/2-1}
// scaled to wavenumbers kappa_k = L*k. Copies share one immutable transform
// plan, so grids are cheap to copy and safe to use from several threads.
class Grid {
public:
    Grid(int K, double L) : K_(K), L_(L) {
        if (K < 4 || (K % 2) != 0) throw std::invalid_argument("Grid: K must be even and at least 4");
        if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be positive");
        plan_ = std::make_shared<const detail::FftPlan>(K);
    }

    int size() const { return K_; }
    double scale() const { return L_; }

    // Domain helpers.
    double spacing() const { return 2.0 * std::numbers::pi / (K_ * L_); }
    double x(int j) const { return spacing() * (j - K_ / 2); }
    double period() const { return 2.0 * std::numbers::pi / L_; }

    // Mode bookkeeping: storage index i in [0, K) holds mode k = i for
    // i < K/2 and k = i - K otherwise (standard transform ordering).
    int mode_of_index(int i) const { return i < K_ / 2 ? i : i - K_; }
    int index_of_mode(int k) const { return k >= 0 ? k : k + K_; }
    int min_mode() const { return -K_ / 2; }
    int max_mode() const { return K_ / 2 - 1; }
    int nyquist_index() const { return K_ / 2; }
    double kappa(int k) const { return L_ * k; }
    double kappa_at_index(int i) const { return L_ * mode_of_index(i); }

    const detail::FftPlan& plan() const { return *plan_; }

    friend bool operator==(const Grid& a, const Grid& b) { return a.K_ == b.K_ && a.L_ == b.L_; }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    int K_;
    double L_;
    std::shared_ptr<const detail::FftPlan> plan_;
};

} // namespace kdvexp

#endif
