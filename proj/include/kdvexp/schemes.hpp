#ifndef KDVEXP_SCHEMES_HPP
#define KDVEXP_SCHEMES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace kdvexp {

// ---------------------------------------------------------------------------
// Exponential-type integrators for u_t + u_xxx = (1/2) (u^2)_x on the torus,
// for zero-mean states. A nonzero mean alpha is handled by splitting it off
// and running the same steps with the shifted propagator e^{t(dxxx-alpha dx)}
// (the "shifted" variants); run_evolution automates that under AutoShift.
//
// The first-order step advances via
//   u+ = F u + (1/6) (F Dinv u)^2 - (1/6) F (Dinv u)^2,
// with F = e^{-tau(dxxx - alpha dx)} and Dinv the regularized antiderivative:
// the Duhamel oscillatory integral evaluated in closed form through the
// frequency identity (k1+k2)^3 - k1^3 - k2^3 = 3 k1 k2 (k1+k2).
//
// The second-order step additionally freezes the first-order time derivative
// v' of the twisted variable and integrates the resulting s- and s^2-free
// products exactly (five-term update below).
//
// Quadratic increments are projected: the defining frequency sums exclude
// k1 + k2 = 0, and under the default policy the unpaired Nyquist mode is
// excluded as non-dynamical.
// ---------------------------------------------------------------------------

enum class SchemeVariant { ExpInt1, ExpInt2 };

enum class AlphaPolicy { RequireZeroMean, AutoShift };

struct SchemeConfig {
    SchemeVariant variant = SchemeVariant::ExpInt1;
    double tau = 1e-3;
    AlphaPolicy alpha_policy = AlphaPolicy::AutoShift;
    NyquistPolicy nyquist = NyquistPolicy::ZeroNyquist;
    bool dealias = false;
};

inline std::string scheme_label(SchemeVariant v) {
    return v == SchemeVariant::ExpInt1 ? "expint1" : "expint2";
}

struct StepperState {
    SpectralField v;
    double t = 0.0;     // accumulated time (bookkeeping; the steps are autonomous)
    long step_index = 0;
};

struct Snapshot {
    double t;
    SpectralField u;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    SchemeConfig config;
    double alpha = 0.0;             // mean split off under AutoShift
    long steps_taken = 0;
    bool partial_final_step = false;
};

namespace detail {

inline void require_zero_mean(const SpectralField& u, const char* where) {
    const double scale = std::max(1.0, max_abs_coeff(u));
    if (std::abs(u.c[0]) > 1e-12 * scale)
        throw MeanViolationError(std::string(where) + ": state must have zero mean (use AutoShift or split_mean)");
}

// Twist operator shorthand: G(t) = e^{t(dxxx - alpha dx)}.
inline SpectralField twist(const SpectralField& f, double t, double alpha, NyquistPolicy pol) {
    return propagate_shifted_airy(f, t, alpha, pol);
}

// First-order update in the twisted variable: for A = Dinv v and T = tn+tau,
//   v+ = v + (1/6) G(T)[(G(-T)A)^2] - (1/6) G(tn)[(G(-tn)A)^2].
inline SpectralField expint1_twisted_impl(const SpectralField& v, double tn, double tau,
                                          double alpha, NyquistPolicy pol, bool dealias) {
    const double T = tn + tau;
    const SpectralField A = apply_inverse_derivative(v, pol);
    const SpectralField plus = twist(pointwise_square(twist(A, -T, alpha, pol), dealias), T, alpha, pol);
    const SpectralField minus = twist(pointwise_square(twist(A, -tn, alpha, pol), dealias), tn, alpha, pol);
    SpectralField inc = (1.0 / 6.0) * (plus - minus);
    project_increment(inc, pol);
    return v + inc;
}

// Same update written in the original variable (the tn-dependence cancels):
//   u+ = F u + (1/6)(F Dinv u)^2 - (1/6) F (Dinv u)^2, F = e^{-tau(dxxx-alpha dx)}.
inline SpectralField expint1_flat_impl(const SpectralField& u, double tau, double alpha,
                                       NyquistPolicy pol, bool dealias) {
    const SpectralField A = apply_inverse_derivative(u, pol);
    const SpectralField FA = twist(A, -tau, alpha, pol);
    SpectralField inc = (1.0 / 6.0) * (pointwise_square(FA, dealias) -
                                       twist(pointwise_square(A, dealias), -tau, alpha, pol));
    project_increment(inc, pol);
    return twist(u, -tau, alpha, pol) + inc;
}

// Second-order update in the twisted variable. With G as above, T = tn+tau,
//   w  = (1/2) G(tn) dx (G(-tn) v)^2          (time derivative of v at tn)
//   A  = Dinv v,  B = Dinv w,  A2 = Dinv A,  B2 = Dinv B,
//   v+ = v + (1/6)   G(T) [(G(-T)A)^2]   - (1/6)  G(tn)[(G(-tn)A)^2]
//          + (tau/3) G(T) [(G(-T)A)(G(-T)B)]
//          - (1/9)   G(T) Dinv[(G(-T)A2)(G(-T)B2)]
//          + (1/9)   G(tn)Dinv[(G(-tn)A2)(G(-tn)B2)].
inline SpectralField expint2_twisted_impl(const SpectralField& v, double tn, double tau,
                                          double alpha, NyquistPolicy pol, bool dealias) {
    const double T = tn + tau;
    const SpectralField w = 0.5 * apply_derivative(
        twist(pointwise_square(twist(v, -tn, alpha, pol), dealias), tn, alpha, pol), pol);
    const SpectralField A = apply_inverse_derivative(v, pol);
    const SpectralField B = apply_inverse_derivative(w, pol);
    const SpectralField A2 = apply_inverse_derivative(A, pol);
    const SpectralField B2 = apply_inverse_derivative(B, pol);

    const SpectralField Ap = twist(A, -T, alpha, pol);
    const SpectralField Am = twist(A, -tn, alpha, pol);
    const SpectralField Bp = twist(B, -T, alpha, pol);
    const SpectralField A2p = twist(A2, -T, alpha, pol);
    const SpectralField B2p = twist(B2, -T, alpha, pol);
    const SpectralField A2m = twist(A2, -tn, alpha, pol);
    const SpectralField B2m = twist(B2, -tn, alpha, pol);

    SpectralField inc = (1.0 / 6.0) * twist(pointwise_square(Ap, dealias), T, alpha, pol);
    inc += (-1.0 / 6.0) * twist(pointwise_square(Am, dealias), tn, alpha, pol);
    inc += (tau / 3.0) * twist(pointwise_product(Ap, Bp, dealias), T, alpha, pol);
    inc += (-1.0 / 9.0) * twist(apply_inverse_derivative(
        pointwise_product(A2p, B2p, dealias), pol), T, alpha, pol);
    inc += (1.0 / 9.0) * twist(apply_inverse_derivative(
        pointwise_product(A2m, B2m, dealias), pol), tn, alpha, pol);
    project_increment(inc, pol);
    return v + inc;
}

// Second-order step in the original variable: the twisted update at tn = 0
// followed by the free flow, so the whole increment carries a leading
// e^{-tau(dxxx-alpha dx)} (which cancels the outer forward propagators).
inline SpectralField expint2_flat_impl(const SpectralField& u, double tau, double alpha,
                                       NyquistPolicy pol, bool dealias) {
    const SpectralField w = 0.5 * apply_derivative(pointwise_square(u, dealias), pol);
    const SpectralField A = apply_inverse_derivative(u, pol);
    const SpectralField B = apply_inverse_derivative(w, pol);
    const SpectralField A2 = apply_inverse_derivative(A, pol);
    const SpectralField B2 = apply_inverse_derivative(B, pol);

    const SpectralField Ap = twist(A, -tau, alpha, pol);
    const SpectralField Bp = twist(B, -tau, alpha, pol);
    const SpectralField A2p = twist(A2, -tau, alpha, pol);
    const SpectralField B2p = twist(B2, -tau, alpha, pol);

    SpectralField inc = (1.0 / 6.0) * pointwise_square(Ap, dealias);
    inc += (-1.0 / 6.0) * twist(pointwise_square(A, dealias), -tau, alpha, pol);
    inc += (tau / 3.0) * pointwise_product(Ap, Bp, dealias);
    inc += (-1.0 / 9.0) * apply_inverse_derivative(pointwise_product(A2p, B2p, dealias), pol);
    inc += (1.0 / 9.0) * twist(
        apply_inverse_derivative(pointwise_product(A2, B2, dealias), pol), -tau, alpha, pol);
    project_increment(inc, pol);
    return twist(u, -tau, alpha, pol) + inc;
}

} // namespace detail

// w = (1/2) dx (u^2): the nonlinearity of the flux form of the equation.
inline SpectralField compute_nonlinearity(const SpectralField& u,
                                          NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                          bool dealias = false) {
    return 0.5 * apply_derivative(pointwise_square(u, dealias), pol);
}

// One first-order step u^n -> u^{n+1} for zero-mean data.
inline SpectralField step_expint1(const SpectralField& u, double tau,
                                  NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                  bool dealias = false) {
    detail::require_zero_mean(u, "step_expint1");
    return detail::expint1_flat_impl(u, tau, 0.0, pol, dealias);
}

// One first-order step of the twisted variable v^n (at time tn) -> v^{n+1}.
inline SpectralField step_expint1_twisted(const SpectralField& v, double tn, double tau,
                                          NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                          bool dealias = false) {
    detail::require_zero_mean(v, "step_expint1_twisted");
    return detail::expint1_twisted_impl(v, tn, tau, 0.0, pol, dealias);
}

// First-order step for mean-shifted data: twist with the shifted propagator,
// apply the twisted update, untwist at tn + tau. Equivalent to the plain step
// with e^{-tau dxxx} replaced by e^{-tau(dxxx - alpha dx)}.
inline SpectralField step_expint1_shifted(const SpectralField& u, double alpha, double tn, double tau,
                                          NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                          bool dealias = false) {
    detail::require_zero_mean(u, "step_expint1_shifted");
    const SpectralField v = detail::twist(u, tn, alpha, pol);
    const SpectralField v1 = detail::expint1_twisted_impl(v, tn, tau, alpha, pol, dealias);
    return detail::twist(v1, -(tn + tau), alpha, pol);
}

// One second-order step u^n -> u^{n+1} for zero-mean data.
inline SpectralField step_expint2(const SpectralField& u, double tau,
                                  NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                  bool dealias = false) {
    detail::require_zero_mean(u, "step_expint2");
    return detail::expint2_flat_impl(u, tau, 0.0, pol, dealias);
}

// One second-order step of the twisted variable at time tn.
inline SpectralField step_expint2_twisted(const SpectralField& v, double tn, double tau,
                                          NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                          bool dealias = false) {
    detail::require_zero_mean(v, "step_expint2_twisted");
    return detail::expint2_twisted_impl(v, tn, tau, 0.0, pol, dealias);
}

// Second-order step for mean-shifted data (see step_expint1_shifted).
inline SpectralField step_expint2_shifted(const SpectralField& u, double alpha, double tn, double tau,
                                          NyquistPolicy pol = NyquistPolicy::ZeroNyquist,
                                          bool dealias = false) {
    detail::require_zero_mean(u, "step_expint2_shifted");
    const SpectralField v = detail::twist(u, tn, alpha, pol);
    const SpectralField v1 = detail::expint2_twisted_impl(v, tn, tau, alpha, pol, dealias);
    return detail::twist(v1, -(tn + tau), alpha, pol);
}

// ---------------------------------------------------------------------------
// Time loop.
// ---------------------------------------------------------------------------

// Advances state0 to t_final with fixed step cfg.tau (a shorter final step
// covers any remainder and is flagged), recording the state at the first time
// >= each requested snapshot time. Under AutoShift the mean is split off once
// up front, evolved implicitly through the shifted propagators, and added
// back to every snapshot. Throws DivergenceError (with the step index) if a
// non-finite coefficient appears.
inline Trajectory run_evolution(const StepperState& state0, const SchemeConfig& cfg, double t_final,
                                const std::vector<double>& snapshot_times) {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("run_evolution: tau must be positive");
    if (t_final < state0.t) throw std::invalid_argument("run_evolution: t_final precedes the initial time");
    std::vector<double> targets(snapshot_times);
    std::sort(targets.begin(), targets.end());
    const double slack = 1e-9 * std::max(cfg.tau, 1e-30);
    if (!targets.empty() && (targets.front() < state0.t - slack || targets.back() > t_final + slack))
        throw std::invalid_argument("run_evolution: snapshot time outside [t0, t_final]");

    Trajectory traj;
    traj.config = cfg;

    double alpha = 0.0;
    SpectralField w = state0.v;
    if (cfg.alpha_policy == AlphaPolicy::AutoShift) {
        auto [mean, rest] = split_mean(state0.v);
        alpha = mean;
        w = std::move(rest);
    } else {
        detail::require_zero_mean(state0.v, "run_evolution");
        w.c[0] = cplx(0.0, 0.0); // drop the sub-tolerance residual so it cannot drift
    }
    traj.alpha = alpha;

    auto reconstitute = [&](const SpectralField& f) {
        SpectralField u = f;
        u.c[0] += alpha;
        return u;
    };

    // Step count: full steps of tau plus one shorter step for any remainder.
    const double span = t_final - state0.t;
    long n_full = static_cast<long>(std::floor(span / cfg.tau + 1e-9));
    double rem = span - static_cast<double>(n_full) * cfg.tau;
    if (rem <= slack) rem = 0.0;
    const long n_total = n_full + (rem > 0.0 ? 1 : 0);
    traj.partial_final_step = rem > 0.0;

    std::size_t next_target = 0;
    double t = state0.t;
    auto record_due = [&](double now) {
        while (next_target < targets.size() && targets[next_target] <= now + slack) {
            traj.snapshots.push_back({now, reconstitute(w)});
            ++next_target;
        }
    };
    record_due(t);

    for (long n = 0; n < n_total; ++n) {
        const double h = (n < n_full) ? cfg.tau : rem;
        w = (cfg.variant == SchemeVariant::ExpInt1)
                ? detail::expint1_flat_impl(w, h, alpha, cfg.nyquist, cfg.dealias)
                : detail::expint2_flat_impl(w, h, alpha, cfg.nyquist, cfg.dealias);
        if (!all_finite(w))
            throw DivergenceError("run_evolution: non-finite coefficient at step " +
                                  std::to_string(state0.step_index + n + 1), state0.step_index + n + 1);
        t = (n == n_total - 1) ? t_final : t + h;
        ++traj.steps_taken;
        record_due(t);
    }
    return traj;
}

inline Trajectory run_evolution(const SpectralField& u0, const SchemeConfig& cfg, double t_final,
                                const std::vector<double>& snapshot_times) {
    return run_evolution(StepperState{u0, 0.0, 0}, cfg, t_final, snapshot_times);
}

} // namespace kdvexp

#endif
