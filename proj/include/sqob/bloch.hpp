#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sqob/params.hpp"

namespace sqob {

// Mean-field Bloch variables of one representative atom.
struct AtomicState {
    double s0 = 0.0; // population inversion <s0>
    cplx sm;         // coherence <s_->

    double bloch_norm() const { return s0 * s0 + 4.0 * std::norm(sm); }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<AtomicState> states;
    std::vector<cplx> fields_total; // eps_T(t) samples
};

struct IntegrationError : std::runtime_error {
    double t_fail;
    IntegrationError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t = " + std::to_string(t)), t_fail(t) {}
};

struct SettleError : std::runtime_error {
    double residual;
    SettleError(const std::string& msg, double res)
        : std::runtime_error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

// Total effective field experienced by one atom: eps_T = E_in + Lambda <s_->* / mu.
inline cplx total_field(const AtomicState& s, cplx e_in, const ModelParams& p,
                        const DerivedParams& d) {
    return e_in + d.lambda_c * std::conj(s.sm) / p.mu;
}

// Equations of motion:
//   d<s0>/dt = 2 i mu (eps_T <s_-> - eps_T* <s_->*) - gamma (<s0> cosh2r + 1)
//   d<s_->/dt = -i Omega <s_-> + i mu eps_T* <s0> - Q e^{i eps t} <s_->*
inline AtomicState rhs(double t, const AtomicState& s, cplx e_in,
                       const ModelParams& p, const DerivedParams& d) {
    const cplx et = total_field(s, e_in, p, d);
    AtomicState ds;
    ds.s0 = -4.0 * p.mu * std::imag(et * s.sm) - p.gamma * (s.s0 * d.cosh2r + 1.0);
    ds.sm = cplx(0.0, -1.0) * d.omega_c * s.sm + cplx(0.0, p.mu) * std::conj(et) * s.s0
            - d.q * std::polar(1.0, p.epsilon * t) * std::conj(s.sm);
    return ds;
}

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 pack(const AtomicState& s) { return {s.s0, s.sm.real(), s.sm.imag()}; }
inline AtomicState unpack(const Vec3& y) { return {y[0], cplx(y[1], y[2])}; }

// One embedded Dormand-Prince 5(4) step; returns the 5th-order result and the
// local error estimate in the max norm.
template <std::size_t N, class Rhs>
void dopri45(const Rhs& f, double t, const std::array<double, N>& y, double h,
             std::array<double, N>& y5, double& err) {
    using Vec = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Vec k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp;
    auto stage = [&](double c, auto&&... terms) {
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (... + terms[i]);
        return f(t + c * h, tmp);
    };
    auto scale = [](double a, const Vec& k) {
        Vec out;
        for (std::size_t i = 0; i < N; ++i) out[i] = a * k[i];
        return out;
    };
    k2 = stage(c2, scale(a21, k1));
    k3 = stage(c3, scale(a31, k1), scale(a32, k2));
    k4 = stage(c4, scale(a41, k1), scale(a42, k2), scale(a43, k3));
    k5 = stage(c5, scale(a51, k1), scale(a52, k2), scale(a53, k3), scale(a54, k4));
    k6 = stage(1.0, scale(a61, k1), scale(a62, k2), scale(a63, k3), scale(a64, k4),
               scale(a65, k5));
    for (std::size_t i = 0; i < N; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + h, y5);
    err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double sc = 1.0 + std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(ei) / sc);
    }
}

// Adaptive integration from t0 to t1 with local relative tolerance tol.
// Calls observe(t, y) after every accepted step (not at t0).
template <std::size_t N, class Rhs, class Obs>
void integrate_adaptive(const Rhs& f, double t0, double t1, std::array<double, N>& y,
                        double tol, double h_max, const Obs& observe) {
    double t = t0;
    double h = std::min(h_max, (t1 - t0) * 0.1);
    const double h_min = (t1 - t0) * 1e-14;
    while (t < t1) {
        h = std::min(h, t1 - t);
        std::array<double, N> y5;
        double err;
        dopri45(f, t, y, h, y5, err);
        bool finite = std::isfinite(err);
        for (std::size_t i = 0; i < N; ++i) finite = finite && std::isfinite(y5[i]);
        if (!finite) throw IntegrationError("non-finite state", t);
        if (err <= tol) {
            t += h;
            y = y5;
            observe(t, y);
        }
        const double fac =
            std::clamp(0.9 * std::pow(tol / std::max(err, 1e-300), 0.2), 0.2, 5.0);
        h *= fac;
        h = std::min(h, h_max);
        if (h < h_min) throw IntegrationError("step size underflow", t);
    }
}

} // namespace detail

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kDefaultSettleTol = 1e-9;
inline constexpr int kDefaultMaxPeriods = 5000;
inline constexpr int kSettleSamplesPerPeriod = 512;

// Adaptive time integration of the mean-field equations, recording every
// accepted step. Step size is capped so a drive period holds >= 64 samples.
inline Trajectory integrate(const AtomicState& initial, cplx e_in, const ModelParams& p,
                            const DerivedParams& d, double t_end,
                            double tol = kDefaultTol) {
    if (tol <= 0.0) throw std::invalid_argument("integrate: tol must be > 0");
    double h_max = t_end;
    if (p.epsilon != 0.0)
        h_max = std::min(h_max, 2.0 * std::numbers::pi / std::abs(p.epsilon) / 64.0);

    auto f = [&](double t, const detail::Vec3& y) {
        const AtomicState ds = rhs(t, detail::unpack(y), e_in, p, d);
        return detail::pack(ds);
    };

    Trajectory traj;
    auto record = [&](double t, const detail::Vec3& y) {
        const AtomicState s = detail::unpack(y);
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.fields_total.push_back(total_field(s, e_in, p, d));
    };
    detail::Vec3 y = detail::pack(initial);
    record(0.0, y);
    detail::integrate_adaptive(f, 0.0, t_end, y, tol, h_max, record);
    return traj;
}

// Undriven fixed point (-1/cosh2r, 0); default starting state for settle().
inline AtomicState undriven_fixed_point(const DerivedParams& d) {
    return {-1.0 / d.cosh2r, cplx(0.0, 0.0)};
}

// Integrates until the asymptotic state is reached. For epsilon != 0 the
// trajectory is advanced period by period on a uniform stroboscopic grid until
// two consecutive periods agree to settle_tol in the max norm; the final
// period is returned (endpoint excluded). For epsilon = 0 integration runs
// until the derivative norm drops below settle_tol and the fixed point is
// returned as a one-sample trajectory.
inline Trajectory settle(cplx e_in, const ModelParams& p, const DerivedParams& d,
                         double settle_tol = kDefaultSettleTol,
                         int max_periods = kDefaultMaxPeriods,
                         std::optional<AtomicState> initial = std::nullopt,
                         double tol = kDefaultTol) {
    AtomicState y0 = initial.value_or(undriven_fixed_point(d));

    if (p.epsilon == 0.0) {
        const double t_block = 10.0 / p.gamma;
        AtomicState s = y0;
        double res = 0.0;
        for (int k = 0; k < max_periods; ++k) {
            auto f = [&](double t, const detail::Vec3& y) {
                return detail::pack(rhs(t, detail::unpack(y), e_in, p, d));
            };
            detail::Vec3 y = detail::pack(s);
            detail::integrate_adaptive(f, 0.0, t_block, y, tol, t_block,
                                       [](double, const detail::Vec3&) {});
            s = detail::unpack(y);
            const AtomicState ds = rhs(0.0, s, e_in, p, d);
            res = std::max(std::abs(ds.s0), std::abs(ds.sm));
            if (res < settle_tol) {
                Trajectory traj;
                traj.times = {0.0};
                traj.states = {s};
                traj.fields_total = {total_field(s, e_in, p, d)};
                return traj;
            }
        }
        throw SettleError("settle: fixed point not reached", res);
    }

    const double period = 2.0 * std::numbers::pi / std::abs(p.epsilon);
    const int m = kSettleSamplesPerPeriod;
    const double dt = period / m;
    const double h_max = period / 64.0;

    std::vector<AtomicState> prev(m), cur(m);
    AtomicState s = y0;
    double t_base = 0.0;
    double res = 0.0;
    for (int k = 0; k < max_periods; ++k) {
        for (int j = 0; j < m; ++j) {
            cur[j] = s;
            auto f = [&](double t, const detail::Vec3& y) {
                return detail::pack(rhs(t, detail::unpack(y), e_in, p, d));
            };
            detail::Vec3 y = detail::pack(s);
            const double ta = t_base + j * dt;
            detail::integrate_adaptive(f, ta, ta + dt, y, tol, h_max,
                                       [](double, const detail::Vec3&) {});
            s = detail::unpack(y);
        }
        if (k > 0) {
            res = 0.0;
            for (int j = 0; j < m; ++j) {
                res = std::max(res, std::abs(cur[j].s0 - prev[j].s0));
                res = std::max(res, std::abs(cur[j].sm - prev[j].sm));
            }
            if (res < settle_tol) {
                Trajectory traj;
                traj.times.resize(m);
                traj.states = cur;
                traj.fields_total.resize(m);
                for (int j = 0; j < m; ++j) {
                    traj.times[j] = t_base + j * dt;
                    traj.fields_total[j] = total_field(cur[j], e_in, p, d);
                }
                return traj;
            }
        }
        std::swap(prev, cur);
        t_base += period;
    }
    throw SettleError("settle: no periodic convergence", res);
}

// Fourier coefficients of the settled orbit and the output mode amplitudes.
struct HarmonicSolution {
    int n_max = 1;
    std::vector<cplx> a_coef; // a_n, n = -n_max..n_max
    std::vector<cplx> b_coef; // b_n
    std::vector<cplx> mode;   // output amplitudes E_n
    cplx e_in;

    cplx a(int n) const { return a_coef[static_cast<size_t>(n + n_max)]; }
    cplx b(int n) const { return b_coef[static_cast<size_t>(n + n_max)]; }
    cplx modes(int n) const { return mode[static_cast<size_t>(n + n_max)]; }
};

// Fourier projection over one period of a uniformly sampled trajectory
// (endpoint excluded); the trapezoid rule is spectrally accurate here.
inline HarmonicSolution extract_harmonics(const Trajectory& traj, double epsilon,
                                          int n_max, const ModelParams& p,
                                          const DerivedParams& d) {
    if (n_max < 1) throw std::invalid_argument("extract_harmonics: n_max must be >= 1");
    if (epsilon == 0.0) throw std::invalid_argument("extract_harmonics: epsilon must be nonzero");
    const size_t m = traj.times.size();
    if (m < 2) throw std::invalid_argument("extract_harmonics: need a sampled period");
    const double period = 2.0 * std::numbers::pi / std::abs(epsilon);
    const double dt = traj.times[1] - traj.times[0];
    const double span = dt * static_cast<double>(m);
    if (std::abs(span - period) > 0.01 * period)
        throw std::invalid_argument("extract_harmonics: trajectory span does not match the period");

    HarmonicSolution h;
    h.n_max = n_max;
    h.a_coef.assign(2 * n_max + 1, cplx(0.0));
    h.b_coef.assign(2 * n_max + 1, cplx(0.0));
    h.mode.assign(2 * n_max + 1, cplx(0.0));
    cplx e0(0.0);
    for (size_t j = 0; j < m; ++j) e0 += traj.fields_total[j];
    e0 /= static_cast<double>(m);

    for (int n = -n_max; n <= n_max; ++n) {
        cplx a(0.0), b(0.0);
        for (size_t j = 0; j < m; ++j) {
            const cplx ph = std::polar(1.0, -epsilon * n * traj.times[j]);
            a += traj.states[j].sm * ph;
            b += traj.states[j].s0 * ph;
        }
        h.a_coef[static_cast<size_t>(n + n_max)] = a / static_cast<double>(m);
        h.b_coef[static_cast<size_t>(n + n_max)] = b / static_cast<double>(m);
    }
    // E_n = Lambda a_{-n}^* / mu for n != 0; the n = 0 line carries the input.
    for (int n = -n_max; n <= n_max; ++n)
        h.mode[static_cast<size_t>(n + n_max)] =
            (n == 0) ? e0 : d.lambda_c * std::conj(h.a(-n)) / p.mu;
    h.e_in = e0 - d.lambda_c * std::conj(h.a(0)) / p.mu;
    return h;
}

} // namespace sqob
