#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sqob/bloch.hpp"
#include "sqob/params.hpp"

namespace sqob {

struct DegeneratePointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedRegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One equilibrium of the resonant (epsilon = 0) system.
struct ResonantPoint {
    cplx e_t;   // stationary output field eps_T
    cplx e_in;  // input that sustains it
    double s0_eq = 0.0;
    cplx sm_eq;
    bool stable = false;
    std::array<double, 3> eigen_real_parts{};
};

namespace detail {

// Fixed point of the Bloch equations at given eps_T (the equations are linear
// in the state once eps_T is prescribed). Rows: d(Re sm), d(Im sm), d(s0).
inline void resonant_fixed_point(cplx e_t, const ModelParams& p, const DerivedParams& d,
                                 double& u, double& v, double& w) {
    const double g = 0.5 * p.gamma * d.cosh2r;
    const cplx pp = p.mu * e_t; // mu eps_T
    const double pr = pp.real(), pi = pp.imag();
    const double qr = d.q.real(), qi = d.q.imag();

    Eigen::Matrix3d a;
    a << -g - qr, p.delta - qi, pi,
        -p.delta - qi, -g + qr, pr,
        -4.0 * pi, -4.0 * pr, -p.gamma * d.cosh2r;
    Eigen::Vector3d b(0.0, 0.0, p.gamma);
    const double det = a.determinant();
    const double scale = a.cwiseAbs().maxCoeff();
    if (std::abs(det) < 1e-14 * scale * scale * scale)
        throw DegeneratePointError("resonant fixed point: singular state system");
    const Eigen::Vector3d x = a.partialPivLu().solve(b);
    u = x(0);
    v = x(1);
    w = x(2);
}

} // namespace detail

// Input field that sustains a prescribed stationary output eps_T, obtained by
// solving the fixed point of the equations of motion and removing the
// polarization field.
inline cplx input_from_output(cplx e_t, const ModelParams& p, const DerivedParams& d) {
    if (p.epsilon != 0.0)
        throw std::invalid_argument("input_from_output: requires epsilon = 0");
    double u, v, w;
    detail::resonant_fixed_point(e_t, p, d, u, v, w);
    return e_t - d.lambda_c * std::conj(cplx(u, v)) / p.mu;
}

// The same relation in closed form; kept as an independent algebraic route for
// cross-checking the fixed-point construction.
inline cplx input_from_output_closed_form(cplx e_t, const ModelParams& p,
                                          const DerivedParams& d) {
    const double omega_i = d.omega_c.imag();
    const double mu2 = p.mu * p.mu;
    const cplx num = p.gamma * p.mu * d.lambda_c *
                     (d.omega_c * e_t - cplx(0.0, 1.0) * std::conj(d.q) * std::conj(e_t));
    const cplx den = 4.0 * mu2 * omega_i * std::norm(e_t) -
                     2.0 * mu2 * (d.q * e_t * e_t + std::conj(d.q) * std::conj(e_t) * std::conj(e_t)) -
                     p.gamma * (std::norm(d.omega_c) - std::norm(d.q)) * d.cosh2r;
    if (std::abs(den) == 0.0)
        throw DegeneratePointError("input_from_output: vanishing denominator");
    return e_t - num / den;
}

// Jacobian of the (Re sm, Im sm, s0) dynamics at fixed E_in, including the
// dependence of eps_T on sm through the polarization field. q_t is the
// instantaneous phase-rotated squeeze coupling Q e^{i eps t}.
inline Eigen::Matrix3d bloch_jacobian(const AtomicState& s, cplx e_in, cplx q_t,
                                      const ModelParams& p, const DerivedParams& d) {
    const double g = 0.5 * p.gamma * d.cosh2r;
    const double l = 0.5 * p.gamma * p.n_eff;
    const double u = s.sm.real(), v = s.sm.imag(), w = s.s0;
    const double pr = p.mu * e_in.real() + l * v;
    const double pi = p.mu * e_in.imag() + l * u;
    const double qr = q_t.real(), qi = q_t.imag();

    Eigen::Matrix3d j;
    j << -g + l * w - qr, p.delta - qi, pi,
        -p.delta - qi, -g + l * w + qr, pr,
        -4.0 * (pi + l * u), -4.0 * (pr + l * v), -p.gamma * d.cosh2r;
    return j;
}

inline Eigen::Matrix3d resonant_jacobian(const AtomicState& s, cplx e_in,
                                         const ModelParams& p, const DerivedParams& d) {
    return bloch_jacobian(s, e_in, d.q, p, d);
}

// Linear stability of a resonant fixed point: real parts of the Jacobian
// eigenvalues; stable iff all are negative.
inline std::array<double, 3> stability_eigen_real_parts(const ResonantPoint& pt,
                                                        const ModelParams& p,
                                                        const DerivedParams& d) {
    AtomicState s{pt.s0_eq, pt.sm_eq};
    const Eigen::Matrix3d j = resonant_jacobian(s, pt.e_in, p, d);
    Eigen::EigenSolver<Eigen::Matrix3d> es(j, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("stability: eigenvalue solver failed");
    std::array<double, 3> re{};
    for (int i = 0; i < 3; ++i) re[static_cast<size_t>(i)] = es.eigenvalues()(i).real();
    std::sort(re.begin(), re.end());
    return re;
}

namespace detail {

inline ResonantPoint make_point(cplx e_t, const ModelParams& p, const DerivedParams& d) {
    ResonantPoint pt;
    pt.e_t = e_t;
    double u, v, w;
    resonant_fixed_point(e_t, p, d, u, v, w);
    pt.sm_eq = cplx(u, v);
    pt.s0_eq = w;
    pt.e_in = e_t - d.lambda_c * std::conj(pt.sm_eq) / p.mu;
    pt.eigen_real_parts = stability_eigen_real_parts(pt, p, d);
    pt.stable = pt.eigen_real_parts[2] < 0.0;
    return pt;
}

// Bisection to 1e-12 on a bracketed sign change.
template <class F>
double bisect(const F& f, double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0 || (b - a) < 1e-12 * (1.0 + std::abs(m))) return m;
        if ((fa < 0.0) != (fm < 0.0))
            b = m;
        else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// Hybrid log+linear grid on (0, radius].
inline std::vector<double> scan_grid(double radius, int n) {
    std::vector<double> g;
    g.reserve(static_cast<size_t>(n));
    const int n_log = n / 4;
    const double lo = radius * 1e-6;
    for (int i = 0; i < n_log; ++i)
        g.push_back(lo * std::pow(1e4, static_cast<double>(i) / (n_log - 1)));
    const double start = lo * 1e4;
    for (int i = 1; i <= n - n_log; ++i)
        g.push_back(start + (radius - start) * static_cast<double>(i) / (n - n_log));
    return g;
}

} // namespace detail

// All fixed points with |eps_T| <= search_radius sustaining the given input.
// Supported families: r = 0 (phase-symmetric, any theta/delta) and the
// co-phase family delta = 0, theta in {0, pi}, where real eps_T maps to real
// E_in. e_in is interpreted as |E_in| >= 0 with theta carrying the phase.
inline std::vector<ResonantPoint> output_branches(double e_in, const ModelParams& p,
                                                  const DerivedParams& d,
                                                  double search_radius,
                                                  int grid_points = 2000) {
    if (p.epsilon != 0.0)
        throw std::invalid_argument("output_branches: requires epsilon = 0");
    if (e_in < 0.0) throw std::invalid_argument("output_branches: e_in must be >= 0");
    if (search_radius <= 0.0 || grid_points < 8)
        throw std::invalid_argument("output_branches: degenerate scan grid");

    const bool phase_free = (p.r == 0.0);
    const bool co_phase =
        p.delta == 0.0 && std::abs(std::sin(p.theta)) < 1e-12;
    if (!phase_free && !co_phase)
        throw UnsupportedRegimeError(
            "output_branches: only r = 0 or (delta = 0, theta in {0, pi}) families are supported");

    std::vector<ResonantPoint> out;
    if (e_in == 0.0) {
        out.push_back(detail::make_point(cplx(0.0), p, d));
        return out;
    }

    // residual along the one-parameter family
    auto residual = [&](double rho) {
        const cplx ein = input_from_output(cplx(rho, 0.0), p, d);
        return co_phase ? ein.real() - e_in : std::abs(ein) - e_in;
    };

    const std::vector<double> grid = detail::scan_grid(search_radius, grid_points);
    double prev_x = grid.front();
    double prev_f = residual(prev_x);
    for (size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        const double fx = residual(x);
        if ((prev_f < 0.0) != (fx < 0.0)) {
            const double root = detail::bisect(residual, prev_x, x, prev_f);
            cplx e_t(root, 0.0);
            ResonantPoint pt = detail::make_point(e_t, p, d);
            if (phase_free && !co_phase) {
                // rotate the solution so E_in lands on the positive real axis;
                // the coherence couples through its conjugate, so it rotates
                // the opposite way
                const double phi = -std::arg(pt.e_in);
                pt.e_t *= std::polar(1.0, phi);
                pt.sm_eq *= std::polar(1.0, -phi);
                pt.e_in = pt.e_t - d.lambda_c * std::conj(pt.sm_eq) / p.mu;
                pt.eigen_real_parts = stability_eigen_real_parts(pt, p, d);
                pt.stable = pt.eigen_real_parts[2] < 0.0;
            }
            out.push_back(pt);
        }
        prev_x = x;
        prev_f = fx;
    }
    return out;
}

} // namespace sqob
