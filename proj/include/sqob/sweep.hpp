#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sqob/bloch.hpp"
#include "sqob/resonant.hpp"
#include "sqob/sideband.hpp"

namespace sqob {

struct SweepQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CurvePoint {
    TripletSolution sol;
    bool valid = false;
    int slope_sign = 0; // sign of d|E_in|/d|e0| at this point
    bool stable = true;

    double e0_abs() const { return std::abs(sol.e0); }
    double e_in_abs() const { return std::abs(sol.e_in); }
};

struct ResponseCurve {
    std::vector<CurvePoint> points; // |e0| strictly increasing
    ModelParams params;
    DerivedParams derived;
    int depth = 2;
    bool classified = false;
};

struct TurningPoint {
    double e_in_star = 0.0; // |E_in| at the fold
    double e0_star = 0.0;
    std::pair<size_t, size_t> index_interval;
    enum class Kind { lower_fold, upper_fold } kind = Kind::lower_fold;
};

struct HysteresisJump {
    double e_in_at_jump = 0.0;
    std::array<double, 3> before{}; // |E_0|, |E_+1|, |E_-1|
    std::array<double, 3> after{};
};

struct HysteresisReport {
    enum class Direction { up, down } direction = Direction::up;
    std::vector<HysteresisJump> jumps;
};

// Evaluates the triplet solver over a grid of central amplitudes. Singular
// grid points are retried on bisected sub-grids before being recorded as gaps.
inline ResponseCurve sweep(const std::vector<double>& e0_grid, const ModelParams& p,
                           const DerivedParams& d, int depth = 2) {
    if (e0_grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (!std::is_sorted(e0_grid.begin(), e0_grid.end()))
        throw std::invalid_argument("sweep: grid must be sorted");
    if (e0_grid.front() < 0.0) throw std::invalid_argument("sweep: grid must be nonnegative");

    ResponseCurve curve;
    curve.params = p;
    curve.derived = d;
    curve.depth = depth;
    curve.points.reserve(e0_grid.size());

    size_t singular = 0;
    for (size_t i = 0; i < e0_grid.size(); ++i) {
        CurvePoint pt;
        double e0 = e0_grid[i];
        const double next = (i + 1 < e0_grid.size()) ? e0_grid[i + 1] : e0;
        for (int attempt = 0; attempt <= 8; ++attempt) {
            try {
                pt.sol = solve_triplet(cplx(e0, 0.0), p, d, depth);
                pt.valid = true;
                break;
            } catch (const std::runtime_error&) {
                e0 = e0 + (next - e0) * 0.5; // re-grid into the gap
            }
        }
        if (!pt.valid) {
            ++singular;
            pt.sol.e0 = cplx(e0_grid[i], 0.0);
        }
        curve.points.push_back(pt);
    }
    if (10 * singular > e0_grid.size())
        throw SweepQualityError("sweep: more than 10% singular grid points");
    return curve;
}

namespace detail {

// Golden-section refinement of an extremum of |E_in|(e0) on [lo, hi].
inline std::pair<double, double> refine_fold(double lo, double hi, bool maximize,
                                             const ModelParams& p, const DerivedParams& d,
                                             int depth) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double e0) {
        const double v = std::abs(solve_triplet(cplx(e0, 0.0), p, d, depth).e_in);
        return maximize ? -v : v;
    };
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    const double e0s = 0.5 * (a + b);
    return {e0s, std::abs(solve_triplet(cplx(e0s, 0.0), p, d, depth).e_in)};
}

} // namespace detail

// Folds of |E_in| versus |e0|: sign changes of the discrete slope, refined by
// golden-section search.
inline std::vector<TurningPoint> turning_points(const ResponseCurve& curve) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < curve.points.size(); ++i)
        if (curve.points[i].valid) idx.push_back(i);
    if (idx.size() < 3) throw std::invalid_argument("turning_points: need >= 3 valid points");

    std::vector<TurningPoint> folds;
    auto ein = [&](size_t k) { return curve.points[idx[k]].e_in_abs(); };
    auto e0 = [&](size_t k) { return curve.points[idx[k]].e0_abs(); };
    int prev_sign = 0;
    size_t prev_k = 0;
    for (size_t k = 1; k < idx.size(); ++k) {
        const double de = ein(k) - ein(k - 1);
        const int s = (de > 0.0) - (de < 0.0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
            TurningPoint tp;
            tp.index_interval = {idx[k - 1], idx[k]};
            tp.kind = (prev_sign > 0) ? TurningPoint::Kind::upper_fold
                                      : TurningPoint::Kind::lower_fold;
            const double lo = e0(prev_k > 0 ? prev_k - 1 : 0);
            const double hi = e0(k);
            auto [e0s, eins] = detail::refine_fold(
                lo, hi, tp.kind == TurningPoint::Kind::upper_fold, curve.params,
                curve.derived, curve.depth);
            tp.e0_star = e0s;
            tp.e_in_star = eins;
            folds.push_back(tp);
        }
        prev_sign = s;
        prev_k = k;
    }
    return folds;
}

// Slope-criterion stability labels: negative-slope segments between folds are
// unstable, positive-slope segments stable.
inline void classify_branches(ResponseCurve& curve) {
    int last = 1;
    for (size_t i = 0; i < curve.points.size(); ++i) {
        auto& pt = curve.points[i];
        if (!pt.valid) continue;
        // centered difference where possible
        size_t lo = i, hi = i;
        for (size_t k = i; k-- > 0;)
            if (curve.points[k].valid) {
                lo = k;
                break;
            }
        for (size_t k = i + 1; k < curve.points.size(); ++k)
            if (curve.points[k].valid) {
                hi = k;
                break;
            }
        if (lo == hi) continue;
        const double de = curve.points[hi].e_in_abs() - curve.points[lo].e_in_abs();
        const double da = curve.points[hi].e0_abs() - curve.points[lo].e0_abs();
        const double slope = (da != 0.0) ? de / da : 0.0;
        pt.slope_sign = (slope > 0.0) - (slope < 0.0);
        if (pt.slope_sign == 0) pt.slope_sign = last;
        last = pt.slope_sign;
        pt.stable = pt.slope_sign > 0;
    }
    curve.classified = true;
}

namespace detail {

// State reconstructed from the triplet harmonic series at time t.
inline AtomicState triplet_state_at(const TripletSolution& t, double time,
                                    const ModelParams& p, const DerivedParams& d) {
    const cplx a2 = t.x2 * t.a1;
    const cplx am2 = t.ym1 * t.am1;
    auto b_lin = [&](int n, cplx an, cplx amn_conj) {
        const cplx yn = y_coef(n, p, d);
        cplx b = 2.0 * cplx(0.0, 1.0) * (t.e0 * an - std::conj(t.e0) * amn_conj) / yn;
        if (n == 0) b -= p.gamma / yn;
        return b;
    };
    const cplx b0 = b_lin(0, t.a0, std::conj(t.a0));
    const cplx b1 = b_lin(1, t.a1, std::conj(t.am1));
    const cplx b2 = b_lin(2, a2, std::conj(am2));
    const cplx ph = std::polar(1.0, p.epsilon * time);
    const cplx sm = ((a2 * ph + t.a1) * ph + t.a0) + (t.am1 + am2 * std::conj(ph)) * std::conj(ph);
    const double s0 =
        b0.real() + 2.0 * (b1 * ph).real() + 2.0 * (b2 * ph * ph).real();
    return {s0, sm};
}

inline AtomicState triplet_initial_state(const TripletSolution& t, const ModelParams& p,
                                         const DerivedParams& d) {
    return triplet_state_at(t, 0.0, p, d);
}

} // namespace detail

// Floquet multipliers of the periodic orbit associated with a triplet point.
// The orbit is refined by multiple-shooting Newton (segments tame the strong
// one-period expansion of unstable orbits), then the multipliers are read off
// the product of the segment transition matrices.
inline std::array<cplx, 3> floquet_check(const TripletSolution& point,
                                         const ModelParams& p, const DerivedParams& d,
                                         double tol = kDefaultTol) {
    if (p.epsilon == 0.0)
        throw std::invalid_argument("floquet_check: requires epsilon != 0");
    const double period = 2.0 * std::numbers::pi / std::abs(p.epsilon);
    const cplx e_in = point.e_in;
    constexpr int kSegments = 32;
    const double dt = period / kSegments;

    // 12-vector: (u, v, w) then the transition matrix in column-major order
    using Vec12 = std::array<double, 12>;
    auto f = [&](double t, const Vec12& y) {
        AtomicState s{y[2], cplx(y[0], y[1])};
        const AtomicState ds = rhs(t, s, e_in, p, d);
        const cplx q_t = d.q * std::polar(1.0, p.epsilon * t);
        const Eigen::Matrix3d j = bloch_jacobian(s, e_in, q_t, p, d);
        Eigen::Matrix3d m;
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r) m(r, c) = y[static_cast<size_t>(3 + 3 * c + r)];
        const Eigen::Matrix3d dm = j * m;
        Vec12 dy{};
        dy[0] = ds.sm.real();
        dy[1] = ds.sm.imag();
        dy[2] = ds.s0;
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r) dy[static_cast<size_t>(3 + 3 * c + r)] = dm(r, c);
        return dy;
    };

    std::array<Eigen::Vector3d, kSegments> x;
    for (int i = 0; i < kSegments; ++i) {
        const AtomicState s = detail::triplet_state_at(point, i * dt, p, d);
        x[static_cast<size_t>(i)] << s.sm.real(), s.sm.imag(), s.s0;
    }

    std::array<Eigen::Matrix3d, kSegments> phi;
    auto residual = [&](const std::array<Eigen::Vector3d, kSegments>& xx,
                        Eigen::VectorXd& res, bool with_phi) {
        for (int i = 0; i < kSegments; ++i) {
            Vec12 y{};
            y[0] = xx[static_cast<size_t>(i)](0);
            y[1] = xx[static_cast<size_t>(i)](1);
            y[2] = xx[static_cast<size_t>(i)](2);
            y[3] = y[7] = y[11] = 1.0;
            detail::integrate_adaptive(f, i * dt, (i + 1) * dt, y, tol, dt / 8.0,
                                       [](double, const Vec12&) {});
            if (with_phi)
                for (int c = 0; c < 3; ++c)
                    for (int r = 0; r < 3; ++r)
                        phi[static_cast<size_t>(i)](r, c) =
                            y[static_cast<size_t>(3 + 3 * c + r)];
            res.segment<3>(3 * i) =
                Eigen::Vector3d(y[0], y[1], y[2]) - xx[static_cast<size_t>((i + 1) % kSegments)];
        }
    };

    Eigen::VectorXd res(3 * kSegments);
    residual(x, res, true);
    double rnorm = res.lpNorm<Eigen::Infinity>();
    bool converged = rnorm < 1e-10;
    for (int it = 0; it < 60 && !converged; ++it) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * kSegments, 3 * kSegments);
        for (int i = 0; i < kSegments; ++i) {
            jac.block<3, 3>(3 * i, 3 * i) = phi[static_cast<size_t>(i)];
            jac.block<3, 3>(3 * i, 3 * ((i + 1) % kSegments)) =
                -Eigen::Matrix3d::Identity();
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-res);
        if (!step.allFinite()) throw std::runtime_error("floquet_check: Newton step failed");
        // backtracking line search on the shooting residual
        bool accepted = false;
        double lambda = 1.0;
        for (int ls = 0; ls < 10; ++ls, lambda *= 0.5) {
            std::array<Eigen::Vector3d, kSegments> xn = x;
            for (int i = 0; i < kSegments; ++i)
                xn[static_cast<size_t>(i)] += lambda * step.segment<3>(3 * i);
            Eigen::VectorXd rn(3 * kSegments);
            residual(xn, rn, false);
            if (rn.lpNorm<Eigen::Infinity>() < rnorm * (1.0 - 0.25 * lambda)) {
                x = xn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break; // stalled: no descent along the Newton direction
        residual(x, res, true);
        rnorm = res.lpNorm<Eigen::Infinity>();
        converged = rnorm < 1e-10;
    }
    if (!converged) throw std::runtime_error("floquet_check: periodic orbit not found");

    Eigen::Matrix3d mono = Eigen::Matrix3d::Identity();
    for (int i = 0; i < kSegments; ++i) mono = phi[static_cast<size_t>(i)] * mono;

    Eigen::EigenSolver<Eigen::Matrix3d> es(mono, true);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("floquet_check: eigenvalue solver failed");
    std::array<cplx, 3> mult;
    for (int i = 0; i < 3; ++i) mult[static_cast<size_t>(i)] = es.eigenvalues()(i);
    std::sort(mult.begin(), mult.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return mult;
}

namespace detail {

// e0 on [lo, hi] where |E_in|(e0) equals the target (monotone segment).
inline double solve_e0_at_ein(double target, double lo, double hi, const ModelParams& p,
                              const DerivedParams& d, int depth) {
    auto f = [&](double e0) {
        return std::abs(solve_triplet(cplx(e0, 0.0), p, d, depth).e_in) - target;
    };
    double fa = f(lo), fb = f(hi);
    if ((fa < 0.0) == (fb < 0.0)) return (std::abs(fa) < std::abs(fb)) ? lo : hi;
    double a = lo, b = hi;
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fa < 0.0) != (fm < 0.0))
            b = m;
        else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

inline std::array<double, 3> mode_moduli(const TripletSolution& t) {
    return {std::abs(t.e0), std::abs(t.mode_p1), std::abs(t.mode_m1)};
}

} // namespace detail

// Walks |E_in| monotonically along the stable branches of an S-shaped curve,
// recording the jump at the fold where the current branch terminates.
inline HysteresisReport hysteresis(const ResponseCurve& curve,
                                   HysteresisReport::Direction direction) {
    if (!curve.classified)
        throw std::invalid_argument("hysteresis: curve must be classified first");
    HysteresisReport rep;
    rep.direction = direction;
    auto folds = turning_points(curve);
    if (folds.size() < 2) return rep; // monotone curve, no jumps

    const ModelParams& p = curve.params;
    const DerivedParams& d = curve.derived;
    const int depth = curve.depth;
    const TurningPoint* upper = nullptr; // fold with the larger |E_in|
    const TurningPoint* lower = nullptr;
    for (const auto& tp : folds) {
        if (!upper || tp.e_in_star > upper->e_in_star) upper = &tp;
        if (!lower || tp.e_in_star < lower->e_in_star) lower = &tp;
    }
    const double e0_max = curve.points.back().e0_abs();

    HysteresisJump jump;
    if (direction == HysteresisReport::Direction::up) {
        // lower branch ends at the upper fold; land on the far stable branch
        jump.e_in_at_jump = upper->e_in_star;
        jump.before = detail::mode_moduli(
            solve_triplet(cplx(upper->e0_star, 0.0), p, d, depth));
        const double e0_land = detail::solve_e0_at_ein(upper->e_in_star, lower->e0_star,
                                                       e0_max, p, d, depth);
        jump.after = detail::mode_moduli(solve_triplet(cplx(e0_land, 0.0), p, d, depth));
    } else {
        // upper branch ends at the lower fold; land on the first stable branch
        jump.e_in_at_jump = lower->e_in_star;
        jump.before = detail::mode_moduli(
            solve_triplet(cplx(lower->e0_star, 0.0), p, d, depth));
        const double e0_first = curve.points.front().valid
                                    ? curve.points.front().e0_abs()
                                    : 0.0;
        const double e0_land = detail::solve_e0_at_ein(lower->e_in_star, e0_first,
                                                       upper->e0_star, p, d, depth);
        jump.after = detail::mode_moduli(solve_triplet(cplx(e0_land, 0.0), p, d, depth));
    }
    rep.jumps.push_back(jump);
    return rep;
}

} // namespace sqob
