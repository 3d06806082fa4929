#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "sqob/params.hpp"

namespace sqob {

struct SingularCoefficientError : std::runtime_error {
    int n;
    SingularCoefficientError(const std::string& msg, int n_)
        : std::runtime_error(msg + " (n = " + std::to_string(n_) + ")"), n(n_) {}
};

struct SingularFractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularSolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coefficients of the harmonic-balance recurrence at index n for a given
// central output amplitude e0. e_n is the inhomogeneous driving coefficient,
// distinct from the output mode amplitudes.
struct RecurrenceCoeffs {
    cplx g, f, y; // G_n, F_n, Y_n
    cplx b, c, d; // three-term recurrence B_n, C_n, D_n
    cplx e, h;    // driving terms E_n, H_n
};

namespace detail {

inline cplx y_coef(int n, const ModelParams& p, const DerivedParams& d) {
    return cplx(p.gamma * d.cosh2r, n * p.epsilon);
}

inline cplx g_coef(int n, cplx e0, const ModelParams& p, const DerivedParams& d) {
    const cplx gl = (n == 0) ? cplx(0.0)
                             : p.gamma * std::conj(d.lambda_c) / y_coef(0, p, d);
    return cplx(0.0, 1.0) * (n * p.epsilon + d.omega_c + gl) +
           2.0 * std::norm(e0) / y_coef(n, p, d);
}

inline cplx f_coef(int n, cplx e0, const ModelParams& p, const DerivedParams& d) {
    return -2.0 * std::conj(e0) * std::conj(e0) / y_coef(n, p, d);
}

} // namespace detail

inline RecurrenceCoeffs coeffs(int n, cplx e0, const ModelParams& p,
                               const DerivedParams& d) {
    if (p.epsilon == 0.0)
        throw std::invalid_argument(
            "coeffs: epsilon = 0 is the resonant case; use the resonant solver");
    RecurrenceCoeffs k;
    k.y = detail::y_coef(n, p, d);
    k.g = detail::g_coef(n, e0, p, d);
    k.f = detail::f_coef(n, e0, p, d);
    const cplx gmn_c = std::conj(detail::g_coef(-n, e0, p, d));
    const cplx gmn1_c = std::conj(detail::g_coef(-n + 1, e0, p, d));
    if (std::abs(gmn_c) == 0.0) throw SingularCoefficientError("coeffs: G*_{-n} = 0", n);
    if (std::abs(gmn1_c) == 0.0)
        throw SingularCoefficientError("coeffs: G*_{-n+1} = 0", n);
    k.b = k.g - k.f * std::conj(detail::f_coef(-n, e0, p, d)) / gmn_c -
          std::norm(d.q) / gmn1_c;
    k.c = -std::conj(d.q) * k.f / gmn_c;
    k.d = -d.q * std::conj(detail::f_coef(-n + 1, e0, p, d)) / gmn1_c;
    k.e = -(cplx(0.0, 1.0) / d.cosh2r) * (e0 * k.f / gmn_c + std::conj(e0));
    k.h = -cplx(0.0, 1.0) * d.q * e0 / (gmn1_c * d.cosh2r);
    return k;
}

// Descending continued fraction x_n = -D_n / (B_n + C_n x_{n+1}) for the
// upward tail ratio a_n / a_{n-1}, truncated with x_{start_n+depth+1} = 0.
// depth = 2 with start_n = 2 evaluates levels 2..4, the paper's second-order
// truncation.
inline cplx continued_fraction_x(cplx e0, const ModelParams& p, const DerivedParams& d,
                                 int depth = 2, int start_n = 2) {
    if (p.epsilon == 0.0)
        throw std::invalid_argument("continued_fraction_x: requires epsilon != 0");
    if (depth < 1) throw std::invalid_argument("continued_fraction_x: depth must be >= 1");
    cplx x(0.0);
    for (int n = start_n + depth; n >= start_n; --n) {
        const RecurrenceCoeffs k = coeffs(n, e0, p, d);
        const cplx den = k.b + k.c * x;
        if (std::abs(den) == 0.0)
            throw SingularFractionError("continued_fraction_x: zero denominator");
        x = -k.d / den;
    }
    return x;
}

// Mirror fraction y_{-n} = -C_{-(n+1)} / (B_{-(n+1)} + D_{-(n+1)} y_{-(n+1)})
// for the downward tail ratio a_{-(n+1)} / a_{-n}; returns y_{-1}.
inline cplx continued_fraction_y(cplx e0, const ModelParams& p, const DerivedParams& d,
                                 int depth = 2) {
    if (p.epsilon == 0.0)
        throw std::invalid_argument("continued_fraction_y: requires epsilon != 0");
    if (depth < 1) throw std::invalid_argument("continued_fraction_y: depth must be >= 1");
    cplx y(0.0);
    for (int n = depth + 1; n >= 1; --n) {
        const RecurrenceCoeffs k = coeffs(-(n + 1), e0, p, d);
        const cplx den = k.b + k.d * y;
        if (std::abs(den) == 0.0)
            throw SingularFractionError("continued_fraction_y: zero denominator");
        y = -k.c / den;
    }
    return y;
}

// The (a0, a1, a-1) triplet for a prescribed central output amplitude, with
// the input field and sideband mode amplitudes it implies.
struct TripletSolution {
    cplx e0;
    cplx a0, a1, am1;
    cplx x2, ym1; // truncated continued fractions closing the system
    cplx e_in;
    cplx mode_p1, mode_m1; // E_{+1} = Lambda a_{-1}^*, E_{-1} = Lambda a_1^*
};

inline TripletSolution solve_triplet(cplx e0, const ModelParams& p,
                                     const DerivedParams& d, int depth = 2) {
    TripletSolution s;
    s.e0 = e0;
    s.x2 = continued_fraction_x(e0, p, d, depth);
    s.ym1 = continued_fraction_y(e0, p, d, depth);

    const RecurrenceCoeffs k0 = coeffs(0, e0, p, d);
    const RecurrenceCoeffs k1 = coeffs(1, e0, p, d);
    const RecurrenceCoeffs km1 = coeffs(-1, e0, p, d);

    const cplx den_p = k1.b + k1.c * s.x2;   // B_1 + C_1 x_2
    const cplx den_m = km1.b + km1.d * s.ym1; // B_-1 + D_-1 y_-1
    if (std::abs(den_p) == 0.0 || std::abs(den_m) == 0.0)
        throw SingularSolutionError("solve_triplet: zero sideband denominator");
    const cplx den0 = k0.b - k0.d * km1.c / den_m - k0.c * k1.d / den_p;
    if (std::abs(den0) == 0.0)
        throw SingularSolutionError("solve_triplet: zero central denominator");

    s.a0 = (k0.e - k0.c * k1.h / den_p) / den0;
    s.a1 = (k1.h - k1.d * s.a0) / den_p;
    s.am1 = -km1.c * s.a0 / den_m;

    s.e_in = e0 - d.lambda_c * std::conj(s.a0) / p.mu;
    s.mode_p1 = d.lambda_c * std::conj(s.am1) / p.mu;
    s.mode_m1 = d.lambda_c * std::conj(s.a1) / p.mu;
    return s;
}

} // namespace sqob
