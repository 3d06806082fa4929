#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqob {

using cplx = std::complex<double>;

// Physical inputs. All rates are in units of gamma (gamma = 1 by default),
// detunings delta = omega0 - omega and epsilon = 2(omega - omega_s) likewise.
// The dynamic frequency shift nu is neglected throughout.
struct ModelParams {
    double gamma = 1.0;   // damping rate, sets the frequency unit
    double r = 0.0;       // squeeze parameter
    double theta = 0.0;   // phase difference between pump and squeezed input
    double delta = 0.0;   // atom-pump detuning
    double epsilon = 0.0; // twice the pump / squeezed-carrier detuning
    double n_eff = 1.0;   // effective number of atoms
    double mu = 1.0;      // dipole moment

    ModelParams() = default;
    ModelParams(double gamma_, double r_, double theta_, double delta_,
                double epsilon_, double n_eff_, double mu_ = 1.0)
        : gamma(gamma_), r(r_), theta(theta_), delta(delta_),
          epsilon(epsilon_), n_eff(n_eff_), mu(mu_) {
        normalize_theta();
        validate();
    }

    void normalize_theta() {
        const double two_pi = 2.0 * std::numbers::pi;
        theta = std::fmod(theta, two_pi);
        if (theta < 0.0) theta += two_pi;
    }

    void validate() const {
        check_finite("gamma", gamma);
        check_finite("r", r);
        check_finite("theta", theta);
        check_finite("delta", delta);
        check_finite("epsilon", epsilon);
        check_finite("n_eff", n_eff);
        check_finite("mu", mu);
        if (gamma <= 0.0) fail("gamma", "must be > 0");
        if (n_eff <= 0.0) fail("n_eff", "must be > 0");
        if (mu <= 0.0) fail("mu", "must be > 0");
        if (r < 0.0) fail("r", "must be >= 0");
    }

  private:
    static void check_finite(const char* name, double x) {
        if (!std::isfinite(x)) fail(name, "must be finite");
    }
    [[noreturn]] static void fail(const char* name, const char* what) {
        throw std::invalid_argument(std::string("ModelParams: ") + name + " " + what);
    }
};

// Complex constants entering every solver:
//   Omega  = delta - i (gamma/2) cosh 2r
//   Q      = (gamma/2) e^{i theta} sinh 2r
//   Lambda = i (gamma/2) N_eff
struct DerivedParams {
    cplx omega_c;
    cplx q;
    cplx lambda_c;
    double cosh2r;
    double sinh2r;
};

inline DerivedParams derive(const ModelParams& p) {
    p.validate();
    DerivedParams d;
    d.cosh2r = std::cosh(2.0 * p.r);
    d.sinh2r = std::sinh(2.0 * p.r);
    d.omega_c = cplx(p.delta, -0.5 * p.gamma * d.cosh2r);
    d.q = 0.5 * p.gamma * d.sinh2r * std::polar(1.0, p.theta);
    d.lambda_c = cplx(0.0, 0.5 * p.gamma * p.n_eff);
    return d;
}

} // namespace sqob
