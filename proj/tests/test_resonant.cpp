#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "sqob/resonant.hpp"

using namespace sqob;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const ModelParams fig2(1.0, 0.5, std::numbers::pi, 0.0, 0.0, 101.0);
}

TEST_CASE("zero output needs zero input") {
    const auto d = derive(fig2);
    CHECK_THAT(std::abs(input_from_output(cplx(0.0), fig2, d)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(input_from_output_closed_form(cplx(0.0), fig2, d)),
               WithinAbs(0.0, 1e-15));
}

TEST_CASE("ordinary-vacuum input-output relation") {
    // frozen: the r = 0 relation reduces to E_in = et (1 + N/(1 + 8 et^2))
    const ModelParams p(1.0, 0.0, 0.0, 0.0, 0.0, 101.0);
    const auto d = derive(p);
    const cplx ein = input_from_output(cplx(0.1, 0.0), p, d);
    CHECK_THAT(ein.real(), WithinRel(9.4518518518518508, 1e-13));
    CHECK_THAT(ein.imag(), WithinAbs(0.0, 1e-13));
    const double et = 0.1;
    CHECK_THAT(ein.real(), WithinRel(et * (1.0 + 101.0 / (1.0 + 8.0 * et * et)), 1e-13));
}

TEST_CASE("generic complex output point") {
    // frozen from an independent linear-solve of the stationary state
    const ModelParams p(1.0, 0.5, std::numbers::pi, 0.3, 0.0, 101.0);
    const auto d = derive(p);
    const cplx ein = input_from_output(cplx(0.2, 0.1), p, d);
    CHECK_THAT(ein.real(), WithinRel(0.76339040505268785, 1e-12));
    CHECK_THAT(ein.imag(), WithinRel(16.36061108009568, 1e-12));
}

TEST_CASE("closed form agrees with the fixed-point construction") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const ModelParams p(1.0, uni(rng), 2.0 * std::numbers::pi * uni(rng),
                            4.0 * uni(rng) - 2.0, 0.0, 1.0 + 199.0 * uni(rng));
        const auto d = derive(p);
        const cplx et = std::polar(1e-3 + uni(rng), 2.0 * std::numbers::pi * uni(rng));
        const cplx a = input_from_output(et, p, d);
        const cplx b = input_from_output_closed_form(et, p, d);
        CAPTURE(p.r, p.theta, p.delta, p.n_eff, et);
        CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("three coexisting outputs inside the bistable window") {
    const auto d = derive(fig2);
    const auto pts = output_branches(8.0, fig2, d, 15.0);
    REQUIRE(pts.size() == 3);
    int stable = 0;
    for (const auto& pt : pts) {
        stable += pt.stable ? 1 : 0;
        // round trip through the forward relation
        const cplx back = input_from_output(pt.e_t, fig2, d);
        CHECK(std::abs(back - pt.e_in) <= 1e-10 * (1.0 + std::abs(back)));
        CHECK_THAT(std::abs(pt.e_in), WithinRel(8.0, 1e-8));
    }
    CHECK(stable == 2);
    // middle output is the unstable one
    CHECK(pts[0].stable);
    CHECK_FALSE(pts[1].stable);
    CHECK(pts[2].stable);
}

TEST_CASE("below the critical atom number the response is single valued") {
    const ModelParams p(1.0, 0.5, std::numbers::pi, 0.0, 0.0, 20.0);
    const auto d = derive(p);
    for (double ein : {0.5, 3.0, 8.0, 14.0}) {
        const auto pts = output_branches(ein, p, d, 20.0);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].stable);
    }
}

TEST_CASE("no input leaves the atoms in the squeezed ground state") {
    const auto d = derive(fig2);
    const auto pts = output_branches(0.0, fig2, d, 5.0);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].e_t == cplx(0.0, 0.0));
    CHECK(pts[0].stable);
    CHECK_THAT(pts[0].s0_eq, WithinRel(-1.0 / d.cosh2r, 1e-12));
}

TEST_CASE("phase-symmetric family at r = 0") {
    const ModelParams p(1.0, 0.0, 2.1, 0.7, 0.0, 101.0);
    const auto d = derive(p);
    const auto pts = output_branches(8.0, p, d, 15.0);
    REQUIRE(!pts.empty());
    for (const auto& pt : pts) {
        CHECK_THAT(pt.e_in.imag(), WithinAbs(0.0, 1e-9));
        CHECK_THAT(pt.e_in.real(), WithinRel(8.0, 1e-8));
    }
}

TEST_CASE("the two squeeze phases produce different response curves") {
    const ModelParams p0(1.0, 0.5, 0.0, 0.0, 0.0, 101.0);
    const auto ein_pi = input_from_output(cplx(0.8, 0.0), fig2, derive(fig2));
    const auto ein_0 = input_from_output(cplx(0.8, 0.0), p0, derive(p0));
    CHECK(std::abs(ein_pi - ein_0) > 1.0);
}

TEST_CASE("jacobian matches finite differences") {
    const ModelParams p(1.0, 0.4, 1.3, 0.6, 0.0, 31.0);
    const auto d = derive(p);
    const AtomicState s{-0.4, cplx(0.12, -0.07)};
    const cplx e_in(1.5, 0.3);
    const Eigen::Matrix3d j = resonant_jacobian(s, e_in, p, d);
    const double h = 1e-6;
    auto f = [&](double u, double v, double w) {
        const AtomicState ds = rhs(0.0, {w, cplx(u, v)}, e_in, p, d);
        return Eigen::Vector3d(ds.sm.real(), ds.sm.imag(), ds.s0);
    };
    const double u = s.sm.real(), v = s.sm.imag(), w = s.s0;
    Eigen::Matrix3d fd;
    fd.col(0) = (f(u + h, v, w) - f(u - h, v, w)) / (2.0 * h);
    fd.col(1) = (f(u, v + h, w) - f(u, v - h, w)) / (2.0 * h);
    fd.col(2) = (f(u, v, w + h) - f(u, v, w - h)) / (2.0 * h);
    CHECK((j - fd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("unsupported branch families are reported") {
    const ModelParams p(1.0, 0.5, 1.0, 0.0, 0.0, 101.0); // generic theta with r > 0
    const auto d = derive(p);
    CHECK_THROWS_AS(output_branches(1.0, p, d, 5.0), UnsupportedRegimeError);
    const ModelParams pd(1.0, 0.5, std::numbers::pi, 0.5, 0.0, 101.0); // detuned
    CHECK_THROWS_AS(output_branches(1.0, pd, derive(pd), 5.0), UnsupportedRegimeError);
    CHECK_THROWS_AS(output_branches(-1.0, fig2, derive(fig2), 5.0), std::invalid_argument);
    const ModelParams pe(1.0, 0.5, std::numbers::pi, 0.0, 2.0, 101.0); // driven
    CHECK_THROWS_AS(output_branches(1.0, pe, derive(pe), 5.0), std::invalid_argument);
    CHECK_THROWS_AS(input_from_output(cplx(0.1), pe, derive(pe)), std::invalid_argument);
}
