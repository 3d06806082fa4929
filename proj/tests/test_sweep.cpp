#include <catch_amalgamated.hpp>

#include <numbers>

#include "sqob/sweep.hpp"

using namespace sqob;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ModelParams fig3(1.0, 0.5, std::numbers::pi, 0.0, 2.0, 101.0);

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
}

ResponseCurve fig3_curve(int n = 400) {
    const auto d = derive(fig3);
    ResponseCurve c = sweep(linspace(1e-3, 20.0, n), fig3, d);
    classify_branches(c);
    return c;
}

} // namespace

TEST_CASE("the all-zero grid point") {
    const auto d = derive(fig3);
    const ResponseCurve c = sweep({0.0}, fig3, d);
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].valid);
    CHECK(c.points[0].sol.a0 == cplx(0.0, 0.0));
    CHECK(c.points[0].sol.e_in == cplx(0.0, 0.0));
}

TEST_CASE("sweep rejects malformed grids") {
    const auto d = derive(fig3);
    CHECK_THROWS_AS(sweep({}, fig3, d), std::invalid_argument);
    CHECK_THROWS_AS(sweep({1.0, 0.5}, fig3, d), std::invalid_argument);
    CHECK_THROWS_AS(sweep({-1.0, 0.5}, fig3, d), std::invalid_argument);
}

TEST_CASE("unsqueezed response is monotone") {
    const ModelParams p(1.0, 0.0, 0.0, 0.0, 2.0, 5.0);
    const auto d = derive(p);
    ResponseCurve c = sweep(linspace(1e-3, 10.0, 300), p, d);
    classify_branches(c);
    double prev = -1.0;
    for (const auto& pt : c.points) {
        CHECK(pt.e_in_abs() > prev);
        prev = pt.e_in_abs();
        CHECK(pt.stable);
    }
    CHECK(turning_points(c).empty());
}

TEST_CASE("two folds of the S-shaped sweep") {
    const ResponseCurve c = fig3_curve();
    const auto folds = turning_points(c);
    REQUIRE(folds.size() == 2);
    // frozen from a fine-grid golden-section refinement
    CHECK(folds[0].kind == TurningPoint::Kind::upper_fold);
    CHECK_THAT(folds[0].e0_star, WithinRel(0.5690934711074398, 1e-6));
    CHECK_THAT(folds[0].e_in_star, WithinRel(12.203308085567315, 1e-8));
    CHECK(folds[1].kind == TurningPoint::Kind::lower_fold);
    CHECK_THAT(folds[1].e0_star, WithinRel(3.4224252708850234, 1e-6));
    CHECK_THAT(folds[1].e_in_star, WithinRel(7.0209208565340226, 1e-8));
}

TEST_CASE("slope labels partition the curve into three branches") {
    const ResponseCurve c = fig3_curve();
    const auto folds = turning_points(c);
    REQUIRE(folds.size() == 2);
    const double e0_up = folds[0].e0_star;
    const double e0_lo = folds[1].e0_star;
    const double margin = 0.1;
    for (const auto& pt : c.points) {
        if (!pt.valid) continue;
        const double e0 = pt.e0_abs();
        if (e0 < e0_up - margin || e0 > e0_lo + margin) {
            CHECK(pt.stable);
            CHECK(pt.slope_sign > 0);
        } else if (e0 > e0_up + margin && e0 < e0_lo - margin) {
            CHECK_FALSE(pt.stable);
            CHECK(pt.slope_sign < 0);
        }
    }
}

TEST_CASE("hysteresis jumps at the folds") {
    const ResponseCurve c = fig3_curve();
    const auto up = hysteresis(c, HysteresisReport::Direction::up);
    REQUIRE(up.jumps.size() == 1);
    CHECK_THAT(up.jumps[0].e_in_at_jump, WithinRel(12.203308085567315, 1e-8));
    // central and red sideband grow, blue sideband drops
    CHECK(up.jumps[0].after[0] > up.jumps[0].before[0]);
    CHECK(up.jumps[0].after[1] > up.jumps[0].before[1]);
    CHECK(up.jumps[0].after[2] < up.jumps[0].before[2]);

    const auto down = hysteresis(c, HysteresisReport::Direction::down);
    REQUIRE(down.jumps.size() == 1);
    CHECK_THAT(down.jumps[0].e_in_at_jump, WithinRel(7.0209208565340226, 1e-8));
    CHECK(down.jumps[0].after[0] < down.jumps[0].before[0]);
    CHECK(down.jumps[0].after[1] < down.jumps[0].before[1]);
    CHECK(down.jumps[0].after[2] > down.jumps[0].before[2]);

    ResponseCurve raw = sweep(linspace(1e-3, 20.0, 100), fig3, derive(fig3));
    CHECK_THROWS_AS(hysteresis(raw, HysteresisReport::Direction::up),
                    std::invalid_argument);
}

TEST_CASE("floquet multipliers confirm the slope labels") {
    const auto d = derive(fig3);
    // one point per branch: lower stable, middle unstable, upper stable
    struct Probe {
        double e0;
        bool stable;
    };
    for (const Probe pr : {Probe{0.3, true}, Probe{1.5, false}, Probe{6.0, true}}) {
        const TripletSolution t = solve_triplet(cplx(pr.e0, 0.0), fig3, d);
        const auto mult = floquet_check(t, fig3, d);
        const double rho = std::abs(mult[2]);
        CAPTURE(pr.e0, rho);
        if (pr.stable)
            CHECK(rho < 1.0);
        else
            CHECK(rho > 1.0);
    }
    const ModelParams p0(1.0, 0.5, std::numbers::pi, 0.0, 0.0, 101.0);
    const TripletSolution dummy;
    CHECK_THROWS_AS(floquet_check(dummy, p0, derive(p0)), std::invalid_argument);
}
