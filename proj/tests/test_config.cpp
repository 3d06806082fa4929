#include <catch_amalgamated.hpp>

#include "sqob/config.hpp"

using namespace sqob;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

TEST_CASE("defaults are filled in around the one required key") {
    const RunConfig cfg = parse_config(R"({"n_eff": 101})");
    CHECK(cfg.model.gamma == 1.0);
    CHECK(cfg.model.r == 0.0);
    CHECK(cfg.model.theta == 0.0);
    CHECK(cfg.model.delta == 0.0);
    CHECK(cfg.model.epsilon == 0.0);
    CHECK(cfg.model.n_eff == 101.0);
    CHECK(cfg.model.mu == 1.0);
    CHECK(cfg.sweep.e0_min == 1e-3);
    CHECK(cfg.sweep.e0_max == 20.0);
    CHECK(cfg.sweep.points == 400);
    CHECK(cfg.sweep.spacing == RunConfig::Sweep::Spacing::linear);
    CHECK(cfg.solver.depth == 2);
    CHECK(cfg.solver.tol == 1e-10);
    CHECK(cfg.solver.settle_tol == 1e-9);
    CHECK(cfg.solver.max_periods == 5000);
    CHECK(cfg.solver.n_max == 8);
    CHECK(cfg.output.path.empty());
    CHECK(cfg.output.format == RunConfig::Output::Format::csv);
}

TEST_CASE("a fully specified document round-trips") {
    const std::string text = R"({
        "gamma": 1.0, "r": 0.5, "theta": 3.141592653589793, "delta": 0.0,
        "epsilon": 2.0, "n_eff": 101, "mu": 1.0,
        "sweep": {"e0_min": 0.01, "e0_max": 10.0, "points": 50, "spacing": "log"},
        "solver": {"depth": 3, "tol": 1e-11, "settle_tol": 1e-8,
                   "max_periods": 100, "n_max": 4},
        "output": {"path": "out.csv", "format": "json"}
    })";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.model.epsilon == 2.0);
    CHECK(cfg.sweep.spacing == RunConfig::Sweep::Spacing::log);
    CHECK(cfg.solver.depth == 3);
    CHECK(cfg.output.format == RunConfig::Output::Format::json);
    CHECK(cfg.output.path == "out.csv");
    // the resolved dump parses back to the same configuration
    const RunConfig back = parse_config(cfg.resolved().dump());
    CHECK(back.resolved() == cfg.resolved());
}

TEST_CASE("sweep grids") {
    RunConfig cfg = parse_config(R"({"n_eff": 1, "sweep": {"e0_min": 1.0, "e0_max": 3.0, "points": 3}})");
    auto g = cfg.e0_grid();
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    CHECK(g[2] == 3.0);
    cfg.sweep.spacing = RunConfig::Sweep::Spacing::log;
    cfg.sweep.e0_min = 0.01;
    cfg.sweep.e0_max = 100.0;
    cfg.sweep.points = 5;
    g = cfg.e0_grid();
    REQUIRE(g.size() == 5);
    CHECK_THAT(g[1] / g[0], WithinRel(10.0, 1e-12));
    CHECK_THAT(g[4], WithinRel(100.0, 1e-12));
}

TEST_CASE("malformed documents are rejected with the offending key") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
    CHECK_THROWS_WITH(parse_config(R"({"gamma": 1})"), ContainsSubstring("n_eff"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "bogus": 2})"),
                      ContainsSubstring("bogus"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "sweep": {"stride": 2}})"),
                      ContainsSubstring("stride"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "gamma": "x"})"),
                      ContainsSubstring("gamma"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "solver": {"depth": 0}})"),
                      ContainsSubstring("depth"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "solver": {"depth": 21}})"),
                      ContainsSubstring("depth"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "sweep": {"points": 2}})"),
                      ContainsSubstring("points"));
    CHECK_THROWS_WITH(
        parse_config(R"({"n_eff": 1, "sweep": {"e0_min": 5.0, "e0_max": 1.0}})"),
        ContainsSubstring("e0_min"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "sweep": {"spacing": "cubic"}})"),
                      ContainsSubstring("spacing"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "output": {"format": "xml"}})"),
                      ContainsSubstring("format"));
    CHECK_THROWS_WITH(parse_config(R"({"n_eff": 1, "solver": {"tol": 0.0}})"),
                      ContainsSubstring("tol"));
    // model validation surfaces as a config error too
    CHECK_THROWS_AS(parse_config(R"({"n_eff": -3})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n_eff": 1, "gamma": -1})"), ConfigError);
}
