#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "sqob/bloch.hpp"
#include "sqob/config.hpp"
#include "sqob/resonant.hpp"
#include "sqob/sweep.hpp"

namespace sqob {

// Lossless float serialization; fixed format keeps output byte-identical
// across runs.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string config_comment(const RunConfig& cfg) {
    return "# config " + cfg.resolved().dump() + "\n";
}

inline std::string sideband_sweep_csv(const ResponseCurve& curve,
                                      const std::vector<TurningPoint>& folds,
                                      const RunConfig& cfg) {
    std::string out = config_comment(cfg);
    for (const auto& tp : folds)
        out += "# turning_point e_in_star=" + fmt(tp.e_in_star) +
               " e0_star=" + fmt(tp.e0_star) +
               (tp.kind == TurningPoint::Kind::upper_fold ? " kind=upper-fold\n"
                                                          : " kind=lower-fold\n");
    out += "e0_abs,e_in_abs,e0_re,e0_im,ep1_abs,em1_abs,a0_re,a0_im,a1_re,a1_im,"
           "am1_re,am1_im,slope_sign,stable\n";
    for (const auto& pt : curve.points) {
        if (!pt.valid) continue;
        const auto& s = pt.sol;
        out += fmt(std::abs(s.e0)) + "," + fmt(std::abs(s.e_in)) + "," +
               fmt(s.e0.real()) + "," + fmt(s.e0.imag()) + "," +
               fmt(std::abs(s.mode_p1)) + "," + fmt(std::abs(s.mode_m1)) + "," +
               fmt(s.a0.real()) + "," + fmt(s.a0.imag()) + "," + fmt(s.a1.real()) + "," +
               fmt(s.a1.imag()) + "," + fmt(s.am1.real()) + "," + fmt(s.am1.imag()) + "," +
               std::to_string(pt.slope_sign) + "," + (pt.stable ? "1" : "0") + "\n";
    }
    return out;
}

inline nlohmann::json point_json(const CurvePoint& pt) {
    const auto& s = pt.sol;
    return {{"e0_abs", std::abs(s.e0)},
            {"e_in_abs", std::abs(s.e_in)},
            {"e0", {s.e0.real(), s.e0.imag()}},
            {"ep1_abs", std::abs(s.mode_p1)},
            {"em1_abs", std::abs(s.mode_m1)},
            {"a0", {s.a0.real(), s.a0.imag()}},
            {"a1", {s.a1.real(), s.a1.imag()}},
            {"am1", {s.am1.real(), s.am1.imag()}},
            {"slope_sign", pt.slope_sign},
            {"stable", pt.stable}};
}

inline nlohmann::json sideband_sweep_json(const ResponseCurve& curve,
                                          const std::vector<TurningPoint>& folds,
                                          const std::vector<HysteresisReport>& hyst,
                                          const RunConfig& cfg) {
    nlohmann::json j;
    j["config"] = cfg.resolved();
    j["points"] = nlohmann::json::array();
    for (const auto& pt : curve.points)
        if (pt.valid) j["points"].push_back(point_json(pt));
    j["turning_points"] = nlohmann::json::array();
    for (const auto& tp : folds)
        j["turning_points"].push_back(
            {{"e_in_star", tp.e_in_star},
             {"e0_star", tp.e0_star},
             {"kind", tp.kind == TurningPoint::Kind::upper_fold ? "upper-fold"
                                                                : "lower-fold"}});
    j["hysteresis"] = nlohmann::json::array();
    for (const auto& h : hyst) {
        nlohmann::json hj;
        hj["direction"] = h.direction == HysteresisReport::Direction::up ? "up" : "down";
        hj["jumps"] = nlohmann::json::array();
        for (const auto& jp : h.jumps)
            hj["jumps"].push_back({{"e_in_at_jump", jp.e_in_at_jump},
                                   {"before", jp.before},
                                   {"after", jp.after}});
        j["hysteresis"].push_back(hj);
    }
    return j;
}

inline std::string hysteresis_comment(const HysteresisReport& h) {
    std::string out;
    const char* dir = h.direction == HysteresisReport::Direction::up ? "up" : "down";
    for (const auto& jp : h.jumps) {
        out += std::string("# hysteresis direction=") + dir +
               " e_in_at_jump=" + fmt(jp.e_in_at_jump);
        out += " before=" + fmt(jp.before[0]) + ";" + fmt(jp.before[1]) + ";" +
               fmt(jp.before[2]);
        out += " after=" + fmt(jp.after[0]) + ";" + fmt(jp.after[1]) + ";" +
               fmt(jp.after[2]) + "\n";
    }
    return out;
}

// Fig.-2 style table: the resonant input-output relation along the scan
// family, one row per output amplitude.
inline std::string resonant_sweep_csv(const ModelParams& p, const DerivedParams& d,
                                      const std::vector<double>& et_grid,
                                      const RunConfig& cfg) {
    std::string out = config_comment(cfg);
    out += "et_abs,e_in_abs,e_in_re,e_in_im,s0_eq,sm_re,sm_im,stable\n";
    for (double et : et_grid) {
        ResonantPoint pt = detail::make_point(cplx(et, 0.0), p, d);
        out += fmt(std::abs(pt.e_t)) + "," + fmt(std::abs(pt.e_in)) + "," +
               fmt(pt.e_in.real()) + "," + fmt(pt.e_in.imag()) + "," + fmt(pt.s0_eq) +
               "," + fmt(pt.sm_eq.real()) + "," + fmt(pt.sm_eq.imag()) + "," +
               (pt.stable ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string oracle_csv(const Trajectory& traj, const HarmonicSolution& h,
                              const RunConfig& cfg) {
    std::string out = config_comment(cfg);
    out += "# e_in_recovered=" + fmt(h.e_in.real()) + ";" + fmt(h.e_in.imag()) + "\n";
    for (int n = -h.n_max; n <= h.n_max; ++n)
        out += "# harmonic n=" + std::to_string(n) + " a=" + fmt(h.a(n).real()) + ";" +
               fmt(h.a(n).imag()) + " b=" + fmt(h.b(n).real()) + ";" +
               fmt(h.b(n).imag()) + " mode=" + fmt(h.modes(n).real()) + ";" +
               fmt(h.modes(n).imag()) + "\n";
    out += "t,s0,sm_re,sm_im,et_re,et_im\n";
    for (size_t i = 0; i < traj.times.size(); ++i)
        out += fmt(traj.times[i]) + "," + fmt(traj.states[i].s0) + "," +
               fmt(traj.states[i].sm.real()) + "," + fmt(traj.states[i].sm.imag()) + "," +
               fmt(traj.fields_total[i].real()) + "," + fmt(traj.fields_total[i].imag()) +
               "\n";
    return out;
}

inline nlohmann::json oracle_json(const Trajectory& traj, const HarmonicSolution& h,
                                  const RunConfig& cfg) {
    nlohmann::json j;
    j["config"] = cfg.resolved();
    j["e_in_recovered"] = {h.e_in.real(), h.e_in.imag()};
    j["harmonics"] = nlohmann::json::array();
    for (int n = -h.n_max; n <= h.n_max; ++n)
        j["harmonics"].push_back({{"n", n},
                                  {"a", {h.a(n).real(), h.a(n).imag()}},
                                  {"b", {h.b(n).real(), h.b(n).imag()}},
                                  {"mode", {h.modes(n).real(), h.modes(n).imag()}}});
    j["trajectory"] = nlohmann::json::array();
    for (size_t i = 0; i < traj.times.size(); ++i)
        j["trajectory"].push_back({{"t", traj.times[i]},
                                   {"s0", traj.states[i].s0},
                                   {"sm", {traj.states[i].sm.real(), traj.states[i].sm.imag()}},
                                   {"et", {traj.fields_total[i].real(),
                                           traj.fields_total[i].imag()}}});
    return j;
}

} // namespace sqob
