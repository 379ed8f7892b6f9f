#pragma once

#include <cstdio>
#include <optional>
#include <string>

#include <json.hpp>

#include "pmet/contraction.hpp"
#include "pmet/convergence.hpp"
#include "pmet/core.hpp"
#include "pmet/solver.hpp"
#include "pmet/spaces.hpp"
#include "pmet/witness.hpp"

namespace pmet {

// Field order is fixed so that identical runs produce byte-identical
// artifacts.
using Json = nlohmann::ordered_json;

inline Json to_json(const AxiomViolation& v) {
    return Json{{"axiom", axiom_name(v.axiom)},
                {"witness", {v.witness[0].value, v.witness[1].value, v.witness[2].value}},
                {"residual", v.residual}};
}

inline Json to_json(const AxiomAuditReport& report) {
    Json violations = Json::array();
    for (const auto& v : report.violations) violations.push_back(to_json(v));
    return Json{{"trials", report.trials}, {"passed", report.passed()},
                {"violations", violations}};
}

inline Json to_json(const ConvergenceReport& report) {
    Json j{{"kind", convergence_kind_name(report.kind)},
           {"verdict", report.certified() ? "certified_at_resolution" : "not_certified"},
           {"estimated_limit_value", nullptr},
           {"max_tail_residual", report.max_tail_residual},
           {"resolution",
            {{"N", report.resolution.horizon},
             {"W", report.resolution.window},
             {"eps", report.resolution.tol}}},
           {"residuals", report.residuals}};
    if (report.estimated_limit_value) j["estimated_limit_value"] = *report.estimated_limit_value;
    return j;
}

inline Json to_json(const PairCheck& pair) {
    Json j{{"x", pair.x.value},
           {"y", pair.y.value},
           {"p_fxfy", pair.p_fxfy},
           {"delta_depth", pair.delta},
           {"bound", pair.bound},
           {"margin", pair.margin},
           {"verdict", verdict_kind_name(pair.verdict)}};
    if (std::isnan(pair.delta)) j["delta_depth"] = nullptr;  // no orbit involved
    return j;
}

inline Json to_json(const ConditionVerdict& verdict) {
    Json pairs = Json::array();
    for (const auto& pair : verdict.pairs) pairs.push_back(to_json(pair));
    return Json{{"kind", verdict_kind_name(verdict.kind)},
                {"checked_pairs", verdict.checked_pairs},
                {"worst_margin", verdict.worst_margin},
                {"depth", verdict.depth},
                {"p_adapted", verdict.p_adapted},
                {"pairs", pairs}};
}

inline Json to_json(const PsiAuditReport& report) {
    Json j{{"passed", report.passed()},
           {"monotone_ok", report.monotone_ok},
           {"strict_below_ok", report.strict_below_ok},
           {"strict_below_failure_at", nullptr},
           {"zero_at_zero_ok", report.zero_at_zero_ok},
           {"right_continuity_falsified", report.right_continuity_falsified},
           {"right_continuity_failure_at", nullptr},
           {"decay_ok", report.decay_ok},
           {"decay_iterations", report.decay_iterations},
           {"decay_budget", report.decay_budget},
           {"decay_final_value", report.decay_final_value}};
    if (report.strict_below_failure_at) j["strict_below_failure_at"] = *report.strict_below_failure_at;
    if (report.right_continuity_failure_at) {
        j["right_continuity_failure_at"] = *report.right_continuity_failure_at;
    }
    return j;
}

inline Json to_json(const FixedPointCertificate& cert) {
    Json j{{"x_star", cert.candidate.value},
           {"iterations", cert.iterations},
           {"triple_residual", cert.triple_residual},
           {"self_distance", cert.self_distance},
           {"orbit_residual", cert.orbit_residual},
           {"proper", nullptr},
           {"valid", cert.valid},
           {"eps", cert.tol}};
    if (cert.proper) j["proper"] = to_json(*cert.proper);
    return j;
}

inline Json to_json(const WitnessAuditReport& report) {
    return Json{{"samples", report.samples},
                {"checks",
                 {{"no_fixed_point", report.no_fixed_point},
                  {"contraction_to_u", report.contraction_to_u},
                  {"bound_iii", report.bound_iii},
                  {"condition_b", report.condition_b},
                  {"finiteness", report.finiteness}}},
                {"worst_margins",
                 {{"no_fixed_point", report.worst_no_fixed_point},
                  {"contraction_to_u", report.worst_contraction_margin},
                  {"bound_iii", report.worst_bound_iii_margin},
                  {"condition_b", report.worst_condition_b_margin},
                  {"finiteness", report.worst_finiteness_margin}}},
                {"image_diameter",
                 {{"closed_form", report.image_diameter_closed_form},
                  {"sampled", report.image_diameter_sampled}}},
                {"b", report.b},
                {"r", report.r},
                {"seed", report.seed},
                {"eps", report.eps},
                {"passed", report.passed()}};
}

inline Json completion_sidecar_json(const CompletionView& view) {
    return Json{{"u", view.u_value()}, {"self_distance", view.u_self_distance()}};
}

/// Trace table: n, x_n, p(x, x_n), p(x_n, x_n) when an anchor is given,
/// otherwise n, x_n, p(x_n, x_n).
inline std::string trace_csv(const SequenceTrace& trace, std::optional<Point> anchor,
                             std::uint64_t stride = 1) {
    if (stride < 1) throw std::invalid_argument("trace_csv: stride must be >= 1");
    std::string out = anchor ? "n,x_n,p(x|x_n),p(x_n|x_n)\n" : "n,x_n,p(x_n|x_n)\n";
    char buf[96];
    for (std::uint64_t n = 1; n <= trace.horizon(); n += stride) {
        const Point xn = trace.at(n);
        if (anchor) {
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n",
                          static_cast<unsigned long long>(n), xn.value,
                          trace.eval(*anchor, xn), trace.eval(xn, xn));
        } else {
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g\n",
                          static_cast<unsigned long long>(n), xn.value, trace.eval(xn, xn));
        }
        out += buf;
    }
    return out;
}

}  // namespace pmet
