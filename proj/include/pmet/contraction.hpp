#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmet/core.hpp"

namespace pmet {

/// A self-map of a space's carrier. `apply` must be pure; carrier closure is
/// spot-checked by the operations that iterate it, not assumed.
struct SelfMap {
    std::function<Point(Point)> apply;
    std::string label;

    static SelfMap from_index_table(const std::vector<std::size_t>& targets,
                                    std::string label = "index-map") {
        return SelfMap{[targets](Point x) {
                           return Point{static_cast<double>(targets[static_cast<std::size_t>(x.value)])};
                       },
                       std::move(label)};
    }
};

/// Truncated orbit(s) of a self-map with the running diameter
/// delta(O(x, f)) or delta(O(x, y, f)). Orbits include the seed (f^0 x = x),
/// so diameter_at_depth[0] covers the seed set alone.
struct OrbitRecord {
    std::vector<Point> seeds;               // one or two
    std::uint64_t depth = 0;
    std::vector<Point> points;              // first orbit then, if present, the second
    std::vector<double> diameter_at_depth;  // nondecreasing, size depth+1
    bool divergence_flag = false;
    bool budget_truncated = false;  // an iterate outran its realization budget

    double diameter() const { return diameter_at_depth.back(); }
};

/// delta over the truncated orbit set, by scanning all pairs among the
/// <= 2(depth+1) realized points. divergence_flag is a heuristic: it is set
/// when the diameter exceeds `cap` or is still growing at the end of the
/// scan. It can flag apparent divergence but never certifies finiteness.
///
/// Maps whose iterates exhaust a realization budget (resource_error from
/// apply) get their orbit cut at the last realizable iterate. That is just a
/// harder truncation: the realized set still under-approximates the true
/// orbit, so delta stays a sound lower bound.
inline OrbitRecord orbit_diameter(const PartialMetricSpace& space, const SelfMap& f, Point x,
                                  std::optional<Point> y, std::uint64_t depth,
                                  double cap = 1e12) {
    OrbitRecord record;
    record.depth = depth;
    record.seeds.push_back(x);
    if (y) record.seeds.push_back(*y);

    std::vector<Point> xs{x};
    std::vector<Point> ys;
    if (y) ys.push_back(*y);
    auto extend = [&](std::vector<Point>& orbit) {
        try {
            orbit.push_back(f.apply(orbit.back()));
            return true;
        } catch (const resource_error&) {
            record.budget_truncated = true;
            return false;
        }
    };
    bool xs_alive = true;
    bool ys_alive = y.has_value();
    for (std::uint64_t d = 1; d <= depth && (xs_alive || ys_alive); ++d) {
        if (xs_alive) xs_alive = extend(xs);
        if (ys_alive) ys_alive = extend(ys);
    }

    // Incremental pair scan: extend delta with the pairs the new iterates add.
    double delta = 0.0;
    std::vector<Point> seen;
    auto absorb = [&](Point p) {
        delta = std::max(delta, space.eval(p, p));
        for (Point q : seen) delta = std::max(delta, space.eval(p, q));
        seen.push_back(p);
    };
    for (std::uint64_t d = 0; d <= depth; ++d) {
        if (d < xs.size()) absorb(xs[d]);
        if (y && d < ys.size()) absorb(ys[d]);
        record.diameter_at_depth.push_back(delta);
    }

    record.points = std::move(xs);
    if (y) record.points.insert(record.points.end(), ys.begin(), ys.end());

    const double final_delta = record.diameter_at_depth.back();
    bool stabilized = true;
    if (depth >= 2) {
        const std::uint64_t w = std::max<std::uint64_t>(2, depth / 4);
        const double before = record.diameter_at_depth[depth - std::min(depth, w)];
        stabilized = (final_delta - before) <= 1e-9 * (1.0 + final_delta);
    }
    record.divergence_flag = final_delta > cap || !stabilized;
    return record;
}

/// Exact orbit diameter on a finite carrier: the orbit set closes after at
/// most n applications, so delta is computed over the full closure.
inline double exact_orbit_diameter(const PartialMetricSpace& space, const SelfMap& f, Point x,
                                   std::optional<Point> y) {
    if (space.kind() != CarrierKind::FiniteTable) {
        throw std::invalid_argument("exact_orbit_diameter requires a finite-table space");
    }
    const std::size_t n = space.table_size();
    std::vector<bool> in_set(n, false);
    std::vector<std::size_t> frontier;
    auto push = [&](Point p) {
        const auto i = static_cast<std::size_t>(p.value);
        if (!in_set[i]) {
            in_set[i] = true;
            frontier.push_back(i);
        }
    };
    push(x);
    if (y) push(*y);
    for (std::size_t k = 0; k < frontier.size(); ++k) {
        push(f.apply(Point{static_cast<double>(frontier[k])}));
    }
    double delta = 0.0;
    for (std::size_t a : frontier) {
        for (std::size_t b : frontier) {
            delta = std::max(delta, space.table_value(a, b));
        }
    }
    return delta;
}

/// Report of the four gauge-function checks: monotone on the grid, psi(t) < t
/// at each grid point (with psi(0) = 0 required as the closure at zero),
/// right-continuity falsification along shrinking offsets, and decay of the
/// recursion s_{n+1} = psi(s_n) below 1e-9 within the budget. Right
/// continuity can only be reported "not falsified" at sampling resolution.
struct PsiAuditReport {
    bool monotone_ok = true;
    bool strict_below_ok = true;
    std::optional<double> strict_below_failure_at;  // first failing grid point
    bool zero_at_zero_ok = true;
    bool right_continuity_falsified = false;
    std::optional<double> right_continuity_failure_at;
    bool decay_ok = true;
    std::uint64_t decay_iterations = 0;  // iterations used to fall below the threshold
    std::uint64_t decay_budget = 0;
    double decay_final_value = 0.0;
    bool passed() const {
        return monotone_ok && strict_below_ok && zero_at_zero_ok && !right_continuity_falsified &&
               decay_ok;
    }
};

/// A gauge function for the orbital condition. Properties are audited, never
/// assumed: run audit_psi before handing a PsiSpec to a condition check.
struct PsiSpec {
    std::function<double(double)> eval;
    std::string label;
    std::optional<PsiAuditReport> audit;  // filled in by audit_psi
};

inline std::vector<double> default_psi_grid() {
    std::vector<double> grid;
    for (double t = 1e-9; t <= 1e3; t *= 4.0) grid.push_back(t);
    return grid;
}

inline PsiAuditReport audit_psi(PsiSpec& psi, const std::vector<double>& grid,
                                std::uint64_t right_limit_steps = 12,
                                std::uint64_t decay_budget = 100000) {
    if (grid.empty()) throw std::invalid_argument("audit_psi: grid must be nonempty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
            throw std::invalid_argument("audit_psi: grid must be positive and sorted ascending");
        }
    }
    PsiAuditReport report;
    report.zero_at_zero_ok = psi.eval(0.0) == 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (psi.eval(grid[i]) > psi.eval(grid[i + 1])) report.monotone_ok = false;
    }
    for (double t : grid) {
        if (!(psi.eval(t) < t)) {
            report.strict_below_ok = false;
            if (!report.strict_below_failure_at) report.strict_below_failure_at = t;
        }
    }
    for (double t : grid) {
        const double base = psi.eval(t);
        double gap = 0.0;
        double h = 1.0;
        for (std::uint64_t k = 0; k < right_limit_steps; ++k) {
            h *= 0.1;
            gap = std::fabs(psi.eval(t + h) - base);
        }
        if (gap > 1e-6) {
            report.right_continuity_falsified = true;
            if (!report.right_continuity_failure_at) report.right_continuity_failure_at = t;
        }
    }
    report.decay_budget = decay_budget;
    double s = grid.back();
    std::uint64_t used = 0;
    while (used < decay_budget && s >= 1e-9) {
        s = psi.eval(s);
        ++used;
    }
    report.decay_iterations = used;
    report.decay_final_value = s;
    report.decay_ok = s < 1e-9;
    psi.audit = report;
    return report;
}

enum class VerdictKind { Satisfied, Inconclusive, ViolatedExact };

inline const char* verdict_kind_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::Satisfied: return "satisfied";
        case VerdictKind::Inconclusive: return "inconclusive";
        case VerdictKind::ViolatedExact: return "violated_exact";
    }
    return "?";
}

struct PairCheck {
    Point x, y;
    double p_fxfy = 0.0;
    double delta = 0.0;   // orbit diameter the bound used (NaN for Kannan/Chatterjea)
    double bound = 0.0;
    double margin = 0.0;  // bound - p_fxfy; negative means the inequality failed
    VerdictKind verdict = VerdictKind::Satisfied;
};

/// Aggregate over a pair list. Satisfied at truncated depth is sound for the
/// true condition (delta_depth <= delta and psi is nondecreasing), so a
/// Satisfied verdict never needs revisiting. A failing pair is Inconclusive
/// on continuum carriers; on finite carriers delta is recomputed exactly over
/// the orbit closure and the pair is settled as Satisfied or ViolatedExact.
struct ConditionVerdict {
    VerdictKind kind = VerdictKind::Satisfied;
    std::uint64_t checked_pairs = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::uint64_t depth = 0;
    bool p_adapted = false;  // Kannan/Chatterjea evaluated with p in place of a metric
    std::vector<PairCheck> pairs;
};

namespace detail {

inline void aggregate(ConditionVerdict& verdict, const PairCheck& pair) {
    verdict.checked_pairs += 1;
    verdict.worst_margin = std::min(verdict.worst_margin, pair.margin);
    if (pair.verdict == VerdictKind::ViolatedExact) {
        verdict.kind = VerdictKind::ViolatedExact;
    } else if (pair.verdict == VerdictKind::Inconclusive &&
               verdict.kind == VerdictKind::Satisfied) {
        verdict.kind = VerdictKind::Inconclusive;
    }
    verdict.pairs.push_back(pair);
}

}  // namespace detail

/// Orbital condition (a): p(fx, fy) <= psi(delta(O(x, y, f))). Requires a
/// passed psi audit.
inline ConditionVerdict check_condition_a(const PartialMetricSpace& space, const SelfMap& f,
                                          const PsiSpec& psi,
                                          const std::vector<std::pair<Point, Point>>& pairs,
                                          std::uint64_t depth) {
    if (!psi.audit) {
        throw contract_error("check_condition_a: psi '" + psi.label +
                             "' has not been audited; run audit_psi first");
    }
    if (!psi.audit->passed()) {
        throw contract_error("check_condition_a: psi '" + psi.label + "' failed its audit");
    }
    ConditionVerdict verdict;
    verdict.depth = depth;
    const bool finite = space.kind() == CarrierKind::FiniteTable;
    for (const auto& [x, y] : pairs) {
        PairCheck pair;
        pair.x = x;
        pair.y = y;
        pair.p_fxfy = space.eval(f.apply(x), f.apply(y));
        pair.delta = orbit_diameter(space, f, x, y, depth).diameter();
        pair.bound = psi.eval(pair.delta);
        if (pair.p_fxfy <= pair.bound) {
            pair.verdict = VerdictKind::Satisfied;
        } else if (finite) {
            pair.delta = exact_orbit_diameter(space, f, x, y);
            pair.bound = psi.eval(pair.delta);
            pair.verdict = pair.p_fxfy <= pair.bound ? VerdictKind::Satisfied
                                                     : VerdictKind::ViolatedExact;
        } else {
            pair.verdict = VerdictKind::Inconclusive;
        }
        pair.margin = pair.bound - pair.p_fxfy;
        detail::aggregate(verdict, pair);
    }
    return verdict;
}

/// Orbital condition (b): p(fx, fy) <= r * delta(O(x, y, f)); exactly
/// condition (a) with psi(t) = r t.
inline ConditionVerdict check_condition_b(const PartialMetricSpace& space, const SelfMap& f,
                                          double r,
                                          const std::vector<std::pair<Point, Point>>& pairs,
                                          std::uint64_t depth) {
    if (!(r >= 0.0 && r < 1.0)) {
        throw std::invalid_argument("check_condition_b: r must lie in [0, 1)");
    }
    PsiSpec linear{[r](double t) { return r * t; }, "linear", std::nullopt};
    // Decay budget sized to r so the implied audit passes for any r in [0,1)
    // short of 1 - 1e-7 or so.
    std::uint64_t budget = 64;
    if (r > 0.0) {
        budget += static_cast<std::uint64_t>(
            std::min(1e7, std::log(1e-12) / std::log(r)));
    }
    audit_psi(linear, default_psi_grid(), 12, budget);
    return check_condition_a(space, f, linear, pairs, depth);
}

enum class ClassicCondition { Kannan, Chatterjea };

/// Kannan (K) / Chatterjea (Ch) conditions evaluated verbatim with p in place
/// of the metric they are usually stated for; reports carry the p_adapted
/// flag. No orbit truncation is involved, so per-pair verdicts are exact on
/// any carrier.
inline ConditionVerdict check_kannan_chatterjea(const PartialMetricSpace& space, const SelfMap& f,
                                                double alpha, ClassicCondition which,
                                                const std::vector<std::pair<Point, Point>>& pairs) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw std::invalid_argument("check_kannan_chatterjea: alpha must lie in (0, 1/2)");
    }
    ConditionVerdict verdict;
    verdict.p_adapted = true;
    for (const auto& [x, y] : pairs) {
        const Point fx = f.apply(x);
        const Point fy = f.apply(y);
        PairCheck pair;
        pair.x = x;
        pair.y = y;
        pair.p_fxfy = space.eval(fx, fy);
        pair.delta = std::numeric_limits<double>::quiet_NaN();
        pair.bound = which == ClassicCondition::Kannan
                         ? alpha * (space.eval(x, fx) + space.eval(y, fy))
                         : alpha * (space.eval(x, fy) + space.eval(y, fx));
        pair.margin = pair.bound - pair.p_fxfy;
        pair.verdict = pair.p_fxfy <= pair.bound ? VerdictKind::Satisfied
                                                 : VerdictKind::ViolatedExact;
        detail::aggregate(verdict, pair);
    }
    return verdict;
}

}  // namespace pmet
