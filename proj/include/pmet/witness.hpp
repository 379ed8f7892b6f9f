#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "pmet/contraction.hpp"
#include "pmet/solver.hpp"
#include "pmet/spaces.hpp"

namespace pmet {

/// The fixed-point-free self-map of the punctured interval, built from the
/// partition P_n = {x : p(x, u) <= b^n} and the stabilization indices k(n) of
/// the canonical sequence: f(x) = x_{k(2)} when n(x) <= 0, x_{k(n(x)+2)}
/// otherwise. Every point moves strictly closer to the missing limit u, so f
/// has no fixed point, yet it satisfies the orbital condition with factor r.
///
/// For the default b = 1/5 the thresholds b^n are computed from exact integer
/// powers of 5, which keeps the partition boundaries (p(x, u) = b^n counts as
/// inside P_n) and every audited inequality exact in double arithmetic. The
/// k(n) table is warmed eagerly for every n whose index stays within
/// `index_budget`; the map is immutable afterwards and safe for concurrent
/// reads. Deeper queries raise resource_error.
class WitnessMap {
public:
    explicit WitnessMap(CompletionView view, double b = 0.2, double r = 0.5,
                        std::uint64_t index_budget = 1000000000000000ULL)
        : view_(std::move(view)), b_(b), r_(r), budget_(index_budget) {
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("WitnessMap: b must lie in (0, 1)");
        if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("WitnessMap: r must lie in [0, 1)");
        if (index_budget < 1) throw std::invalid_argument("WitnessMap: index budget must be >= 1");
        warm_tables();
    }

    const CompletionView& view() const { return view_; }
    double b() const { return b_; }
    double r() const { return r_; }
    std::uint64_t index_budget() const { return budget_; }
    /// Deepest n for which k(n) fits the index budget.
    int max_stabilization_level() const { return static_cast<int>(k_cache_.size()) - 1; }

    /// b^n; tabulated a few levels past the stabilization range so that
    /// partition boundaries near the edge still classify exactly.
    double threshold(int n) const { return thresholds_.at(static_cast<std::size_t>(n)); }

    /// n(x) = max {n : p(x, u) <= b^n}. Nonnegative on this carrier since
    /// p(x, u) = x <= 1 = b^0.
    int partition_index(Point x) const {
        const double p = view_.eval_to_u(x);
        if (!(p > 0.0)) {
            throw std::domain_error("partition_index: p(x, u) must be positive");
        }
        // Logarithmic estimate, then an exact local walk over the monotone
        // threshold table; the walk absorbs the estimate's off-by-one near
        // exact powers.
        const int limit = static_cast<int>(thresholds_.size()) - 1;
        int n = static_cast<int>(std::floor(std::log(p) / std::log(b_)));
        n = std::max(0, std::min(limit, n));
        while (n > 0 && p > thresholds_[static_cast<std::size_t>(n)]) --n;
        while (n < limit && p <= thresholds_[static_cast<std::size_t>(n) + 1]) ++n;
        if (n == limit && p <= thresholds_[static_cast<std::size_t>(limit)]) {
            std::ostringstream os;
            os << "partition_index: p(x, u) = " << p << " lies below b^" << limit
               << ", beyond the partition table implied by index budget " << budget_;
            throw resource_error(os.str());
        }
        return n;
    }

    /// k(n): the smallest index with x_i in P_n for all i >= k. The canonical
    /// sequence 1/i enters each P_n monotonically, so k(n) = min {k : x_k <= b^n}.
    std::uint64_t stabilization_index(int n) const {
        if (n <= 0) return 1;  // P_n contains the whole carrier for n <= 0
        if (n > max_stabilization_level()) {
            std::ostringstream os;
            os << "stabilization_index: k(" << n << ") exceeds the index budget " << budget_;
            throw resource_error(os.str());
        }
        return k_cache_[static_cast<std::size_t>(n)];
    }

    Point apply(Point x) const {
        const int n = partition_index(x);
        const int target = n <= 0 ? 2 : n + 2;
        return view_.canonical_point(stabilization_index(target));
    }

    SelfMap as_self_map() const {
        return SelfMap{[self = *this](Point x) { return self.apply(x); }, "witness"};
    }

    /// delta(f(X)) in closed form: the image is a subset of the canonical
    /// sequence dominated by x_{k(2)}.
    double image_diameter() const {
        return view_.canonical_point(k_cache_[2]).value;
    }

private:
    void warm_tables() {
        // For the default b = 1/5 thresholds come from exact integer powers
        // of 5, so 1/k(n) == b^n holds exactly at the boundaries. The table
        // runs four classification levels past the stabilization range.
        const bool exact_fifth = (b_ == 0.2);
        thresholds_.push_back(1.0);
        std::uint64_t pow5 = 1;
        int levels_beyond_budget = 0;
        for (int n = 1; levels_beyond_budget < 4; ++n) {
            double thr;
            if (exact_fifth && pow5 <= UINT64_MAX / 5) {
                pow5 *= 5;
                thr = 1.0 / static_cast<double>(pow5);
            } else {
                thr = std::pow(b_, n);
            }
            if (!(thr > 0.0)) break;
            thresholds_.push_back(thr);
            if (1.0 / thr > static_cast<double>(budget_)) ++levels_beyond_budget;
        }

        k_cache_.push_back(1);
        for (std::size_t n = 1; n < thresholds_.size(); ++n) {
            const double thr = thresholds_[n];
            if (1.0 / thr > 9.0e18 || 1.0 / thr > 1.25 * static_cast<double>(budget_)) break;
            std::uint64_t k = static_cast<std::uint64_t>(std::ceil(1.0 / thr));
            if (k < 1) k = 1;
            while (1.0 / static_cast<double>(k) > thr) ++k;
            while (k > 1 && 1.0 / static_cast<double>(k - 1) <= thr) --k;
            if (k > budget_) break;
            k_cache_.push_back(k);
        }
        if (k_cache_.size() < 5) {
            throw std::invalid_argument(
                "WitnessMap: index budget too small to realize the partition");
        }
    }

    CompletionView view_;
    double b_;
    double r_;
    std::uint64_t budget_;
    std::vector<double> thresholds_;    // thresholds_[n] = b^n
    std::vector<std::uint64_t> k_cache_;  // k_cache_[n] = k(n)
};

/// Aggregated audit of everything the construction promises: (i) no sampled
/// point is fixed (exact carrier equality, not a tolerance test), (ii)
/// p(fx, u) <= b p(x, u), (iii) p(fx, u) <= b/(1-b) p(x, fx), (iv) the
/// orbital condition p(fx, fy) <= r delta(O(x, y, f)) at the truncation
/// depth, and (v) the finiteness bound
/// delta(O(x, y, f)) <= p(x,y) + p(x,fx) + p(y,fy) + delta(f(X)).
/// A failure here falsifies the implementation, not the construction.
struct WitnessAuditReport {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double b = 0.0;
    double r = 0.0;
    double eps = 0.0;

    bool no_fixed_point = true;
    bool contraction_to_u = true;
    bool bound_iii = true;
    bool condition_b = true;
    bool finiteness = true;

    double worst_no_fixed_point = std::numeric_limits<double>::infinity();  // min pm1 residual
    double worst_contraction_margin = std::numeric_limits<double>::infinity();
    double worst_bound_iii_margin = std::numeric_limits<double>::infinity();
    double worst_condition_b_margin = std::numeric_limits<double>::infinity();
    double worst_finiteness_margin = std::numeric_limits<double>::infinity();

    double image_diameter_closed_form = 0.0;
    double image_diameter_sampled = 0.0;

    bool passed() const {
        return no_fixed_point && contraction_to_u && bound_iii && condition_b && finiteness;
    }
};

inline WitnessAuditReport audit_witness(const WitnessMap& witness, std::uint64_t samples,
                                        std::uint64_t seed, double eps = 0.0,
                                        std::uint64_t pair_depth = 64) {
    if (samples < 1) throw std::invalid_argument("audit_witness: samples must be >= 1");
    const PartialMetricSpace& base = witness.view().base();
    const SelfMap f = witness.as_self_map();
    const double ratio = witness.b() / (1.0 - witness.b());

    WitnessAuditReport report;
    report.samples = samples;
    report.seed = seed;
    report.b = witness.b();
    report.r = witness.r();
    report.eps = eps;
    report.image_diameter_closed_form = witness.image_diameter();

    Rng rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Point x = base.sample(rng);
        const Point fx = witness.apply(x);
        report.image_diameter_sampled = std::max(report.image_diameter_sampled, fx.value);

        const double residual = verify_fixed_point(base, f, x, 1.0).residual;
        report.worst_no_fixed_point = std::min(report.worst_no_fixed_point, residual);
        if (!(residual > 0.0)) report.no_fixed_point = false;

        const double pxu = witness.view().eval_to_u(x);
        const double pfxu = witness.view().eval_to_u(fx);
        const double contraction_margin = witness.b() * pxu - pfxu;
        report.worst_contraction_margin =
            std::min(report.worst_contraction_margin, contraction_margin);
        if (contraction_margin < 0.0) report.contraction_to_u = false;

        const double bound_iii_margin = ratio * base.eval(x, fx) - pfxu;
        report.worst_bound_iii_margin = std::min(report.worst_bound_iii_margin, bound_iii_margin);
        if (bound_iii_margin < 0.0) report.bound_iii = false;
    }

    for (std::uint64_t i = 0; i < samples; ++i) {
        const Point x = base.sample(rng);
        const Point y = base.sample(rng);
        const double delta = orbit_diameter(base, f, x, y, pair_depth).diameter();

        const double condition_margin =
            witness.r() * delta - base.eval(witness.apply(x), witness.apply(y));
        report.worst_condition_b_margin =
            std::min(report.worst_condition_b_margin, condition_margin);
        if (condition_margin < 0.0) report.condition_b = false;

        const double rhs = base.eval(x, y) + base.eval(x, witness.apply(x)) +
                           base.eval(y, witness.apply(y)) + witness.image_diameter();
        const double finiteness_margin = rhs - delta;
        report.worst_finiteness_margin =
            std::min(report.worst_finiteness_margin, finiteness_margin);
        if (finiteness_margin < 0.0) report.finiteness = false;
    }

    return report;
}

}  // namespace pmet
