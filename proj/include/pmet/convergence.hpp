#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pmet/core.hpp"
#include "pmet/spaces.hpp"

namespace pmet {

enum class Verdict { CertifiedAtResolution, NotCertified };

enum class ConvergenceKind { Tau, Proper, Cauchy, PairwiseIdentity };

inline const char* convergence_kind_name(ConvergenceKind k) {
    switch (k) {
        case ConvergenceKind::Tau: return "tau";
        case ConvergenceKind::Proper: return "proper";
        case ConvergenceKind::Cauchy: return "cauchy";
        case ConvergenceKind::PairwiseIdentity: return "pairwise_identity";
    }
    return "?";
}

struct Resolution {
    std::uint64_t horizon = 10000;  // N
    std::uint64_t window = 64;      // W, tail length inspected
    double tol = 1e-9;              // eps
};

/// Outcome of a tail-residual check. CertifiedAtResolution means every
/// inspected residual fell below tol; NotCertified means "not established at
/// this resolution", never "divergent" -- limits are undecidable from finite
/// prefixes.
struct ConvergenceReport {
    Verdict verdict = Verdict::NotCertified;
    ConvergenceKind kind = ConvergenceKind::Tau;
    std::optional<double> estimated_limit_value;  // the Cauchy value a, when estimated
    double max_tail_residual = 0.0;
    Resolution resolution;
    std::vector<double> residuals;  // everything the verdict was based on
    bool certified() const { return verdict == Verdict::CertifiedAtResolution; }
};

/// A finitely realized sequence: a pure index -> point generator (1-based),
/// a horizon N, and the evaluator of the space the points live in. The
/// evaluator may be a CompletionView extension so that the missing point can
/// serve as an anchor.
class SequenceTrace {
public:
    using Generator = std::function<Point(std::uint64_t)>;

    SequenceTrace(const PartialMetricSpace& space, Generator gen, std::uint64_t horizon)
        : gen_(std::move(gen)),
          horizon_(horizon),
          eval_([space](Point a, Point b) { return space.eval(a, b); }),
          contains_([space](Point p) { return space.contains(p); }) {}

    SequenceTrace(const CompletionView& view, Generator gen, std::uint64_t horizon)
        : gen_(std::move(gen)),
          horizon_(horizon),
          eval_([view](Point a, Point b) { return view.eval_ext(a, b); }),
          contains_([view](Point p) { return view.is_u(p) || view.base().contains(p); }) {}

    /// Trace over an already materialized prefix.
    static SequenceTrace from_points(const PartialMetricSpace& space, std::vector<Point> points) {
        auto shared = std::make_shared<std::vector<Point>>(std::move(points));
        const std::uint64_t n = shared->size();
        return SequenceTrace(space, [shared](std::uint64_t i) { return (*shared)[i - 1]; }, n);
    }

    std::uint64_t horizon() const { return horizon_; }
    Point at(std::uint64_t i) const { return gen_(i); }
    double eval(Point a, Point b) const { return eval_(a, b); }
    bool carrier_contains(Point p) const { return contains_(p); }

private:
    Generator gen_;
    std::uint64_t horizon_;
    std::function<double(Point, Point)> eval_;
    std::function<bool(Point)> contains_;
};

namespace detail {

inline void require_window(const SequenceTrace& trace, std::uint64_t window) {
    if (window < 1 || window > trace.horizon()) {
        throw std::invalid_argument("tail window must satisfy 1 <= W <= N");
    }
}

inline void require_anchor(const SequenceTrace& trace, Point x) {
    if (!trace.carrier_contains(x)) {
        throw std::domain_error("anchor point is outside the trace's carrier");
    }
}

inline ConvergenceReport finish(ConvergenceReport report) {
    double worst = 0.0;
    for (double r : report.residuals) worst = std::max(worst, r);
    report.max_tail_residual = worst;
    report.verdict = worst < report.resolution.tol ? Verdict::CertifiedAtResolution
                                                   : Verdict::NotCertified;
    return report;
}

}  // namespace detail

/// tau(p)-convergence to x: residuals |p(x, x_n) - p(x, x)| over the last W
/// indices.
inline ConvergenceReport analyze_tau_convergence(const SequenceTrace& trace, Point x,
                                                 std::uint64_t window, double tol) {
    detail::require_window(trace, window);
    detail::require_anchor(trace, x);
    ConvergenceReport report;
    report.kind = ConvergenceKind::Tau;
    report.resolution = {trace.horizon(), window, tol};
    const double pxx = trace.eval(x, x);
    for (std::uint64_t n = trace.horizon() - window + 1; n <= trace.horizon(); ++n) {
        const Point xn = trace.at(n);
        report.residuals.push_back(std::fabs(trace.eval(x, xn) - pxx));
    }
    return detail::finish(std::move(report));
}

/// Proper convergence to x: tau(p)-convergence plus p(x_n, x_n) -> p(x, x).
/// The stored residual at index n is the larger of the two families.
inline ConvergenceReport analyze_proper_convergence(const SequenceTrace& trace, Point x,
                                                    std::uint64_t window, double tol) {
    detail::require_window(trace, window);
    detail::require_anchor(trace, x);
    ConvergenceReport report;
    report.kind = ConvergenceKind::Proper;
    report.resolution = {trace.horizon(), window, tol};
    const double pxx = trace.eval(x, x);
    for (std::uint64_t n = trace.horizon() - window + 1; n <= trace.horizon(); ++n) {
        const Point xn = trace.at(n);
        const double tau_residual = std::fabs(trace.eval(x, xn) - pxx);
        const double self_residual = std::fabs(trace.eval(xn, xn) - pxx);
        report.residuals.push_back(std::max(tau_residual, self_residual));
    }
    return detail::finish(std::move(report));
}

/// p-Cauchy detection: the pairwise values p(x_n, x_m) over the tail must sit
/// within tol of a, where a is estimated from the final pair p(x_{N-1}, x_N).
/// The tolerance check subsumes the estimator's own error.
inline ConvergenceReport detect_cauchy(const SequenceTrace& trace, std::uint64_t window,
                                       double tol) {
    detail::require_window(trace, window);
    ConvergenceReport report;
    report.kind = ConvergenceKind::Cauchy;
    report.resolution = {trace.horizon(), window, tol};
    const std::uint64_t N = trace.horizon();
    const double a = N >= 2 ? trace.eval(trace.at(N - 1), trace.at(N))
                            : trace.eval(trace.at(N), trace.at(N));
    report.estimated_limit_value = a;
    std::vector<Point> tail;
    tail.reserve(window);
    for (std::uint64_t n = N - window + 1; n <= N; ++n) tail.push_back(trace.at(n));
    for (std::size_t i = 0; i < tail.size(); ++i) {
        for (std::size_t j = i; j < tail.size(); ++j) {
            report.residuals.push_back(std::fabs(trace.eval(tail[i], tail[j]) - a));
        }
    }
    return detail::finish(std::move(report));
}

/// Pairwise limit identity p(x_m, x_n) -> p(x, x) over tail pairs. Requires a
/// certified proper limit first; without one the identity is meaningless, so
/// the precondition is enforced with a contract_error.
inline ConvergenceReport check_pairwise_limit_identity(const SequenceTrace& trace, Point x,
                                                       std::uint64_t window, double tol) {
    const ConvergenceReport proper = analyze_proper_convergence(trace, x, window, tol);
    if (!proper.certified()) {
        throw contract_error(
            "check_pairwise_limit_identity: proper convergence is not certified at this "
            "resolution; certify analyze_proper_convergence(trace, x) first");
    }
    ConvergenceReport report;
    report.kind = ConvergenceKind::PairwiseIdentity;
    report.resolution = {trace.horizon(), window, tol};
    const double pxx = trace.eval(x, x);
    report.estimated_limit_value = pxx;
    std::vector<Point> tail;
    tail.reserve(window);
    for (std::uint64_t n = trace.horizon() - window + 1; n <= trace.horizon(); ++n) {
        tail.push_back(trace.at(n));
    }
    for (std::size_t i = 0; i < tail.size(); ++i) {
        for (std::size_t j = i; j < tail.size(); ++j) {
            report.residuals.push_back(std::fabs(trace.eval(tail[i], tail[j]) - pxx));
        }
    }
    return detail::finish(std::move(report));
}

/// Every grid point whose tau(p)-convergence certifies. Two or more entries
/// demonstrate the non-uniqueness of tau(p)-limits.
inline std::vector<std::pair<Point, ConvergenceReport>> enumerate_tau_limits(
    const SequenceTrace& trace, const std::vector<Point>& grid, std::uint64_t window, double tol) {
    if (grid.empty()) throw std::invalid_argument("enumerate_tau_limits: grid must be nonempty");
    std::vector<std::pair<Point, ConvergenceReport>> certified;
    for (Point x : grid) {
        ConvergenceReport report = analyze_tau_convergence(trace, x, window, tol);
        if (report.certified()) certified.emplace_back(x, std::move(report));
    }
    return certified;
}

}  // namespace pmet
