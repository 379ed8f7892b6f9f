#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "pmet/contraction.hpp"
#include "pmet/convergence.hpp"
#include "pmet/core.hpp"

namespace pmet {

struct VerifyResult {
    bool fixed = false;
    double residual = 0.0;
};

/// The pm1 equality test applied to the pair (x, fx): x is reported fixed iff
/// p(x,x), p(x,fx) and p(fx,fx) agree within eps. In a partial metric a small
/// p(x, fx) alone proves nothing, since self-distances need not vanish.
inline VerifyResult verify_fixed_point(const PartialMetricSpace& space, const SelfMap& f, Point x,
                                       double eps) {
    const Point fx = f.apply(x);
    const double pxfx = space.eval(x, fx);
    const double residual = std::max(std::fabs(space.eval(x, x) - pxfx),
                                     std::fabs(space.eval(fx, fx) - pxfx));
    return VerifyResult{residual < eps, residual};
}

struct SolveOptions {
    std::uint64_t max_iter = 1000;
    double tol = 1e-9;
    std::uint64_t proper_horizon = 100;  // trace length for the attached report
    std::uint64_t proper_window = 32;
    std::uint64_t orbit_depth = 64;      // truncation for the delta(O(x*, f)) estimate
};

struct FixedPointCertificate {
    Point candidate;                      // x*
    std::uint64_t iterations = 0;
    double triple_residual = 0.0;         // pm1 test at (x*, fx*)
    double self_distance = 0.0;           // p(x*, x*)
    double orbit_residual = 0.0;          // truncated delta(O(x*, f))
    std::optional<ConvergenceReport> proper;  // iterate trace against x*, on success
    bool valid = false;                   // triple_residual < tol
    double tol = 0.0;
};

namespace detail {

/// Extends the realized Picard orbit x_1..x_k to length `upto`, throwing a
/// domain error that names the first iterate leaving the carrier.
inline void extend_picard_orbit(const PartialMetricSpace& space, const SelfMap& f, Point x0,
                                std::vector<Point>& iterates, std::uint64_t upto) {
    while (iterates.size() < upto) {
        const Point prev = iterates.empty() ? x0 : iterates.back();
        const Point next = f.apply(prev);
        if (!space.contains(next)) {
            std::ostringstream os;
            os << "Picard iterate #" << (iterates.size() + 1) << " (value " << next.value
               << ") left the carrier of space '" << space.label() << "'";
            throw std::domain_error(os.str());
        }
        iterates.push_back(next);
    }
}

}  // namespace detail

/// Picard iteration x_{n+1} = f(x_n). Stops when the pm1 triple residual at
/// the current step drops below tol, in which case the newest iterate is the
/// candidate, the orbit-diameter estimate is taken at it and the iterate
/// trace is analyzed for proper convergence against it. Exhausting max_iter
/// is not an error: the certificate comes back invalid, carrying the best
/// residual seen.
inline FixedPointCertificate picard_solve(const PartialMetricSpace& space, const SelfMap& f,
                                          Point x0, const SolveOptions& options = {}) {
    if (options.max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
    space.require_in_carrier(x0);

    FixedPointCertificate cert;
    cert.tol = options.tol;

    std::vector<Point> iterates;
    Point x = x0;
    double best_residual = std::numeric_limits<double>::infinity();
    Point best_point = x0;
    for (std::uint64_t k = 1; k <= options.max_iter; ++k) {
        detail::extend_picard_orbit(space, f, x0, iterates, k);
        const Point fx = iterates[k - 1];
        const double pxfx = space.eval(x, fx);
        const double residual = std::max(std::fabs(space.eval(x, x) - pxfx),
                                         std::fabs(space.eval(fx, fx) - pxfx));
        if (residual < best_residual) {
            best_residual = residual;
            best_point = fx;
        }
        if (residual < options.tol) {
            cert.candidate = fx;
            cert.iterations = k;
            cert.triple_residual = residual;
            cert.valid = true;
            break;
        }
        x = fx;
    }

    if (!cert.valid) {
        cert.candidate = best_point;
        cert.iterations = options.max_iter;
        cert.triple_residual = best_residual;
        cert.self_distance = space.eval(cert.candidate, cert.candidate);
        // No further iteration on the exhausted path: the orbit estimate is
        // the depth-0 truncation.
        cert.orbit_residual = cert.self_distance;
        return cert;
    }

    cert.self_distance = space.eval(cert.candidate, cert.candidate);
    cert.orbit_residual =
        orbit_diameter(space, f, cert.candidate, std::nullopt, options.orbit_depth).diameter();
    const std::uint64_t horizon =
        std::max(options.proper_horizon, cert.iterations + options.proper_window);
    detail::extend_picard_orbit(space, f, x0, iterates, horizon);
    iterates.resize(horizon);
    const SequenceTrace trace = SequenceTrace::from_points(space, std::move(iterates));
    cert.proper =
        analyze_proper_convergence(trace, cert.candidate, options.proper_window, options.tol);
    return cert;
}

/// The two-seed decay diagnostic: d_n = delta(O(x_n, y_n, f)) (truncated at
/// inner_depth) together with the cross residuals p(x_n, y_n), for
/// n = 0..depth.
struct DualSeedTrace {
    std::vector<double> orbit_diameters;  // d_n
    std::vector<double> cross_residuals;  // p(x_n, y_n)
    std::vector<Point> xs, ys;
};

inline DualSeedTrace dual_seed_diagnostic(const PartialMetricSpace& space, const SelfMap& f,
                                          Point x0, Point y0, std::uint64_t depth,
                                          std::uint64_t inner_depth = 64) {
    if (depth < 1) throw std::invalid_argument("dual_seed_diagnostic: depth must be >= 1");
    DualSeedTrace trace;
    Point x = x0;
    Point y = y0;
    for (std::uint64_t n = 0; n <= depth; ++n) {
        trace.xs.push_back(x);
        trace.ys.push_back(y);
        trace.orbit_diameters.push_back(
            orbit_diameter(space, f, x, y, inner_depth).diameter());
        trace.cross_residuals.push_back(space.eval(x, y));
        x = f.apply(x);
        y = f.apply(y);
    }
    return trace;
}

}  // namespace pmet
