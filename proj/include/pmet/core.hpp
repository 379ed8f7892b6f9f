#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmet/errors.hpp"

namespace pmet {

using Rng = std::mt19937_64;

/// One element of a space's carrier. Interval carriers store the real value
/// itself; finite-table carriers store the row index (exact in a double for
/// every table size this library accepts).
struct Point {
    double value = 0.0;
};

enum class CarrierKind {
    NonnegativeReals,       // [0, inf)
    PuncturedUnitInterval,  // (0, 1]
    FiniteTable,            // indices {0, ..., n-1}
};

enum class Axiom { pm1, pm2, pm3, pm4 };

inline const char* axiom_name(Axiom a) {
    switch (a) {
        case Axiom::pm1: return "pm1";
        case Axiom::pm2: return "pm2";
        case Axiom::pm3: return "pm3";
        case Axiom::pm4: return "pm4";
    }
    return "?";
}

struct AxiomViolation {
    Axiom axiom;
    std::array<Point, 3> witness;
    double residual;  // amount by which the check failed
};

struct AxiomAuditReport {
    std::uint64_t trials = 0;
    std::vector<AxiomViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// A set with a two-point distance-like evaluator whose self-distances may be
/// positive. The evaluator is a pure function; spaces are immutable after
/// construction and safe to share across threads.
///
/// Construction does not validate the axioms; audit_axioms / check_axioms_at
/// do that on demand, and finite tables are normally built through
/// make_finite_space which validates exhaustively.
class PartialMetricSpace {
public:
    using EvalFn = std::function<double(double, double)>;

    PartialMetricSpace(CarrierKind kind, std::string label, EvalFn eval)
        : kind_(kind), label_(std::move(label)), eval_(std::move(eval)) {}

    /// Finite carrier backed by an n*n value table in row-major order.
    static PartialMetricSpace finite(std::string label, std::vector<double> table, std::size_t n) {
        PartialMetricSpace s(CarrierKind::FiniteTable, std::move(label), EvalFn{});
        s.table_ = std::move(table);
        s.n_ = n;
        return s;
    }

    CarrierKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    std::size_t table_size() const { return n_; }
    double table_value(std::size_t i, std::size_t j) const { return table_[i * n_ + j]; }
    const std::vector<double>& table() const { return table_; }

    bool contains(Point p) const {
        const double v = p.value;
        if (!std::isfinite(v)) return false;
        switch (kind_) {
            case CarrierKind::NonnegativeReals: return v >= 0.0;
            case CarrierKind::PuncturedUnitInterval: return v > 0.0 && v <= 1.0;
            case CarrierKind::FiniteTable:
                return v >= 0.0 && v < static_cast<double>(n_) && v == std::floor(v);
        }
        return false;
    }

    void require_in_carrier(Point p) const {
        if (contains(p)) return;
        std::ostringstream os;
        os << "point " << p.value << " outside carrier of space '" << label_ << "': ";
        switch (kind_) {
            case CarrierKind::NonnegativeReals: os << "value must be finite and >= 0"; break;
            case CarrierKind::PuncturedUnitInterval: os << "value must satisfy 0 < value <= 1"; break;
            case CarrierKind::FiniteTable: os << "value must be an integer index in [0, " << n_ << ")"; break;
        }
        throw std::domain_error(os.str());
    }

    /// p(x, y). Pure; throws std::domain_error if either point is outside
    /// the carrier.
    double eval(Point x, Point y) const {
        require_in_carrier(x);
        require_in_carrier(y);
        if (kind_ == CarrierKind::FiniteTable) {
            return table_value(static_cast<std::size_t>(x.value), static_cast<std::size_t>(y.value));
        }
        return eval_(x.value, y.value);
    }

    /// Carrier-point equality. Finite indices compare exactly; interval
    /// values compare within tol.
    bool points_equal(Point x, Point y, double tol) const {
        if (kind_ == CarrierKind::FiniteTable) return x.value == y.value;
        return std::fabs(x.value - y.value) <= tol;
    }

    /// Seeded draw from the carrier. Interval carriers sample log-uniformly
    /// (NonnegativeReals over [1e-6, 1e3), PuncturedUnitInterval over
    /// (1e-9, 1]) so that scale extremes are exercised; finite tables sample
    /// indices uniformly.
    Point sample(Rng& rng) const {
        const double u = unit_draw(rng);
        switch (kind_) {
            case CarrierKind::NonnegativeReals:
                return Point{1e-6 * std::pow(1e9, u)};
            case CarrierKind::PuncturedUnitInterval:
                return Point{std::pow(1e-9, u)};
            case CarrierKind::FiniteTable:
                return Point{static_cast<double>(rng() % n_)};
        }
        return Point{0.0};
    }

private:
    static double unit_draw(Rng& rng) {
        // 53-bit mantissa draw in [0, 1); identical on every platform.
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    CarrierKind kind_;
    std::string label_;
    EvalFn eval_;
    std::vector<double> table_;
    std::size_t n_ = 0;
};

inline double eval_p(const PartialMetricSpace& space, Point x, Point y) {
    return space.eval(x, y);
}

/// Audits pm1..pm4 at one triple. pm1/pm2/pm3 are evaluated on the pair
/// (x, y), pm4 on (x, y, z). Inequalities tolerate `tol`; the residual of a
/// violation is the amount by which the check failed (for the pm1 forward
/// direction, where the "check" is point equality, it is the carrier-value
/// distance between the offending pair).
inline AxiomAuditReport check_axioms_at(const PartialMetricSpace& space, Point x, Point y, Point z,
                                        double tol) {
    AxiomAuditReport report;
    report.trials = 1;

    const double pxx = space.eval(x, x);
    const double pxy = space.eval(x, y);
    const double pyy = space.eval(y, y);
    const double pyx = space.eval(y, x);
    const double pzz = space.eval(z, z);
    const double pxz = space.eval(x, z);
    const double pzy = space.eval(z, y);

    // pm1: x = y iff p(x,x) = p(x,y) = p(y,y), audited in both directions.
    const double spread = std::max(std::fabs(pxx - pxy), std::fabs(pyy - pxy));
    const bool equal = space.points_equal(x, y, tol);
    if (spread <= tol && !equal) {
        report.violations.push_back({Axiom::pm1, {x, y, z}, std::fabs(x.value - y.value)});
    } else if (equal && spread > tol) {
        report.violations.push_back({Axiom::pm1, {x, y, z}, spread});
    }

    // pm2: 0 <= p(x,x) <= p(x,y).
    const double pm2_residual = std::max(-pxx, pxx - pxy);
    if (pm2_residual > tol) {
        report.violations.push_back({Axiom::pm2, {x, y, z}, pm2_residual});
    }

    // pm3: p(x,y) = p(y,x).
    const double pm3_residual = std::fabs(pxy - pyx);
    if (pm3_residual > tol) {
        report.violations.push_back({Axiom::pm3, {x, y, z}, pm3_residual});
    }

    // pm4: p(x,y) + p(z,z) <= p(x,z) + p(z,y).
    const double pm4_residual = (pxy + pzz) - (pxz + pzy);
    if (pm4_residual > tol) {
        report.violations.push_back({Axiom::pm4, {x, y, z}, pm4_residual});
    }

    return report;
}

/// Randomized driver over check_axioms_at: `trials` seeded triples,
/// aggregated violations. Reproducible for a fixed seed.
inline AxiomAuditReport audit_axioms(const PartialMetricSpace& space, std::uint64_t trials,
                                     std::uint64_t seed, double tol) {
    if (trials < 1) throw std::invalid_argument("audit_axioms: trials must be >= 1");
    Rng rng(seed);
    AxiomAuditReport report;
    report.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Point x = space.sample(rng);
        const Point y = space.sample(rng);
        const Point z = space.sample(rng);
        AxiomAuditReport one = check_axioms_at(space, x, y, z, tol);
        report.violations.insert(report.violations.end(), one.violations.begin(),
                                 one.violations.end());
    }
    return report;
}

/// Membership in the basis ball of radius `radius` around `center`:
/// p(center, y) < radius + p(center, center), strictly.
inline bool ball_contains(const PartialMetricSpace& space, Point center, double radius, Point y) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball_contains: radius must be > 0");
    return space.eval(center, y) < radius + space.eval(center, center);
}

}  // namespace pmet
