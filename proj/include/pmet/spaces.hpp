#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmet/core.hpp"

namespace pmet {

/// X = [0, inf) with p(x, y) = max(x, y).
inline PartialMetricSpace make_max_space() {
    return PartialMetricSpace(CarrierKind::NonnegativeReals, "max",
                              [](double a, double b) { return a > b ? a : b; });
}

/// An incomplete space together with the one point its hand-built completion
/// adds. The base carrier is (0, 1] under max; the missing point u sits at 0
/// with p(x, u) = x and p(u, u) = 0, so the canonical sequence x_i = 1/i is
/// p-Cauchy in the base yet has no proper limit there.
class CompletionView {
public:
    CompletionView(PartialMetricSpace base, double u_value, double u_self_distance)
        : base_(std::move(base)), u_value_(u_value), u_self_(u_self_distance) {}

    const PartialMetricSpace& base() const { return base_; }

    /// Carrier value of the missing point u (in the completion only).
    double u_value() const { return u_value_; }
    double u_self_distance() const { return u_self_; }

    bool is_u(Point p) const { return p.value == u_value_; }

    /// p(x, u) for a base point x.
    double eval_to_u(Point x) const {
        base_.require_in_carrier(x);
        return x.value > u_value_ ? x.value : u_value_;
    }

    /// Extended evaluator over base points plus u. Agrees with base.eval on
    /// base*base pairs exactly.
    double eval_ext(Point a, Point b) const {
        const bool au = is_u(a);
        const bool bu = is_u(b);
        if (au && bu) return u_self_;
        if (au) return eval_to_u(b);
        if (bu) return eval_to_u(a);
        return base_.eval(a, b);
    }

    /// The canonical p-Cauchy sequence x_i = 1/i, i >= 1.
    Point canonical_point(std::uint64_t i) const {
        if (i < 1) throw std::invalid_argument("canonical_point: index must be >= 1");
        return Point{1.0 / static_cast<double>(i)};
    }

private:
    PartialMetricSpace base_;
    double u_value_;
    double u_self_;
};

inline CompletionView make_punctured_interval() {
    PartialMetricSpace base(CarrierKind::PuncturedUnitInterval, "punctured",
                            [](double a, double b) { return a > b ? a : b; });
    return CompletionView(std::move(base), 0.0, 0.0);
}

/// Outcome of finite-table validation. Rejection is an expected result for
/// fuzzed inputs, so it is carried as data rather than thrown.
struct FiniteSpaceResult {
    std::optional<PartialMetricSpace> space;
    std::vector<AxiomViolation> violations;
    bool accepted() const { return space.has_value(); }
};

/// Validates an n*n table (row-major) against pm1..pm4, exhaustively over all
/// triples, and wraps it in a FiniteTable space on success. Tables are the
/// exact brute-force oracle for the rest of the library, so validation is
/// O(n^3) with a practical cap of n <= 512.
inline FiniteSpaceResult make_finite_space(const std::vector<double>& table, std::size_t n,
                                           std::string label = "table") {
    if (n < 1) throw std::invalid_argument("make_finite_space: n must be >= 1");
    if (n > 512) throw std::invalid_argument("make_finite_space: n must be <= 512");
    if (table.size() != n * n) throw std::invalid_argument("make_finite_space: table is not n*n");

    FiniteSpaceResult result;
    auto at = [&](std::size_t i, std::size_t j) { return table[i * n + j]; };
    auto pt = [](std::size_t i) { return Point{static_cast<double>(i)}; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // pm3: p(i,j) = p(j,i). NaN entries land here too (NaN != NaN).
            if (at(i, j) != at(j, i)) {
                if (i < j) {
                    result.violations.push_back(
                        {Axiom::pm3, {pt(i), pt(j), pt(i)}, std::fabs(at(i, j) - at(j, i))});
                }
                continue;
            }
            // pm2: 0 <= p(i,i) <= p(i,j).
            const double r2 = std::max(-at(i, i), at(i, i) - at(i, j));
            if (r2 > 0.0) {
                result.violations.push_back({Axiom::pm2, {pt(i), pt(j), pt(i)}, r2});
            }
            // pm1 forward: triple equality with distinct indices.
            if (i < j && at(i, i) == at(i, j) && at(j, j) == at(i, j)) {
                result.violations.push_back(
                    {Axiom::pm1, {pt(i), pt(j), pt(i)}, static_cast<double>(j - i)});
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const double r4 = (at(i, j) + at(k, k)) - (at(i, k) + at(k, j));
                if (r4 > 0.0) {
                    result.violations.push_back({Axiom::pm4, {pt(i), pt(j), pt(k)}, r4});
                }
            }
        }
    }

    if (result.violations.empty()) {
        result.space = PartialMetricSpace::finite(std::move(label), table, n);
    }
    return result;
}

/// Plain-text table format: first line n, then n lines of n space-separated
/// decimal values.
inline FiniteSpaceResult load_finite_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table file: " + path);
    std::size_t n = 0;
    if (!(in >> n) || n < 1) throw std::runtime_error("table file must start with n >= 1: " + path);
    if (n > 512) throw std::runtime_error("table dimension exceeds the n <= 512 cap: " + path);
    std::vector<double> table(n * n);
    for (auto& v : table) {
        if (!(in >> v)) throw std::runtime_error("table file truncated: " + path);
    }
    return make_finite_space(table, n, path);
}

inline void save_finite_table(const PartialMetricSpace& space, const std::string& path) {
    if (space.kind() != CarrierKind::FiniteTable) {
        throw std::invalid_argument("save_finite_table: space is not a finite table");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write table file: " + path);
    const std::size_t n = space.table_size();
    out << n << "\n";
    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // 17 significant digits round-trip any double exactly.
            std::snprintf(buf, sizeof buf, "%.17g", space.table_value(i, j));
            out << buf << (j + 1 < n ? " " : "\n");
        }
    }
}

}  // namespace pmet
