#include <catch2/catch_amalgamated.hpp>

#include "pmet/convergence.hpp"
#include "pmet/spaces.hpp"

using namespace pmet;

namespace {

SequenceTrace harmonic_trace(const PartialMetricSpace& space, std::uint64_t horizon) {
    return SequenceTrace(
        space, [](std::uint64_t n) { return Point{1.0 / static_cast<double>(n)}; }, horizon);
}

SequenceTrace constant_trace(const PartialMetricSpace& space, double c, std::uint64_t horizon) {
    return SequenceTrace(space, [c](std::uint64_t) { return Point{c}; }, horizon);
}

}  // namespace

TEST_CASE("tau convergence of the harmonic sequence") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100000);

    const auto at_zero = analyze_tau_convergence(trace, {0.0}, 100, 1e-3);
    CHECK(at_zero.certified());
    CHECK(at_zero.kind == ConvergenceKind::Tau);

    // Spurious tau-limit: p(0.5, 1/n) = 0.5 = p(0.5, 0.5) for n > 2.
    const auto at_half = analyze_tau_convergence(trace, {0.5}, 100, 1e-3);
    CHECK(at_half.certified());
    CHECK(at_half.max_tail_residual == 0.0);

    const auto constant = constant_trace(space, 2.5, 1000);
    const auto at_self = analyze_tau_convergence(constant, {2.5}, 64, 1e-12);
    CHECK(at_self.certified());
    CHECK(at_self.max_tail_residual == 0.0);
}

TEST_CASE("proper convergence kills the spurious limits") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100000);

    CHECK(analyze_proper_convergence(trace, {0.0}, 100, 1e-3).certified());
    const auto at_half = analyze_proper_convergence(trace, {0.5}, 100, 1e-3);
    CHECK_FALSE(at_half.certified());
    CHECK(at_half.max_tail_residual > 0.49);  // p(x_n, x_n) -> 0, not 0.5

    const auto constant = constant_trace(space, 2.5, 1000);
    CHECK(analyze_proper_convergence(constant, {2.5}, 64, 1e-12).certified());
}

TEST_CASE("argument and domain errors") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100);
    CHECK_THROWS_AS(analyze_tau_convergence(trace, {0.0}, 101, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(analyze_tau_convergence(trace, {0.0}, 0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(analyze_tau_convergence(trace, {-1.0}, 10, 1e-3), std::domain_error);
    CHECK_THROWS_AS(analyze_proper_convergence(trace, {-1.0}, 10, 1e-3), std::domain_error);
}

TEST_CASE("Cauchy detection") {
    const PartialMetricSpace space = make_max_space();

    SECTION("harmonic sequence: a sits near zero") {
        const SequenceTrace trace = harmonic_trace(space, 100000);
        const auto report = detect_cauchy(trace, 64, 1e-3);
        CHECK(report.certified());
        REQUIRE(report.estimated_limit_value.has_value());
        CHECK(*report.estimated_limit_value == 1.0 / 99999.0);
    }

    SECTION("constant sequence: a equals the constant, not zero") {
        const SequenceTrace trace = constant_trace(space, 3.0, 1000);
        const auto report = detect_cauchy(trace, 64, 1e-9);
        CHECK(report.certified());
        CHECK(*report.estimated_limit_value == 3.0);
    }

    SECTION("alternating sequence is not certified") {
        const SequenceTrace trace(
            space, [](std::uint64_t n) { return Point{n % 2 == 0 ? 0.0 : 1.0}; }, 1000);
        const auto report = detect_cauchy(trace, 64, 0.5);
        CHECK_FALSE(report.certified());
        CHECK(report.max_tail_residual >= 1.0);
    }
}

TEST_CASE("pairwise limit identity") {
    const PartialMetricSpace space = make_max_space();

    const SequenceTrace trace = harmonic_trace(space, 100000);
    const auto report = check_pairwise_limit_identity(trace, {0.0}, 100, 1e-3);
    CHECK(report.certified());

    const SequenceTrace constant = constant_trace(space, 2.0, 1000);
    const auto at_self = check_pairwise_limit_identity(constant, {2.0}, 64, 1e-12);
    CHECK(at_self.certified());
    CHECK(at_self.max_tail_residual == 0.0);

    // No proper limit exists inside the punctured carrier: proper convergence
    // at any x > 0 would force p(x, x) = 0.
    const PartialMetricSpace punctured = make_punctured_interval().base();
    const SequenceTrace tail = harmonic_trace(punctured, 100000);
    for (double x : {0.1, 0.5, 1.0}) {
        CHECK_THROWS_AS(check_pairwise_limit_identity(tail, {x}, 64, 1e-6), contract_error);
    }
}

TEST_CASE("tau-limit enumeration shows non-uniqueness") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100000);

    const std::vector<Point> grid{{0.1}, {0.5}, {1.0}};
    const auto limits = enumerate_tau_limits(trace, grid, 100, 1e-3);
    CHECK(limits.size() == 3);

    const auto zero_only = enumerate_tau_limits(trace, {{0.0}}, 100, 1e-3);
    CHECK(zero_only.size() == 1);

    const SequenceTrace constant = constant_trace(space, 5.0, 1000);
    CHECK(enumerate_tau_limits(constant, {{1.0}, {2.0}}, 64, 1e-3).empty());

    CHECK_THROWS_AS(enumerate_tau_limits(trace, {}, 100, 1e-3), std::invalid_argument);
}

TEST_CASE("proper convergence implies tau convergence at the same resolution") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace harmonic = harmonic_trace(space, 100000);
    const SequenceTrace constant = constant_trace(space, 1.25, 2000);
    const SequenceTrace geometric(
        space, [](std::uint64_t n) { return Point{std::pow(0.5, static_cast<double>(n))}; }, 200);

    struct Fixture {
        const SequenceTrace* trace;
        Point anchor;
        std::uint64_t window;
        double tol;
    };
    const Fixture fixtures[] = {
        {&harmonic, {0.0}, 100, 1e-3},
        {&harmonic, {0.5}, 100, 1e-3},  // proper fails here; implication is vacuous
        {&constant, {1.25}, 64, 1e-12},
        {&geometric, {0.0}, 32, 1e-9},
    };
    for (const auto& fixture : fixtures) {
        const auto proper =
            analyze_proper_convergence(*fixture.trace, fixture.anchor, fixture.window, fixture.tol);
        if (proper.certified()) {
            CHECK(analyze_tau_convergence(*fixture.trace, fixture.anchor, fixture.window,
                                          fixture.tol)
                      .certified());
        }
    }
}

TEST_CASE("proper limits are unique up to the certified residuals") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100000);
    const double eps = 1e-3;

    // Every pair of anchors that both certify must satisfy the pm1-style
    // identities within 3 eps.
    std::vector<Point> certified;
    for (double x : {0.0, 1e-5, 2e-4, 0.1, 0.5}) {
        if (analyze_proper_convergence(trace, {x}, 100, eps).certified()) {
            certified.push_back({x});
        }
    }
    REQUIRE(certified.size() >= 2);  // 0 and the tiny anchors
    for (std::size_t a = 0; a < certified.size(); ++a) {
        for (std::size_t b = a + 1; b < certified.size(); ++b) {
            const double pxy = space.eval(certified[a], certified[b]);
            const double pxx = space.eval(certified[a], certified[a]);
            const double pyy = space.eval(certified[b], certified[b]);
            CHECK(std::fabs(pxy - pxx) < 3 * eps);
            CHECK(std::fabs(pxy - pyy) < 3 * eps);
            CHECK(std::fabs(certified[a].value - certified[b].value) < 3 * eps);
        }
    }
}

TEST_CASE("properly convergent sequences are Cauchy with a near p(x,x)") {
    const PartialMetricSpace space = make_max_space();
    struct Fixture {
        SequenceTrace trace;
        Point anchor;
        std::uint64_t window;
        double tol;
    };
    Fixture fixtures[] = {
        {harmonic_trace(space, 100000), {0.0}, 64, 1e-3},
        {constant_trace(space, 2.0, 1000), {2.0}, 64, 1e-9},
        {SequenceTrace(space,
                       [](std::uint64_t n) { return Point{std::pow(0.5, static_cast<double>(n))}; },
                       200),
         {0.0},
         32,
         1e-9},
    };
    for (auto& fixture : fixtures) {
        const auto proper =
            analyze_proper_convergence(fixture.trace, fixture.anchor, fixture.window, fixture.tol);
        REQUIRE(proper.certified());
        const auto cauchy = detect_cauchy(fixture.trace, fixture.window, fixture.tol);
        CHECK(cauchy.certified());
        const double pxx = fixture.trace.eval(fixture.anchor, fixture.anchor);
        CHECK(std::fabs(*cauchy.estimated_limit_value - pxx) < 2 * fixture.tol);
    }
}

TEST_CASE("certification is monotone in the tolerance") {
    const PartialMetricSpace space = make_max_space();
    const SequenceTrace trace = harmonic_trace(space, 100000);
    const double ladder[] = {1e-4, 1e-3, 1e-2, 1e-1};
    bool seen_certified = false;
    for (double eps : ladder) {
        const bool certified = analyze_proper_convergence(trace, {0.0}, 100, eps).certified();
        if (seen_certified) CHECK(certified);
        seen_certified = seen_certified || certified;
    }
    CHECK(seen_certified);
}

TEST_CASE("traces over the completion certify the canonical sequence at u") {
    const CompletionView view = make_punctured_interval();
    const SequenceTrace trace(
        view, [](std::uint64_t n) { return Point{1.0 / static_cast<double>(n)}; }, 100000);
    const Point u{view.u_value()};
    CHECK(analyze_proper_convergence(trace, u, 64, 1e-3).certified());
    CHECK(check_pairwise_limit_identity(trace, u, 64, 1e-3).certified());
}
