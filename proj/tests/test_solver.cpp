#include <catch2/catch_amalgamated.hpp>

#include "pmet/solver.hpp"
#include "pmet/spaces.hpp"
#include "support/oracles.hpp"

using namespace pmet;

namespace {

const SelfMap halve{[](Point p) { return Point{p.value / 2.0}; }, "halve"};
const SelfMap identity{[](Point p) { return p; }, "identity"};

}  // namespace

TEST_CASE("Picard solve reproduces the halving-map contraction") {
    const PartialMetricSpace space = make_max_space();
    const FixedPointCertificate cert = picard_solve(space, halve, {1.0});

    CHECK(cert.valid);
    CHECK(cert.iterations == 30);
    CHECK(cert.candidate.value == std::ldexp(1.0, -30));
    CHECK(cert.candidate.value <= 1e-9);
    CHECK(cert.self_distance == cert.candidate.value);
    CHECK(cert.self_distance < cert.tol);  // zero self-distance under (b)
    REQUIRE(cert.proper.has_value());
    CHECK(cert.proper->certified());
    CHECK(cert.proper->resolution.horizon == 100);
    CHECK(cert.proper->resolution.window == 32);

    // Proof-internal identity: delta(O(x*, f)) = sup_m p(x*, f^m x*); the
    // orbit of the candidate is dominated by the candidate itself.
    double sup = 0.0;
    Point z = cert.candidate;
    for (int m = 0; m <= 64; ++m) {
        sup = std::max(sup, space.eval(cert.candidate, z));
        z = halve.apply(z);
    }
    CHECK(cert.orbit_residual == sup);
}

TEST_CASE("a fixed start point certifies in one iteration") {
    const PartialMetricSpace space = make_max_space();
    const FixedPointCertificate cert = picard_solve(space, halve, {0.0});
    CHECK(cert.valid);
    CHECK(cert.iterations == 1);
    CHECK(cert.candidate.value == 0.0);
    CHECK(cert.triple_residual == 0.0);
    CHECK(cert.self_distance == 0.0);
}

TEST_CASE("identity map: valid certificate with positive self-distance") {
    // The identity satisfies neither (a) nor (b), so a nonzero self-distance
    // does not contradict anything.
    const PartialMetricSpace space = make_max_space();
    const FixedPointCertificate cert = picard_solve(space, identity, {3.0});
    CHECK(cert.valid);
    CHECK(cert.candidate.value == 3.0);
    CHECK(cert.self_distance == 3.0);
    CHECK(cert.triple_residual == 0.0);
}

TEST_CASE("budget exhaustion returns an invalid certificate") {
    const PartialMetricSpace space = make_max_space();
    SolveOptions options;
    options.max_iter = 5;
    options.tol = 1e-12;
    const SelfMap slow{[](Point p) { return Point{0.999 * p.value}; }, "slow"};
    const FixedPointCertificate cert = picard_solve(space, slow, {1.0}, options);
    CHECK_FALSE(cert.valid);
    CHECK(cert.iterations == 5);
    CHECK(cert.triple_residual > 0.0);
    CHECK_FALSE(cert.proper.has_value());
}

TEST_CASE("iterates that leave the carrier raise a domain error") {
    const PartialMetricSpace space = make_max_space();
    const SelfMap escape{[](Point p) { return Point{p.value - 1.0}; }, "escape"};
    CHECK_THROWS_MATCHES(picard_solve(space, escape, {0.5}), std::domain_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("iterate #1")));
}

TEST_CASE("verify_fixed_point fixtures") {
    const PartialMetricSpace space = make_max_space();
    const auto at_zero = verify_fixed_point(space, halve, {0.0}, 1e-9);
    CHECK(at_zero.fixed);
    CHECK(at_zero.residual == 0.0);

    // p(1, 1/2) = 1 while p(1/2, 1/2) = 1/2: the pm1 triple splits.
    const auto at_one = verify_fixed_point(space, halve, {1.0}, 1e-9);
    CHECK_FALSE(at_one.fixed);
    CHECK(at_one.residual == 0.5);
}

TEST_CASE("verify_fixed_point agrees with exact equality on finite carriers") {
    Rng rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const auto made = make_finite_space(oracle::random_valid_table(rng, n), n);
        REQUIRE(made.accepted());
        const auto targets = oracle::random_map(rng, n);
        const SelfMap f = SelfMap::from_index_table(targets);
        for (std::size_t i = 0; i < n; ++i) {
            const auto verdict =
                verify_fixed_point(*made.space, f, {static_cast<double>(i)}, 1e-12);
            CHECK(verdict.fixed == (targets[i] == i));
        }
    }
}

TEST_CASE("dual-seed diagnostic decays with the halving map") {
    const PartialMetricSpace space = make_max_space();
    const DualSeedTrace trace = dual_seed_diagnostic(space, halve, {1.0}, {2.0}, 20);
    REQUIRE(trace.orbit_diameters.size() == 21);
    for (int n = 0; n <= 20; ++n) {
        CHECK(trace.orbit_diameters[n] == 2.0 * std::ldexp(1.0, -n));
        CHECK(trace.cross_residuals[n] == std::ldexp(1.0, 1 - n));
    }
    CHECK_THROWS_AS(dual_seed_diagnostic(space, halve, {1.0}, {2.0}, 0), std::invalid_argument);
}

TEST_CASE("dual-seed diagnostic is identically zero at a zero self-distance fixed point") {
    const PartialMetricSpace space = make_max_space();
    const DualSeedTrace trace = dual_seed_diagnostic(space, halve, {0.0}, {0.0}, 8);
    for (double d : trace.orbit_diameters) CHECK(d == 0.0);
    for (double c : trace.cross_residuals) CHECK(c == 0.0);
}

TEST_CASE("dual-seed decay lands within the geometric budget") {
    const PartialMetricSpace space = make_max_space();
    for (double r : {0.25, 0.5, 0.75}) {
        const SelfMap scale{[r](Point p) { return Point{r * p.value}; }, "scale"};
        const DualSeedTrace probe = dual_seed_diagnostic(space, scale, {1.0}, {2.0}, 1);
        const double d0 = probe.orbit_diameters[0];
        const auto budget = static_cast<std::uint64_t>(
            std::ceil(std::log(d0 / 1e-9) / std::log(1.0 / r))) + 8;
        const DualSeedTrace trace = dual_seed_diagnostic(space, scale, {1.0}, {2.0}, budget);
        CHECK(trace.orbit_diameters.back() < 1e-9);
    }
}

TEST_CASE("valid certificates verify at the same tolerance") {
    const PartialMetricSpace space = make_max_space();
    for (double r : {0.0, 0.3, 0.5}) {
        const SelfMap scale{[r](Point p) { return Point{r * p.value}; }, "scale"};
        const FixedPointCertificate cert = picard_solve(space, scale, {1.0});
        REQUIRE(cert.valid);
        CHECK(verify_fixed_point(space, scale, cert.candidate, cert.tol).fixed);
    }
}

TEST_CASE("uniqueness under exhaustive condition (a) on finite carriers") {
    Rng rng(59);
    SolveOptions options;
    options.tol = 1e-12;
    int instances = 0;
    for (int trial = 0; trial < 60 && instances < 12; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const auto table = oracle::random_valid_table(rng, n, true);
        const auto made = make_finite_space(table, n);
        REQUIRE(made.accepted());

        // Constant map onto a zero-self-distance point satisfies (a); random
        // maps are kept when the exhaustive check accepts them.
        std::vector<std::size_t> targets;
        if (trial % 2 == 0) {
            std::size_t zero = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (table[i * n + i] == 0.0) zero = i;
            }
            targets.assign(n, zero);
        } else {
            targets = oracle::random_map(rng, n);
        }
        const SelfMap f = SelfMap::from_index_table(targets);

        std::vector<std::pair<Point, Point>> pairs;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                pairs.emplace_back(Point{static_cast<double>(i)}, Point{static_cast<double>(j)});
            }
        }
        const auto verdict = check_condition_b(*made.space, f, 0.9, pairs, 8);
        if (verdict.kind != VerdictKind::Satisfied) continue;
        ++instances;

        const auto enumerated = oracle::fixed_points(targets);
        REQUIRE(enumerated.size() == 1);
        options.max_iter = 4 * n + 16;
        for (std::size_t start = 0; start < n; ++start) {
            const auto cert =
                picard_solve(*made.space, f, {static_cast<double>(start)}, options);
            REQUIRE(cert.valid);
            CHECK(cert.candidate.value == static_cast<double>(enumerated.front()));
            CHECK(cert.self_distance < options.tol);
        }
    }
    CHECK(instances >= 6);
}
