// Library tour: the incomplete space, its missing limit, and the
// fixed-point-free contraction built on top of it.

#include <cstdio>

#include "pmet/pmet.hpp"

int main() {
    const pmet::CompletionView view = pmet::make_punctured_interval();
    const pmet::WitnessMap witness(view);

    std::printf("space: (0,1] under max; missing limit u = %g with p(u,u) = %g\n",
                view.u_value(), view.u_self_distance());
    std::printf("b = %g, r = %g, k(1) = %llu, k(2) = %llu\n", witness.b(), witness.r(),
                static_cast<unsigned long long>(witness.stabilization_index(1)),
                static_cast<unsigned long long>(witness.stabilization_index(2)));

    for (double x : {1.0, 0.3, 0.04, 0.01}) {
        const pmet::Point fx = witness.apply({x});
        std::printf("x = %-6g n(x) = %-2d f(x) = %-8g p(fx,u)/p(x,u) = %.3f\n", x,
                    witness.partition_index({x}), fx.value, view.eval_to_u(fx) / x);
    }

    const pmet::WitnessAuditReport report = pmet::audit_witness(witness, 2000, 7);
    std::printf("audit over %llu samples: %s\n",
                static_cast<unsigned long long>(report.samples),
                report.passed() ? "all five checks hold" : "FAILED");
    return report.passed() ? 0 : 1;
}
