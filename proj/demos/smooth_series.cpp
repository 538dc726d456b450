// Simulates a noisy random-walk emotion series and runs the filter and the
// RTS smoother over it with the default parameters (A = C = 1, Q = 1, R = 5).
//
//   ./smooth_series [steps] [seed]

#include <cstdio>
#include <cstdlib>

#include "emodyn/ssm.hpp"

using namespace emodyn;

int main(int argc, char** argv) {
    const std::size_t steps = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 25;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 11;

    const auto truth = ssm::SsmParams::univariate(1.0, 1.0, 1.0, 5.0);
    const auto sim = ssm::simulate(truth, ssm::InitialBelief::univariate(0.0, 1.0), steps, seed);

    // the standard protocol: initial mean pinned to the first observation
    const auto init = ssm::InitialBelief::univariate(sim.observed.front().value(), 2.0);
    const auto smoothed = ssm::smooth(sim.observed, truth, init);

    std::printf("%4s %10s %10s %10s %10s %10s\n", "t", "latent", "observed", "filtered",
                "smoothed", "+-1sigma");
    double tv_obs = 0.0, tv_smooth = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double f = smoothed.forward.filtered[t].mean.value();
        const double s = smoothed.smoothed[t].mean.value();
        std::printf("%4zu %10.4f %10.4f %10.4f %10.4f %10.4f\n", t + 1,
                    sim.latent[t].value(), sim.observed[t].value(), f, s,
                    std::sqrt(smoothed.smoothed[t].cov.value()));
        if (t > 0) {
            tv_obs += std::abs(sim.observed[t].value() - sim.observed[t - 1].value());
            tv_smooth += std::abs(s - smoothed.smoothed[t - 1].mean.value());
        }
    }
    std::printf("\ntotal variation: observed %.3f, smoothed %.3f\n", tv_obs, tv_smooth);
    std::printf("log-likelihood under the true parameters: %.4f\n", smoothed.forward.loglik);
    return 0;
}
