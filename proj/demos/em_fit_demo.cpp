// Fits the song-level model by EM on simulated sequences and prints the
// log-likelihood trace and the recovered parameters.
//
//   ./em_fit_demo [sequences] [length]

#include <cstdio>
#include <cstdlib>

#include "emodyn/ssm.hpp"

using namespace emodyn;

int main(int argc, char** argv) {
    const std::size_t count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 30;
    const std::size_t length = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 40;

    const auto truth = ssm::SsmParams::univariate(0.9, 1.0, 0.5, 2.0);
    std::vector<ssm::ObservationSequence> sequences;
    for (std::size_t i = 0; i < count; ++i) {
        auto sim = ssm::simulate(truth, ssm::InitialBelief::univariate(0.0, 1.0), length, i);
        auto init = ssm::InitialBelief::univariate(sim.observed.front().value(), 2.0);
        sequences.push_back(ssm::ObservationSequence{std::move(sim.observed), std::move(init)});
    }

    ssm::EmUpdates which;
    which.C = false;
    const auto fit = ssm::em_fit(sequences, ssm::SsmParams::univariate(1, 1, 1, 5), 15, which);

    std::printf("iter   log-likelihood\n");
    for (std::size_t i = 0; i < fit.loglik_trace.size(); ++i)
        std::printf("%4zu   %.6f\n", i, fit.loglik_trace[i]);
    std::printf("\ntruth:   A = %.3f  Q = %.3f  R = %.3f\n", 0.9, 0.5, 2.0);
    std::printf("fitted:  A = %.3f  Q = %.3f  R = %.3f\n", fit.params.A.value(),
                fit.params.Q.value(), fit.params.R.value());
    for (const auto& note : fit.diagnostics) std::printf("note: %s\n", note.c_str());
    return 0;
}
