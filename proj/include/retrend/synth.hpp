#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "retrend/errors.hpp"
#include "retrend/rng.hpp"
#include "retrend/series.hpp"

namespace retrend {

/**
 * Forward model of the jump regression: a window generated from `beta` with
 * zero noise satisfies y(t) = b0 + b1 t + b2 [t>0] + b3 t [t>0] exactly, so
 * the estimator must hand the vector straight back.
 */
struct RddScenario {
    std::array<double, 4> beta{};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Lag-coupled pair: target_t = coupling * predictor_{t-lag} + noise.
/// coupling = 0 is the independence null.
struct GrangerScenario {
    double coupling = 0.0;
    int lag = 1;
    std::size_t length = 0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
};

inline EventWindow gen_rdd_window(const RddScenario& scenario) {
    if (scenario.noise_sigma < 0.0) {
        throw DomainError("noise_sigma must be non-negative");
    }
    CounterRng rng(derive_seed(scenario.seed, 1));
    EventWindow window;
    window.borrowed_id = "synth";
    window.borrowee_id = "synth-borrowee";
    for (std::size_t k = 0; k < 2 * kWindowHalf; ++k) {
        const double t = static_cast<double>(EventWindow::t_of_index(k));
        const double post = t > 0.0 ? 1.0 : 0.0;
        double y = scenario.beta[0] + scenario.beta[1] * t + scenario.beta[2] * post +
                   scenario.beta[3] * t * post;
        if (scenario.noise_sigma > 0.0) y += scenario.noise_sigma * rng.next_gaussian();
        if (k < kWindowHalf) {
            window.pre[k] = y;
        } else {
            window.post[k - kWindowHalf] = y;
        }
    }
    return window;
}

/// Returns (target, predictor). The predictor is unit white noise.
inline std::pair<std::vector<double>, std::vector<double>> gen_granger_pair(
    const GrangerScenario& scenario) {
    if (scenario.noise_sigma < 0.0) {
        throw DomainError("noise_sigma must be non-negative");
    }
    if (scenario.lag < 1) throw DomainError("lag must be >= 1");
    if (scenario.length == 0) throw DomainError("length must be positive");

    CounterRng predictor_rng(derive_seed(scenario.seed, 2));
    CounterRng noise_rng(derive_seed(scenario.seed, 3));
    std::vector<double> predictor(scenario.length);
    for (double& v : predictor) v = predictor_rng.next_gaussian();

    std::vector<double> target(scenario.length);
    const std::size_t lag = static_cast<std::size_t>(scenario.lag);
    for (std::size_t t = 0; t < scenario.length; ++t) {
        double v = scenario.noise_sigma > 0.0 ? scenario.noise_sigma * noise_rng.next_gaussian()
                                              : 0.0;
        if (t >= lag) v += scenario.coupling * predictor[t - lag];
        target[t] = v;
    }
    return {std::move(target), std::move(predictor)};
}

}  // namespace retrend
