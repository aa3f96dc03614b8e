#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "retrend/rdd.hpp"
#include "retrend/rng.hpp"
#include "retrend/synth.hpp"

using namespace retrend;

namespace {

EventWindow step_window(double pre_level, double post_level) {
    EventWindow w;
    w.pre.fill(pre_level);
    w.post.fill(post_level);
    return w;
}

}  // namespace

TEST_CASE("pure step: analytically forced coefficients") {
    const auto fit = fit_rdd(step_window(10.0, 30.0));
    CHECK_THAT(fit.beta0_intercept, Catch::Matchers::WithinAbs(10.0, 1e-9));
    CHECK_THAT(fit.beta1_trend, Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(fit.beta2_jump, Catch::Matchers::WithinAbs(20.0, 1e-9));
    CHECK_THAT(fit.beta3_trend_change, Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK(fit.residual_sum_squares <= 1e-9);
    CHECK_THAT(fit.ate_relative_pct, Catch::Matchers::WithinAbs(200.0, 1e-9));
    CHECK(fit.p_value_jump == 0.0);
    CHECK(fit.significant);
    CHECK_FALSE(fit.outlier);
    CHECK(fit.model_p_value == 0.0);
}

TEST_CASE("zero-baseline window is an outlier with undefined relative effect") {
    EventWindow w;
    for (std::size_t j = 0; j < kWindowHalf; ++j) w.post[j] = 4.0 * static_cast<double>(j);
    REQUIRE(has_zero_baseline(w));
    const auto fit = fit_rdd(w);
    CHECK(fit.outlier);
    CHECK(std::isnan(fit.ate_relative_pct));
}

TEST_CASE("constant window has no jump and p-value one") {
    const auto fit = fit_rdd(step_window(7.0, 7.0));
    CHECK(fit.p_value_jump == 1.0);
    CHECK_FALSE(fit.significant);
    CHECK_FALSE(fit.outlier);
    CHECK_THAT(fit.ate_relative_pct, Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("all-zero window is rejected") {
    EventWindow w;
    CHECK_THROWS_AS(fit_rdd(w), DegenerateWindow);
}

TEST_CASE("noise-free planted coefficients come back to 1e-9 relative") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        RddScenario scenario;
        scenario.seed = rng.next_u64();
        scenario.beta[0] = (rng.next_uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + 49.5 * rng.next_uniform());
        for (int j = 1; j < 4; ++j) scenario.beta[j] = 10.0 * (rng.next_uniform() - 0.5);
        scenario.noise_sigma = 0.0;
        const auto fit = fit_rdd(gen_rdd_window(scenario));
        const double recovered[4] = {fit.beta0_intercept, fit.beta1_trend, fit.beta2_jump,
                                     fit.beta3_trend_change};
        double err = 0.0, norm = 0.0;
        for (int j = 0; j < 4; ++j) {
            err += (recovered[j] - scenario.beta[j]) * (recovered[j] - scenario.beta[j]);
            norm += scenario.beta[j] * scenario.beta[j];
        }
        CHECK(std::sqrt(err) <= 1e-9 * std::sqrt(norm));
    }
}

TEST_CASE("negative-jump regime recovers the planted relative effect") {
    // y = 40 - 0.5 t - 60 [t>0] + 2 t [t>0] + noise(0.5): planted ATE is -150%.
    RddScenario scenario;
    scenario.beta = {40.0, -0.5, -60.0, 2.0};
    scenario.noise_sigma = 0.5;
    scenario.seed = 66;
    const auto fit = fit_rdd(gen_rdd_window(scenario));
    CHECK(fit.ate_relative_pct > -165.0);
    CHECK(fit.ate_relative_pct < -135.0);
    CHECK(fit.significant);
    CHECK_FALSE(fit.outlier);
}

TEST_CASE("scale invariance of relative effect, p-value, and flags") {
    CounterRng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        RddScenario scenario;
        scenario.seed = rng.next_u64();
        scenario.beta = {5.0 + 30.0 * rng.next_uniform(), rng.next_uniform() - 0.5,
                         8.0 * (rng.next_uniform() - 0.5), rng.next_uniform() - 0.5};
        scenario.noise_sigma = 0.5;
        const auto window = gen_rdd_window(scenario);
        const auto base = fit_rdd(window);
        for (double c : {0.1, 3.0, 100.0}) {
            EventWindow scaled = window;
            for (auto& v : scaled.pre) v *= c;
            for (auto& v : scaled.post) v *= c;
            const auto fit = fit_rdd(scaled);
            CHECK_THAT(fit.ate_relative_pct,
                       Catch::Matchers::WithinAbs(base.ate_relative_pct,
                                                  1e-9 * std::abs(base.ate_relative_pct)));
            CHECK_THAT(fit.p_value_jump,
                       Catch::Matchers::WithinAbs(base.p_value_jump,
                                                  1e-9 * std::max(base.p_value_jump, 1e-6)));
            CHECK(fit.significant == base.significant);
            CHECK(fit.outlier == base.outlier);
            CHECK_THAT(fit.beta2_jump, Catch::Matchers::WithinRel(c * base.beta2_jump, 1e-9));
        }
    }
}

TEST_CASE("time reversal of a pure step negates the jump") {
    const auto forward = fit_rdd(step_window(10.0, 30.0));
    EventWindow reversed;
    reversed.pre.fill(30.0);
    reversed.post.fill(10.0);
    const auto backward = fit_rdd(reversed);
    CHECK_THAT(backward.beta2_jump, Catch::Matchers::WithinAbs(-forward.beta2_jump, 1e-9));
}

TEST_CASE("null rejection rate sits near alpha") {
    CounterRng seeds(90210);
    int rejections = 0;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        RddScenario scenario;
        scenario.beta = {50.0, 0.0, 0.0, 0.0};
        scenario.noise_sigma = 4.0;
        scenario.seed = seeds.next_u64();
        if (fit_rdd(gen_rdd_window(scenario)).significant) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
}

TEST_CASE("alpha drives the significance flag") {
    RddScenario scenario;
    scenario.beta = {30.0, 0.0, 5.0, 0.0};
    scenario.noise_sigma = 4.0;
    scenario.seed = 3;
    const auto window = gen_rdd_window(scenario);
    const auto strict = fit_rdd(window, 1e-6);
    const auto loose = fit_rdd(window, 0.999999);
    CHECK(strict.p_value_jump == loose.p_value_jump);
    CHECK_FALSE(strict.significant);
    CHECK(loose.significant);
    CHECK_THROWS_AS(fit_rdd(window, 0.0), DomainError);
    CHECK_THROWS_AS(fit_rdd(window, 1.0), DomainError);
}

TEST_CASE("tiny but nonzero baseline is flagged, nonzero pre keeps the flag off") {
    EventWindow w;
    w.pre.fill(1e-9);
    w.post.fill(10.0);
    const auto fit = fit_rdd(w);
    CHECK(fit.outlier);  // |beta0| below the baseline epsilon
    CHECK(std::isnan(fit.ate_relative_pct));

    EventWindow healthy;
    healthy.pre.fill(3.0);
    healthy.post.fill(10.0);
    CHECK_FALSE(fit_rdd(healthy).outlier);
}
