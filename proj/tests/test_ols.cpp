#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "retrend/ols.hpp"
#include "retrend/rng.hpp"

using namespace retrend;

namespace {

Matrix make_design(const std::vector<std::vector<double>>& columns) {
    Matrix m(columns.front().size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < columns[j].size(); ++i) m(i, j) = columns[j][i];
    }
    return m;
}

}  // namespace

TEST_CASE("exact linear data is recovered with zero residual") {
    std::vector<double> ones(10, 1.0), t(10), y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        t[i] = static_cast<double>(i + 1);
        y[i] = 2.0 + 3.0 * t[i];
    }
    const auto fit = ols_fit(make_design({ones, t}), y);
    CHECK_THAT(fit.coefficients[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(fit.coefficients[1], Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK(fit.residual_sum_squares < 1e-18);
    CHECK(fit.degrees_of_freedom == 8);
}

TEST_CASE("intercept-only design fits the mean") {
    const auto fit = ols_fit(make_design({{1.0, 1.0, 1.0}}), {1.0, 2.0, 3.0});
    CHECK_THAT(fit.coefficients[0], Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(fit.residual_sum_squares, Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("planted 20x4 system is recovered to 1e-9 relative") {
    CounterRng rng(12345);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix design(20, 4);
        std::vector<double> beta(4);
        for (auto& b : beta) b = 10.0 * (rng.next_uniform() - 0.5);
        std::vector<double> y(20, 0.0);
        for (std::size_t i = 0; i < 20; ++i) {
            design(i, 0) = 1.0;
            for (std::size_t j = 1; j < 4; ++j) design(i, j) = 20.0 * (rng.next_uniform() - 0.5);
            for (std::size_t j = 0; j < 4; ++j) y[i] += design(i, j) * beta[j];
        }
        const auto fit = ols_fit(design, y);
        double err = 0.0, norm = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            err += (fit.coefficients[j] - beta[j]) * (fit.coefficients[j] - beta[j]);
            norm += beta[j] * beta[j];
        }
        CHECK(std::sqrt(err) <= 1e-9 * std::max(1.0, std::sqrt(norm)));
    }
}

TEST_CASE("standard errors match the closed form for simple regression") {
    // y = a + b x + e; se(b) = s / sqrt(sum (x - xbar)^2)
    CounterRng rng(777);
    const std::size_t n = 30;
    std::vector<double> ones(n, 1.0), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = 1.5 + 0.25 * x[i] + rng.next_gaussian();
    }
    const auto fit = ols_fit(make_design({ones, x}), y);

    const double xbar = (n - 1) / 2.0;
    double sxx = 0.0;
    for (double xi : x) sxx += (xi - xbar) * (xi - xbar);
    const double s2 = fit.residual_sum_squares / static_cast<double>(n - 2);
    const double se_slope = std::sqrt(s2 / sxx);
    const double se_intercept = std::sqrt(s2 * (1.0 / n + xbar * xbar / sxx));
    CHECK_THAT(fit.standard_errors[1], Catch::Matchers::WithinRel(se_slope, 1e-10));
    CHECK_THAT(fit.standard_errors[0], Catch::Matchers::WithinRel(se_intercept, 1e-10));
}

TEST_CASE("residuals are orthogonal to every design column") {
    CounterRng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 25, p = 5;
        Matrix design(n, p);
        std::vector<double> y(n);
        double ynorm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            design(i, 0) = 1.0;
            for (std::size_t j = 1; j < p; ++j) design(i, j) = rng.next_gaussian();
            y[i] = 4.0 * rng.next_gaussian();
            ynorm2 += y[i] * y[i];
        }
        const auto fit = ols_fit(design, y);
        for (std::size_t j = 0; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double residual = y[i];
                for (std::size_t k = 0; k < p; ++k) residual -= design(i, k) * fit.coefficients[k];
                dot += design(i, j) * residual;
            }
            CHECK(std::abs(dot) <= 1e-8 * std::sqrt(ynorm2));
        }
    }
}

TEST_CASE("appending an observation on the fitted plane leaves coefficients unchanged") {
    CounterRng rng(55);
    const std::size_t n = 18, p = 3;
    Matrix design(n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.next_gaussian();
        design(i, 2) = rng.next_gaussian();
        y[i] = 2.0 + design(i, 1) - 0.5 * design(i, 2) + 0.3 * rng.next_gaussian();
    }
    const auto fit = ols_fit(design, y);

    Matrix bigger(n + 2, p);
    std::vector<double> y2(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) bigger(i, j) = design(i, j);
        y2[i] = y[i];
    }
    // Two new rows placed exactly on the fitted hyperplane.
    for (std::size_t r = 0; r < 2; ++r) {
        const std::size_t i = n + r;
        bigger(i, 0) = 1.0;
        bigger(i, 1) = rng.next_gaussian();
        bigger(i, 2) = rng.next_gaussian();
        y2[i] = 0.0;
        for (std::size_t j = 0; j < p; ++j) y2[i] += bigger(i, j) * fit.coefficients[j];
    }
    const auto refit = ols_fit(bigger, y2);
    for (std::size_t j = 0; j < p; ++j) {
        CHECK_THAT(refit.coefficients[j], Catch::Matchers::WithinAbs(fit.coefficients[j], 1e-9));
    }
}

TEST_CASE("duplicating a row of noise-free data changes nothing") {
    std::vector<double> ones(6, 1.0), t{1, 2, 3, 4, 5, 6}, y(6);
    for (std::size_t i = 0; i < 6; ++i) y[i] = 7.0 - 2.0 * t[i];
    auto cols = std::vector<std::vector<double>>{ones, t};
    cols[0].push_back(1.0);
    cols[1].push_back(3.0);
    auto y2 = y;
    y2.push_back(7.0 - 2.0 * 3.0);
    const auto fit = ols_fit(make_design(cols), y2);
    CHECK_THAT(fit.coefficients[0], Catch::Matchers::WithinAbs(7.0, 1e-12));
    CHECK_THAT(fit.coefficients[1], Catch::Matchers::WithinAbs(-2.0, 1e-12));
}

TEST_CASE("error taxonomy: underdetermined and rank deficient") {
    Matrix wide(2, 3);
    CHECK_THROWS_AS(ols_fit(wide, {1.0, 2.0}), Underdetermined);

    // Third column is the sum of the first two.
    Matrix collinear(8, 3);
    CounterRng rng(8);
    std::vector<double> y(8);
    for (std::size_t i = 0; i < 8; ++i) {
        collinear(i, 0) = 1.0;
        collinear(i, 1) = rng.next_gaussian();
        collinear(i, 2) = collinear(i, 0) + collinear(i, 1);
        y[i] = rng.next_gaussian();
    }
    CHECK_THROWS_AS(ols_fit(collinear, y), RankDeficient);

    // The tolerant path still produces the projection RSS.
    const double rss = least_squares_rss(collinear, y);
    CHECK(rss >= 0.0);
    Matrix reduced(8, 2);
    for (std::size_t i = 0; i < 8; ++i) {
        reduced(i, 0) = collinear(i, 0);
        reduced(i, 1) = collinear(i, 1);
    }
    CHECK_THAT(rss, Catch::Matchers::WithinRel(ols_fit(reduced, y).residual_sum_squares, 1e-10));
}

TEST_CASE("saturated fit reports NaN standard errors") {
    Matrix square(2, 2);
    square(0, 0) = 1.0;
    square(0, 1) = 1.0;
    square(1, 0) = 1.0;
    square(1, 1) = 2.0;
    const auto fit = ols_fit(square, {1.0, 3.0});
    CHECK(fit.degrees_of_freedom == 0);
    CHECK(std::isnan(fit.standard_errors[0]));
    CHECK(std::isnan(fit.standard_errors[1]));
}
