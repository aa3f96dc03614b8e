#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "retrend/errors.hpp"

namespace retrend {

/// Dense row-major matrix, just big enough for regression designs.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Least-squares fit with the pieces both estimators need for inference.
struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> standard_errors;  // NaN when degrees_of_freedom == 0
    double residual_sum_squares = 0.0;
    long degrees_of_freedom = 0;
    std::size_t n_observations = 0;
    std::size_t n_params = 0;
};

namespace detail {

/// Rank-revealing least squares via Householder QR with column pivoting.
/// Dropped (dependent) columns get zero coefficients; `rss` is the squared
/// distance from `y` to the span of the retained columns.
struct QrLeastSquares {
    std::vector<double> coefficients;
    std::size_t rank = 0;
    double rss = 0.0;
    std::vector<double> unscaled_variances;  // diag of (X'X)^-1, full rank only
};

inline QrLeastSquares qr_least_squares(const Matrix& design, const std::vector<double>& response,
                                       bool want_variances) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();

    // Column-major working copy; y rides along through the reflections.
    std::vector<std::vector<double>> a(p, std::vector<double>(n));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) a[j][i] = design(i, j);
    }
    std::vector<double> qty = response;
    std::vector<std::size_t> perm(p);
    for (std::size_t j = 0; j < p; ++j) perm[j] = j;

    const double eps = std::numeric_limits<double>::epsilon();
    double tol = 0.0;
    std::size_t rank = std::min(n, p);

    std::vector<double> householder(n);
    for (std::size_t k = 0; k < std::min(n, p); ++k) {
        // Pivot: bring the remaining column with the largest tail norm to slot k.
        std::size_t best = k;
        double best_norm2 = -1.0;
        for (std::size_t j = k; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += a[j][i] * a[j][i];
            if (s > best_norm2) {
                best_norm2 = s;
                best = j;
            }
        }
        if (best != k) {
            std::swap(a[best], a[k]);
            std::swap(perm[best], perm[k]);
        }
        double norm = std::sqrt(std::max(best_norm2, 0.0));
        if (k == 0) tol = static_cast<double>(std::max(n, p)) * eps * norm;
        if (norm <= tol || norm == 0.0) {
            rank = k;
            break;
        }

        // Reflect so the pivot column is zero below the diagonal.
        double x0 = a[k][k];
        double alpha = (x0 >= 0.0) ? -norm : norm;
        for (std::size_t i = k; i < n; ++i) householder[i] = a[k][i];
        householder[k] = x0 - alpha;
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) vtv += householder[i] * householder[i];
        a[k][k] = alpha;
        for (std::size_t i = k + 1; i < n; ++i) a[k][i] = 0.0;
        if (vtv > 0.0) {
            for (std::size_t j = k + 1; j < p; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) dot += householder[i] * a[j][i];
                double w = 2.0 * dot / vtv;
                for (std::size_t i = k; i < n; ++i) a[j][i] -= w * householder[i];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += householder[i] * qty[i];
            double w = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) qty[i] -= w * householder[i];
        }
    }

    QrLeastSquares out;
    out.rank = rank;
    for (std::size_t i = rank; i < n; ++i) out.rss += qty[i] * qty[i];

    // Back-substitute on the leading rank x rank triangle; dropped columns
    // keep coefficient zero.
    std::vector<double> z(rank, 0.0);
    for (std::size_t i = rank; i-- > 0;) {
        double s = qty[i];
        for (std::size_t j = i + 1; j < rank; ++j) s -= a[j][i] * z[j];
        z[i] = s / a[i][i];
    }
    out.coefficients.assign(p, 0.0);
    for (std::size_t i = 0; i < rank; ++i) out.coefficients[perm[i]] = z[i];

    if (want_variances && rank == p) {
        // U = R^-1; diag of (X'X)^-1 in original order is the squared row
        // norms of U routed back through the permutation.
        std::vector<std::vector<double>> u(p, std::vector<double>(p, 0.0));
        for (std::size_t j = p; j-- > 0;) {
            u[j][j] = 1.0 / a[j][j];
            for (std::size_t i = j; i-- > 0;) {
                double s = 0.0;
                for (std::size_t k = i + 1; k <= j; ++k) s += a[k][i] * u[k][j];
                u[i][j] = -s / a[i][i];
            }
        }
        out.unscaled_variances.assign(p, 0.0);
        for (std::size_t q = 0; q < p; ++q) {
            double s = 0.0;
            for (std::size_t k = q; k < p; ++k) s += u[q][k] * u[q][k];
            out.unscaled_variances[perm[q]] = s;
        }
    }
    return out;
}

}  // namespace detail

/**
 * Ordinary least squares with coefficient inference.
 *
 * Solves via pivoted Householder QR rather than normal equations; the rank
 * tolerance is max(n, p) * machine epsilon * largest pivot norm. Standard
 * errors come from s^2 * diag((X'X)^-1) with s^2 = RSS / (n - p), and are
 * NaN when n == p leaves no residual degrees of freedom.
 */
inline OlsFit ols_fit(const Matrix& design, const std::vector<double>& response) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();
    if (response.size() != n) {
        throw DomainError("response length " + std::to_string(response.size()) +
                          " does not match design rows " + std::to_string(n));
    }
    if (p == 0) throw DomainError("design matrix has no columns");
    if (n < p) {
        throw Underdetermined("need at least " + std::to_string(p) + " observations, got " +
                              std::to_string(n));
    }
    auto sol = detail::qr_least_squares(design, response, /*want_variances=*/true);
    if (sol.rank < p) {
        throw RankDeficient("design matrix has numerical rank " + std::to_string(sol.rank) +
                            " < " + std::to_string(p));
    }

    OlsFit fit;
    fit.coefficients = std::move(sol.coefficients);
    fit.residual_sum_squares = sol.rss;
    fit.n_observations = n;
    fit.n_params = p;
    fit.degrees_of_freedom = static_cast<long>(n) - static_cast<long>(p);
    fit.standard_errors.assign(p, std::numeric_limits<double>::quiet_NaN());
    if (fit.degrees_of_freedom >= 1) {
        double s2 = sol.rss / static_cast<double>(fit.degrees_of_freedom);
        for (std::size_t j = 0; j < p; ++j) {
            fit.standard_errors[j] = std::sqrt(s2 * sol.unscaled_variances[j]);
        }
    }
    return fit;
}

/// Projection residual sum of squares, tolerant of collinear columns.
/// Used where nested-model F statistics need an RSS even when lagged
/// designs carry exact linear dependencies.
inline double least_squares_rss(const Matrix& design, const std::vector<double>& response) {
    if (response.size() != design.rows()) {
        throw DomainError("response length does not match design rows");
    }
    return detail::qr_least_squares(design, response, /*want_variances=*/false).rss;
}

}  // namespace retrend
