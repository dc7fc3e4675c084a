#include "rsabc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsabc {

ScalingMatrix::ScalingMatrix(std::vector<double> d) : diag(std::move(d)) {
    require(!diag.empty(), ErrorCode::invalid_argument, "empty scaling matrix");
    for (double v : diag)
        require(v > 0.0 && std::isfinite(v), ErrorCode::invalid_argument,
                "scaling matrix entries must be finite and > 0");
}

ScalingMatrix ScalingMatrix::identity(size_t n) {
    return ScalingMatrix(std::vector<double>(n, 1.0));
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "gaussian") return KernelKind::gaussian;
    if (s == "indicator") return KernelKind::indicator;
    fail(ErrorCode::invalid_argument, "unknown kernel '" + s + "'");
}

std::string to_string(KernelKind k) {
    return k == KernelKind::gaussian ? "gaussian" : "indicator";
}

double scaled_distance(const SummaryVector& s_star, const SummaryVector& s,
                       const ScalingMatrix& sigma) {
    require(s_star.size() == s.size() && s.size() == sigma.diag.size(),
            ErrorCode::invalid_argument,
            "scaled_distance: dimension mismatch");
    double q = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        double d = s_star[i] - s[i];
        q += d * d / sigma.diag[i];
    }
    return std::sqrt(q);
}

double gaussian_kernel_from_distance(double d, double delta, size_t n_s) {
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    require(d >= 0.0, ErrorCode::invalid_argument, "distance must be >= 0");
    return std::pow(delta, -static_cast<double>(n_s)) *
           std::exp(-(d * d) / (2.0 * delta * delta));
}

double log_gaussian_kernel_from_distance(double d, double delta, size_t n_s) {
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    require(d >= 0.0, ErrorCode::invalid_argument, "distance must be >= 0");
    return -static_cast<double>(n_s) * std::log(delta) -
           (d * d) / (2.0 * delta * delta);
}

double gaussian_kernel(const SummaryVector& s_star, const SummaryVector& s,
                       const ScalingMatrix& sigma, double delta) {
    double d = scaled_distance(s_star, s, sigma);
    return gaussian_kernel_from_distance(d, delta, s.size());
}

double indicator_kernel(double d, double delta) {
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    require(d >= 0.0, ErrorCode::invalid_argument, "distance must be >= 0");
    return d < delta ? 1.0 : 0.0;
}

double kernel_from_distance(KernelKind kind, double d, double delta, size_t n_s) {
    return kind == KernelKind::gaussian
               ? gaussian_kernel_from_distance(d, delta, n_s)
               : indicator_kernel(d, delta);
}

double log_kernel_from_distance(KernelKind kind, double d, double delta, size_t n_s) {
    if (kind == KernelKind::gaussian)
        return log_gaussian_kernel_from_distance(d, delta, n_s);
    return indicator_kernel(d, delta) > 0.0
               ? 0.0
               : -std::numeric_limits<double>::infinity();
}

ScalingMatrix update_sigma_mad(const Matrix& all_summaries) {
    require(all_summaries.rows >= 2, ErrorCode::invalid_argument,
            "update_sigma_mad needs at least 2 summary rows");
    std::vector<double> diag(all_summaries.cols);
    std::vector<double> col(all_summaries.rows);
    for (size_t j = 0; j < all_summaries.cols; ++j) {
        for (size_t r = 0; r < all_summaries.rows; ++r)
            col[r] = all_summaries(r, j);
        double m = mad(col);
        diag[j] = std::max(m * m, 1e-12);
    }
    return ScalingMatrix(std::move(diag));
}

}  // namespace rsabc
