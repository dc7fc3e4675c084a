#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rsabc/errors.hpp"
#include "rsabc/stats.hpp"

namespace rsabc {

// Summary statistic vector s in R^{n_s}
using SummaryVector = std::vector<double>;

// Diagonal positive-definite scaling Sigma for the distance
// d = sqrt((s*-s)' Sigma^{-1} (s*-s)). Entries are squared-summary units.
struct ScalingMatrix {
    std::vector<double> diag;

    ScalingMatrix() = default;
    explicit ScalingMatrix(std::vector<double> d);
    static ScalingMatrix identity(size_t n);

    size_t size() const { return diag.size(); }
};

enum class KernelKind { gaussian, indicator };

KernelKind kernel_kind_from_string(const std::string& s);
std::string to_string(KernelKind k);

double scaled_distance(const SummaryVector& s_star, const SummaryVector& s,
                       const ScalingMatrix& sigma);

// (1/delta^{n_s}) * exp(-d^2 / (2 delta^2)); n_s taken from the vectors.
double gaussian_kernel(const SummaryVector& s_star, const SummaryVector& s,
                       const ScalingMatrix& sigma, double delta);

// Same kernel evaluated from a precomputed distance (hot-loop form).
double gaussian_kernel_from_distance(double d, double delta, size_t n_s);
double log_gaussian_kernel_from_distance(double d, double delta, size_t n_s);

// 1 if d < delta else 0 (strict at the boundary).
double indicator_kernel(double d, double delta);

double kernel_from_distance(KernelKind kind, double d, double delta, size_t n_s);
// Log-domain value; indicator yields 0 or -inf.
double log_kernel_from_distance(KernelKind kind, double d, double delta, size_t n_s);

// Diagonal scaling from a stack of summary rows: squared raw MAD per column
// (no consistency constant), floored at 1e-12 so constant columns stay
// invertible.
ScalingMatrix update_sigma_mad(const Matrix& all_summaries);

}  // namespace rsabc
