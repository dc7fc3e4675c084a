#pragma once

#include <cstddef>
#include <vector>

#include "rsabc/errors.hpp"

namespace rsabc {

// Dense row-major matrix; all the linear algebra in this library is either
// diagonal or p x p with p <= 4, so nothing heavier is needed.
struct Matrix {
    size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return data[r * cols + c]; }
    double* row(size_t r) { return data.data() + r * cols; }
    const double* row(size_t r) const { return data.data() + r * cols; }
};

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // n-1 denominator

// Median with averaging of the two middle order statistics for even length.
double median(std::vector<double> v);

// Raw median absolute deviation (no consistency constant).
double mad(const std::vector<double>& v);

// Nearest-rank percentile: the ceil(p/100 * n)-th order statistic, p in (0, 100].
double nearest_rank_percentile(std::vector<double> v, double p);
size_t nearest_rank_index(size_t n, double p);  // 1-based rank

// log(sum(exp(x))) guarded against overflow; -inf for an all -inf input.
double logsumexp(const std::vector<double>& logs);

}  // namespace rsabc
