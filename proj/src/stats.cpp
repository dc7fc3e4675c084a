#include "rsabc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsabc {

double mean(const std::vector<double>& v) {
    require(!v.empty(), ErrorCode::invalid_argument, "mean of empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    require(v.size() >= 2, ErrorCode::invalid_argument,
            "sample_variance needs at least 2 values");
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) {
    require(!v.empty(), ErrorCode::invalid_argument, "median of empty vector");
    size_t n = v.size(), h = n / 2;
    std::nth_element(v.begin(), v.begin() + h, v.end());
    double hi = v[h];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + h);
    return 0.5 * (lo + hi);
}

double mad(const std::vector<double>& v) {
    double m = median(std::vector<double>(v));
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = std::fabs(v[i] - m);
    return median(std::move(dev));
}

size_t nearest_rank_index(size_t n, double p) {
    require(n >= 1, ErrorCode::invalid_argument, "percentile of empty vector");
    require(p > 0.0 && p <= 100.0, ErrorCode::invalid_argument,
            "percentile must lie in (0, 100]");
    // (p*n)/100 keeps integer-valued products exact; the epsilon guards the
    // few cases where p itself is not binary-representable.
    double raw = (p * static_cast<double>(n)) / 100.0;
    auto rank = static_cast<size_t>(std::ceil(raw - 1e-9));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return rank;
}

double nearest_rank_percentile(std::vector<double> v, double p) {
    size_t rank = nearest_rank_index(v.size(), p);
    std::nth_element(v.begin(), v.begin() + (rank - 1), v.end());
    return v[rank - 1];
}

double logsumexp(const std::vector<double>& logs) {
    require(!logs.empty(), ErrorCode::invalid_argument, "logsumexp of empty vector");
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : logs) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;  // all -inf (or a stray +inf propagates)
    double s = 0.0;
    for (double x : logs) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace rsabc
