#include "rsabc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsabc {

double iat(const std::vector<double>& series) {
    size_t n = series.size();
    require(n >= 10, ErrorCode::invalid_argument,
            "iat needs at least 10 samples");
    double mean = std::accumulate(series.begin(), series.end(), 0.0) /
                  static_cast<double>(n);
    double gamma0 = 0.0;
    for (double v : series) gamma0 += (v - mean) * (v - mean);
    gamma0 /= static_cast<double>(n);
    require(gamma0 > 0.0, ErrorCode::degenerate,
            "iat of a constant series is undefined");

    auto rho = [&](size_t k) {
        double acc = 0.0;
        for (size_t i = 0; i + k < n; ++i)
            acc += (series[i] - mean) * (series[i + k] - mean);
        return acc / (static_cast<double>(n) * gamma0);
    };

    // Geyer: Gamma_m = rho_{2m} + rho_{2m+1}; sum while positive.
    double tau = 0.0;
    for (size_t m = 0; 2 * m + 1 < n; ++m) {
        double pair = rho(2 * m) + rho(2 * m + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    tau -= 1.0;  // rho_0 counted twice above
    return std::max(tau, 1.0);
}

double ess_from_iat(size_t n_retained, double iat_value) {
    require(iat_value >= 1.0, ErrorCode::invalid_argument,
            "iat must be at least 1");
    return static_cast<double>(n_retained) / iat_value;
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), ErrorCode::invalid_argument,
            "wasserstein_1d needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t n = a.size(), m = b.size();
    if (n == m) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(n);
    }
    // L1 distance between quantile step functions: integrate over the union
    // of both step grids, reading each quantile at the segment midpoint.
    std::vector<double> cuts;
    cuts.reserve(n + m);
    for (size_t i = 1; i < n; ++i)
        cuts.push_back(static_cast<double>(i) / static_cast<double>(n));
    for (size_t j = 1; j < m; ++j)
        cuts.push_back(static_cast<double>(j) / static_cast<double>(m));
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double acc = 0.0, prev = 0.0;
    for (double cut : cuts) {
        double mid = 0.5 * (prev + cut);
        size_t ia = std::min(n - 1, static_cast<size_t>(mid * static_cast<double>(n)));
        size_t ib = std::min(m - 1, static_cast<size_t>(mid * static_cast<double>(m)));
        acc += (cut - prev) * std::abs(a[ia] - b[ib]);
        prev = cut;
    }
    return acc;
}

PosteriorSummary posterior_summary(std::vector<double> draws) {
    size_t n = draws.size();
    require(n >= 40, ErrorCode::invalid_argument,
            "posterior_summary needs at least 40 draws");
    PosteriorSummary out;
    out.mean = std::accumulate(draws.begin(), draws.end(), 0.0) /
               static_cast<double>(n);
    std::sort(draws.begin(), draws.end());
    auto k = static_cast<size_t>(std::ceil(0.025 * static_cast<double>(n)));
    k = std::max<size_t>(k, 1);
    out.lower = draws[k - 1];
    out.upper = draws[n - k];
    return out;
}

ChainDiagnostics diagnose_chain(const Chain& chain, size_t discard) {
    require(chain.size() > discard, ErrorCode::invalid_argument,
            "discard leaves an empty chain");
    size_t p = chain.rows.front().theta.size();
    ChainDiagnostics out;
    out.acceptance_rate = chain.acceptance_rate;
    out.wall_seconds = chain.wall_seconds;
    size_t retained = chain.size() - discard;
    for (size_t j = 0; j < p; ++j) {
        std::vector<double> coord = chain.coordinate(j, discard);
        double tau;
        try {
            tau = iat(coord);
        } catch (const Error&) {
            tau = static_cast<double>(retained);  // never moved
        }
        out.iat_per_coordinate.push_back(tau);
        out.ess_per_coordinate.push_back(ess_from_iat(retained, tau));
    }
    out.worst_iat = *std::max_element(out.iat_per_coordinate.begin(),
                                      out.iat_per_coordinate.end());
    out.worst_ess = *std::min_element(out.ess_per_coordinate.begin(),
                                      out.ess_per_coordinate.end());
    out.ess_per_minute = chain.wall_seconds > 0.0
                             ? out.worst_ess / (chain.wall_seconds / 60.0)
                             : 0.0;
    return out;
}

}  // namespace rsabc
