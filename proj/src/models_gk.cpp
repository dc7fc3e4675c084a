#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rsabc/models.hpp"

namespace rsabc {

namespace {

// Inverse standard-normal CDF: Acklam's rational approximation plus one
// Halley refinement through erfc, giving near machine precision.
double inverse_normal_cdf(double z) {
    require(z > 0.0 && z < 1.0, ErrorCode::invalid_argument,
            "quantile level must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (z < plow) {
        double q = std::sqrt(-2.0 * std::log(z));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (z <= 1.0 - plow) {
        double q = z - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - z));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - z;
    double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

double clamp_finite(double v, double sign_hint) {
    const double lim = 1e150;
    if (std::isnan(v)) return sign_hint >= 0.0 ? lim : -lim;
    return std::clamp(v, -lim, lim);
}

}  // namespace

double gk_from_normal(double r, double A, double B, double c, double g, double k) {
    require(B > 0.0, ErrorCode::invalid_argument, "gk requires B > 0");
    require(k > -0.5, ErrorCode::invalid_argument, "gk requires k > -0.5");
    // (1-exp(-g r))/(1+exp(-g r)) = tanh(g r / 2), stable for any g
    double skew = 1.0 + c * std::tanh(g * r / 2.0);
    return A + B * skew * std::pow(1.0 + r * r, k) * r;
}

double gk_quantile(double z, double A, double B, double c, double g, double k) {
    return gk_from_normal(inverse_normal_cdf(z), A, B, c, g, k);
}

GkModel::GkModel(size_t n_obs, double c, double log_lo, double log_hi)
    : n_obs_(n_obs), c_(c), log_lo_(log_lo), log_hi_(log_hi) {
    require(n_obs >= 8, ErrorCode::invalid_argument,
            "gk needs at least 8 observations for the percentile summaries");
    require(log_lo < log_hi, ErrorCode::invalid_argument, "bad prior bounds");
}

Dataset GkModel::simulate(const ParameterVector& theta, RandomStream& rng) const {
    require(theta.size() == 4, ErrorCode::invalid_argument, "gk theta has 4 coords");
    double A = std::exp(theta[0]), B = std::exp(theta[1]);
    double g = std::exp(theta[2]), k = std::exp(theta[3]);
    ScalarSample out;
    out.values.resize(n_obs_);
    for (double& v : out.values) {
        double r = rng.normal();
        // extreme parameters can overflow the quantile transform; keep the
        // dataset finite and let the ABC distance reject it
        v = clamp_finite(gk_from_normal(r, A, B, c_, g, k), r);
    }
    return out;
}

namespace {

SummaryVector summaries_from_quantiles(double q125, double q25, double q375,
                                       double q50, double q625, double q75,
                                       double q875) {
    double sA = q50;
    double sB = q75 - q25;
    if (sB == 0.0) return {sA, 0.0, 0.0, 0.0};  // degenerate spread
    double sg = (q75 + q25 - 2.0 * sA) / sB;
    double sk = (q875 - q625 + q375 - q125) / sB;
    return {sA, sB, sg, sk};
}

constexpr double kLevels[7] = {12.5, 25.0, 37.5, 50.0, 62.5, 75.0, 87.5};

}  // namespace

SummaryVector GkModel::summaries_from_sorted(const std::vector<double>& sorted) const {
    double q[7];
    for (int i = 0; i < 7; ++i)
        q[i] = sorted[nearest_rank_index(sorted.size(), kLevels[i]) - 1];
    return summaries_from_quantiles(q[0], q[1], q[2], q[3], q[4], q[5], q[6]);
}

SummaryVector GkModel::summarize(const Dataset& x) const {
    const auto& s = std::get<ScalarSample>(x);
    std::vector<double> sorted(s.values);
    std::sort(sorted.begin(), sorted.end());
    return summaries_from_sorted(sorted);
}

double GkModel::log_prior(const ParameterVector& theta) const {
    require(theta.size() == 4, ErrorCode::invalid_argument, "gk theta has 4 coords");
    for (double t : theta)
        if (t < log_lo_ || t > log_hi_)
            return -std::numeric_limits<double>::infinity();
    return 0.0;  // flat on the log scale; constant cancels in MH
}

ParameterVector GkModel::sample_prior(RandomStream& rng) const {
    ParameterVector t(4);
    for (double& v : t) v = rng.uniform(log_lo_, log_hi_);
    return t;
}

void GkModel::resample_summaries(const Dataset& x, const IndexMatrix& u,
                                 const BlockScheme& scheme, Matrix& out) const {
    const auto* sample = std::get_if<ScalarSample>(&x);
    size_t n = sample ? sample->values.size() : 0;
    if (scheme.kind != BlockKind::iid || !sample || u.slots != n ||
        u.candidates != n) {
        Model::resample_summaries(x, u, scheme, out);
        return;
    }
    if (out.rows != u.rows || out.cols != 4) out = Matrix(u.rows, 4);

    // Multiplicity counts per resample depend only on the frozen index matrix.
    if (cached_u_ != &u) {
        counts_.assign(u.rows * n, 0);
        for (size_t r = 0; r < u.rows; ++r) {
            uint16_t* row = counts_.data() + r * n;
            const uint32_t* idx = u.row(r);
            for (size_t s = 0; s < n; ++s) ++row[idx[s]];
        }
        cached_u_ = &u;
    }

    // Sort parent values once; a resample's k-th order statistic is found by
    // walking the sorted parent order and accumulating multiplicities. This
    // reproduces sort-based percentiles bit-for-bit (ties carry equal values).
    std::vector<std::pair<double, uint32_t>> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = {sample->values[i], static_cast<uint32_t>(i)};
    std::sort(order.begin(), order.end());

    size_t ranks[7];
    for (int i = 0; i < 7; ++i) ranks[i] = nearest_rank_index(n, kLevels[i]);

    for (size_t r = 0; r < u.rows; ++r) {
        const uint16_t* cnt = counts_.data() + r * n;
        double q[7];
        size_t acc = 0, t = 0;
        for (int i = 0; i < 7; ++i) {
            while (acc < ranks[i]) acc += cnt[order[t++].second];
            q[i] = order[t - 1].first;
        }
        SummaryVector s =
            summaries_from_quantiles(q[0], q[1], q[2], q[3], q[4], q[5], q[6]);
        for (size_t j = 0; j < 4; ++j) out(r, j) = s[j];
    }
}

}  // namespace rsabc
