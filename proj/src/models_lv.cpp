#include <cmath>
#include <limits>

#include "rsabc/models.hpp"

namespace rsabc {

LvHazards lv_hazards(double x1, double x2, const ParameterVector& theta_natural) {
    require(theta_natural.size() == 3, ErrorCode::invalid_argument,
            "lv theta must have 3 components");
    return LvHazards{theta_natural[0] * x2, theta_natural[1] * x1 * x2,
                     theta_natural[2] * x1};
}

LotkaVolterraModel::LotkaVolterraModel(LvSettings s) : cfg_(s) {
    require(cfg_.x1_0 >= 0 && cfg_.x2_0 >= 0, ErrorCode::invalid_argument,
            "initial populations must be nonnegative");
    require(cfg_.n_obs >= 3, ErrorCode::invalid_argument,
            "need at least 3 observations for lag-2 autocorrelation");
    require(cfg_.obs_dt > 0.0, ErrorCode::invalid_argument, "obs_dt must be > 0");
    require(cfg_.t_max >= cfg_.obs_dt * static_cast<double>(cfg_.n_obs - 1),
            ErrorCode::invalid_argument, "t_max shorter than the observation grid");
    require(cfg_.max_events >= 1, ErrorCode::invalid_argument,
            "max_events must be >= 1");
    require(cfg_.prior_lo < cfg_.prior_hi, ErrorCode::invalid_argument,
            "bad prior bounds");
    require(cfg_.block >= 1 && cfg_.n_obs % cfg_.block == 0,
            ErrorCode::invalid_argument,
            "block length must divide the observation count");
}

Dataset LotkaVolterraModel::simulate_with_stats(const ParameterVector& theta,
                                                RandomStream& rng,
                                                LvPathStats* stats) const {
    require(theta.size() == 3, ErrorCode::invalid_argument,
            "lv theta must have 3 components");
    ParameterVector th = natural(theta);

    BivariateSeries out;
    out.x1.resize(cfg_.n_obs);
    out.x2.resize(cfg_.n_obs);

    long long x1 = cfg_.x1_0, x2 = cfg_.x2_0;
    double t = 0.0;
    size_t g = 0;
    LvPathStats st;
    bool linear = cfg_.interpolation == LvInterpolation::linear;

    while (g < cfg_.n_obs) {
        LvHazards h = lv_hazards(static_cast<double>(x1), static_cast<double>(x2), th);
        double total = h.total();
        if (!(total > 0.0)) break;  // extinct: freeze the rest of the grid
        if (st.n_events >= cfg_.max_events ||
            (cfg_.reaction_cap > 0 && st.n_events >= cfg_.reaction_cap)) {
            st.capped = true;
            break;
        }
        double t_next = t + rng.exponential(total);
        if (t_next > cfg_.t_max) {
            // no further event inside the window; the state holds through t_max
            t = cfg_.t_max;
            break;
        }
        double u = rng.uniform() * total;
        long long nx1 = x1, nx2 = x2;
        if (u < h.prey_birth) {
            ++nx2;
            ++st.n_births;
        } else if (u < h.prey_birth + h.interaction) {
            ++nx1;
            --nx2;
            ++st.n_interactions;
        } else {
            --nx1;
            ++st.n_deaths;
        }
        ++st.n_events;
        while (g < cfg_.n_obs) {
            double gt = cfg_.obs_dt * static_cast<double>(g);
            if (gt >= t_next) break;
            double v1 = static_cast<double>(x1), v2 = static_cast<double>(x2);
            if (linear) {
                double w = (gt - t) / (t_next - t);
                v1 += w * static_cast<double>(nx1 - x1);
                v2 += w * static_cast<double>(nx2 - x2);
            }
            out.x1[g] = v1;
            out.x2[g] = v2;
            ++g;
        }
        x1 = nx1;
        x2 = nx2;
        t = t_next;
    }
    for (; g < cfg_.n_obs; ++g) {
        out.x1[g] = static_cast<double>(x1);
        out.x2[g] = static_cast<double>(x2);
    }
    st.end_time = t;
    st.x1_end = static_cast<double>(x1);
    st.x2_end = static_cast<double>(x2);
    if (stats) *stats = st;
    return out;
}

Dataset LotkaVolterraModel::simulate(const ParameterVector& theta,
                                     RandomStream& rng) const {
    return simulate_with_stats(theta, rng, nullptr);
}

namespace {

constexpr double kVarFloor = 1e-12;

double autocorrelation(const std::vector<double>& y, size_t lag) {
    size_t n = y.size();
    double m = mean(y);
    double denom = 0.0;
    for (double v : y) denom += (v - m) * (v - m);
    if (denom <= 0.0) return 0.0;  // constant series: undefined, pinned to 0
    double num = 0.0;
    for (size_t i = 0; i + lag < n; ++i) num += (y[i] - m) * (y[i + lag] - m);
    return num / denom;
}

double cross_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = mean(a), mb = mean(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

SummaryVector LotkaVolterraModel::summarize(const Dataset& x) const {
    const auto& s = std::get<BivariateSeries>(x);
    require(s.x1.size() == cfg_.n_obs && s.x2.size() == cfg_.n_obs,
            ErrorCode::invalid_argument, "series length mismatch");
    SummaryVector out;
    out.reserve(9);
    for (const auto* series : {&s.x1, &s.x2}) {
        out.push_back(mean(*series));
        out.push_back(std::log(std::max(sample_variance(*series), kVarFloor)));
        out.push_back(autocorrelation(*series, 1));
        out.push_back(autocorrelation(*series, 2));
    }
    out.push_back(cross_correlation(s.x1, s.x2));
    return out;
}

double LotkaVolterraModel::log_prior(const ParameterVector& theta) const {
    require(theta.size() == 3, ErrorCode::invalid_argument,
            "lv theta must have 3 components");
    double lp = 0.0;
    for (double v : theta) {
        if (v < cfg_.prior_lo || v > cfg_.prior_hi)
            return -std::numeric_limits<double>::infinity();
        lp -= std::log(cfg_.prior_hi - cfg_.prior_lo);
    }
    return lp;
}

ParameterVector LotkaVolterraModel::sample_prior(RandomStream& rng) const {
    ParameterVector th(3);
    for (auto& v : th) v = rng.uniform(cfg_.prior_lo, cfg_.prior_hi);
    return th;
}

}  // namespace rsabc
