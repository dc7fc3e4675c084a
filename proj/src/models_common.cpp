#include <cmath>

#include "rsabc/models.hpp"

namespace rsabc {

void Model::resample_summaries(const Dataset& x, const IndexMatrix& u,
                               const BlockScheme& scheme, Matrix& out) const {
    size_t ns = n_summaries();
    if (out.rows != u.rows || out.cols != ns) out = Matrix(u.rows, ns);
    Dataset scratch;
    for (size_t r = 0; r < u.rows; ++r) {
        resample_dataset(x, u, r, scheme, scratch);
        SummaryVector s = summarize(scratch);
        for (size_t j = 0; j < ns; ++j) out(r, j) = s[j];
    }
}

ParameterVector Model::natural(const ParameterVector& sampling) const {
    auto flags = log_scale();
    require(sampling.size() == flags.size(), ErrorCode::invalid_argument,
            "parameter dimension mismatch");
    ParameterVector out(sampling.size());
    for (size_t i = 0; i < sampling.size(); ++i)
        out[i] = flags[i] ? std::exp(sampling[i]) : sampling[i];
    return out;
}

ParameterVector Model::sampling_from_natural(const ParameterVector& nat) const {
    auto flags = log_scale();
    require(nat.size() == flags.size(), ErrorCode::invalid_argument,
            "parameter dimension mismatch");
    ParameterVector out(nat.size());
    for (size_t i = 0; i < nat.size(); ++i) {
        if (flags[i]) {
            require(nat[i] > 0.0, ErrorCode::invalid_argument,
                    "log-scale coordinate must be positive on the natural scale");
            out[i] = std::log(nat[i]);
        } else {
            out[i] = nat[i];
        }
    }
    return out;
}

ScalingMatrix pilot_prior_predictive(const Model& model, size_t n_pilot,
                                     RandomStream& rng) {
    require(n_pilot >= 2, ErrorCode::invalid_argument, "n_pilot must be >= 2");
    Matrix summaries(n_pilot, model.n_summaries());
    for (size_t i = 0; i < n_pilot; ++i) {
        ParameterVector theta = model.sample_prior(rng);
        SummaryVector s = model.summarize(model.simulate(theta, rng));
        for (size_t j = 0; j < s.size(); ++j) summaries(i, j) = s[j];
    }
    return update_sigma_mad(summaries);
}

ScalingMatrix pilot_at_theta(const Model& model, const ParameterVector& theta,
                             size_t n_pilot, RandomStream& rng) {
    require(n_pilot >= 2, ErrorCode::invalid_argument, "n_pilot must be >= 2");
    Matrix summaries(n_pilot, model.n_summaries());
    for (size_t i = 0; i < n_pilot; ++i) {
        SummaryVector s = model.summarize(model.simulate(theta, rng));
        for (size_t j = 0; j < s.size(); ++j) summaries(i, j) = s[j];
    }
    return update_sigma_mad(summaries);
}

std::unique_ptr<Model> make_model(const std::string& id) {
    if (id == "gaussian") return std::make_unique<GaussianModel>();
    if (id == "gk") return std::make_unique<GkModel>();
    if (id == "ising") return std::make_unique<IsingModel>();
    if (id == "lv") return std::make_unique<LotkaVolterraModel>();
    fail(ErrorCode::config, "unknown model '" + id + "'");
}

}  // namespace rsabc
