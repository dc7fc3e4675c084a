#pragma once

#include <string>
#include <vector>

#include "rsabc/kernels.hpp"

namespace rsabc {

// Parameter point on the sampling scale (log-transformed coordinates where the
// owning model says so).
using ParameterVector = std::vector<double>;

struct ChainRow {
    ParameterVector theta;          // retained state, sampling scale
    double log_lik = 0.0;           // log likelihood estimate at retained state
    bool accepted = false;
    double delta = 0.0;             // threshold in force this iteration
    std::vector<size_t> strata_n;   // test-set strata counts (stratified samplers)
};

struct Chain {
    std::vector<ChainRow> rows;
    std::vector<std::string> param_names;
    std::vector<bool> log_scale;     // per-coordinate sampling transform
    double acceptance_rate = 0.0;
    double wall_seconds = 0.0;       // sampling loop only
    double final_delta = 0.0;
    ScalingMatrix final_sigma;
    ParameterVector final_theta;
    std::vector<double> delta_history;  // realized threshold sequence

    // Proposal covariance at the end of the run (row-major p x p), recorded so
    // a follow-up stage can inherit it.
    std::vector<double> final_proposal_cov;

    size_t size() const { return rows.size(); }
    // One coordinate as a flat series, optionally skipping a burn-in prefix.
    std::vector<double> coordinate(size_t j, size_t discard = 0) const;
    // Same on the natural scale (exp applied to log-scale coordinates).
    std::vector<double> natural_coordinate(size_t j, size_t discard = 0) const;
};

}  // namespace rsabc
