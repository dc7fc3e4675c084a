#pragma once

#include <cstddef>
#include <vector>

#include "rsabc/chain.hpp"
#include "rsabc/errors.hpp"

namespace rsabc {

// Integrated autocorrelation time: 1 + 2 * sum of autocorrelations with the
// Geyer initial-positive-sequence truncation (adjacent lag pairs are summed
// and the sum stops at the first nonpositive pair). Clipped below at 1.
// Requires length >= 10; a constant series raises a degeneracy error.
double iat(const std::vector<double>& series);

// n / iat.
double ess_from_iat(size_t n_retained, double iat_value);

// Exact 1-D Wasserstein-1 distance between empirical distributions: mean
// absolute difference of matched order statistics when sizes agree, L1
// distance between the quantile step functions otherwise.
double wasserstein_1d(std::vector<double> a, std::vector<double> b);

struct PosteriorSummary {
    double mean = 0.0;
    double lower = 0.0;  // 2.5% nearest-rank (k-th smallest, k = ceil(.025 n))
    double upper = 0.0;  // 97.5% nearest-rank (k-th largest)
};

// Requires length >= 40 so the tail ranks are meaningful.
PosteriorSummary posterior_summary(std::vector<double> draws);

struct ChainDiagnostics {
    std::vector<double> iat_per_coordinate;
    std::vector<double> ess_per_coordinate;
    double worst_iat = 0.0;       // max over coordinates
    double worst_ess = 0.0;       // min over coordinates
    double acceptance_rate = 0.0;
    double wall_seconds = 0.0;    // sampling loop only
    double ess_per_minute = 0.0;  // worst_ess normalized by sampling wall time
};

// Per-coordinate IAT/ESS on the retained chain after discarding `discard`
// leading rows. A coordinate the chain never moved gets iat = length and
// ess = 1 instead of failing, so diagnostics of stuck runs still serialize.
ChainDiagnostics diagnose_chain(const Chain& chain, size_t discard = 0);

}  // namespace rsabc
