#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rsabc/errors.hpp"

namespace rsabc {

// iid scalar observations
struct ScalarSample {
    std::vector<double> values;
};

// Two aligned series observed on a common regular time grid.
struct BivariateSeries {
    std::vector<double> x1, x2;
};

// L x L grid of +-1 spins, row-major.
struct SpinGrid {
    int side = 0;
    std::vector<int8_t> spins;

    int8_t at(int r, int c) const { return spins[static_cast<size_t>(r) * side + c]; }
    int8_t& at(int r, int c) { return spins[static_cast<size_t>(r) * side + c]; }
};

using Dataset = std::variant<ScalarSample, BivariateSeries, SpinGrid>;

// Plain-text round trip: scalar samples are one value per line, bivariate
// series one "x1 x2" pair per line, grids L rows of +-1 entries.
ScalarSample load_scalar_sample(const std::string& path);
BivariateSeries load_bivariate_series(const std::string& path);
SpinGrid load_spin_grid(const std::string& path);
void save_dataset(const Dataset& d, const std::string& path);

}  // namespace rsabc
