#include "rsabc/chain.hpp"

#include <cmath>

#include "rsabc/errors.hpp"

namespace rsabc {

std::vector<double> Chain::coordinate(size_t j, size_t discard) const {
    require(discard < rows.size(), ErrorCode::invalid_argument,
            "burn-in discard leaves no draws");
    std::vector<double> out;
    out.reserve(rows.size() - discard);
    for (size_t i = discard; i < rows.size(); ++i) {
        require(j < rows[i].theta.size(), ErrorCode::invalid_argument,
                "coordinate index out of range");
        out.push_back(rows[i].theta[j]);
    }
    return out;
}

std::vector<double> Chain::natural_coordinate(size_t j, size_t discard) const {
    auto out = coordinate(j, discard);
    if (j < log_scale.size() && log_scale[j])
        for (double& v : out) v = std::exp(v);
    return out;
}

}  // namespace rsabc
