#include "rsabc/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rsabc {

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), ErrorCode::io, "cannot open '" + path + "' for reading");
    return f;
}

// %.17g keeps doubles bit-exact across a write/read cycle
void print_value(std::ofstream& f, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    f << buf;
}

}  // namespace

ScalarSample load_scalar_sample(const std::string& path) {
    auto f = open_in(path);
    ScalarSample out;
    double v;
    while (f >> v) out.values.push_back(v);
    require(!out.values.empty(), ErrorCode::io, "no values in '" + path + "'");
    return out;
}

BivariateSeries load_bivariate_series(const std::string& path) {
    auto f = open_in(path);
    BivariateSeries out;
    double a, b;
    while (f >> a >> b) {
        out.x1.push_back(a);
        out.x2.push_back(b);
    }
    require(!out.x1.empty(), ErrorCode::io, "no rows in '" + path + "'");
    return out;
}

SpinGrid load_spin_grid(const std::string& path) {
    auto f = open_in(path);
    std::vector<int8_t> spins;
    int v;
    while (f >> v) {
        require(v == 1 || v == -1, ErrorCode::io,
                "spin grid entries must be +-1 in '" + path + "'");
        spins.push_back(static_cast<int8_t>(v));
    }
    require(!spins.empty(), ErrorCode::io, "no entries in '" + path + "'");
    int side = 1;
    while (static_cast<size_t>(side) * side < spins.size()) ++side;
    require(static_cast<size_t>(side) * side == spins.size(), ErrorCode::io,
            "spin grid in '" + path + "' is not square");
    return SpinGrid{side, std::move(spins)};
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream f(path);
    require(f.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    if (const auto* s = std::get_if<ScalarSample>(&d)) {
        for (double v : s->values) {
            print_value(f, v);
            f << "\n";
        }
    } else if (const auto* b = std::get_if<BivariateSeries>(&d)) {
        for (size_t i = 0; i < b->x1.size(); ++i) {
            print_value(f, b->x1[i]);
            f << " ";
            print_value(f, b->x2[i]);
            f << "\n";
        }
    } else {
        const auto& g = std::get<SpinGrid>(d);
        for (int r = 0; r < g.side; ++r) {
            for (int c = 0; c < g.side; ++c) {
                f << static_cast<int>(g.at(r, c)) << (c + 1 == g.side ? "" : " ");
            }
            f << "\n";
        }
    }
    require(f.good(), ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace rsabc
