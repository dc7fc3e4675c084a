#include "rsabc/resampling.hpp"

#include <cstring>

namespace rsabc {

BlockKind block_kind_from_string(const std::string& s) {
    if (s == "iid") return BlockKind::iid;
    if (s == "time_blocks") return BlockKind::time_blocks;
    if (s == "grid_blocks") return BlockKind::grid_blocks;
    fail(ErrorCode::invalid_argument, "unknown resampling scheme '" + s + "'");
}

std::string to_string(BlockKind k) {
    switch (k) {
        case BlockKind::iid: return "iid";
        case BlockKind::time_blocks: return "time_blocks";
        default: return "grid_blocks";
    }
}

BlockScheme BlockScheme::time(int B, bool overlapping) {
    require(B >= 1, ErrorCode::invalid_argument, "block length must be >= 1");
    BlockScheme s;
    s.kind = BlockKind::time_blocks;
    s.block_length = B;
    s.overlapping = overlapping;
    return s;
}

BlockScheme BlockScheme::grid(int h, int w) {
    require(h >= 1 && w >= 1, ErrorCode::invalid_argument,
            "grid block shape must be positive");
    BlockScheme s;
    s.kind = BlockKind::grid_blocks;
    s.block_rows = h;
    s.block_cols = w;
    return s;
}

namespace {

size_t series_length(const Dataset& x) {
    if (const auto* s = std::get_if<ScalarSample>(&x)) return s->values.size();
    if (const auto* b = std::get_if<BivariateSeries>(&x)) {
        require(b->x1.size() == b->x2.size(), ErrorCode::invalid_argument,
                "bivariate series lengths differ");
        return b->x1.size();
    }
    fail(ErrorCode::invalid_argument,
         "time/iid resampling applies to scalar or series datasets only");
}

}  // namespace

SchemeShape scheme_shape(const BlockScheme& scheme, const Dataset& x) {
    switch (scheme.kind) {
        case BlockKind::iid: {
            size_t n = series_length(x);
            return SchemeShape{n, n};
        }
        case BlockKind::time_blocks: {
            size_t n = series_length(x);
            size_t B = static_cast<size_t>(scheme.block_length);
            require(B >= 1 && B <= n, ErrorCode::invalid_argument,
                    "block length out of range");
            require(n % B == 0, ErrorCode::config,
                    "block length " + std::to_string(B) +
                        " does not divide series length " + std::to_string(n));
            size_t slots = n / B;
            size_t candidates = scheme.overlapping ? (n - B + 1) : slots;
            return SchemeShape{slots, candidates};
        }
        default: {
            const auto* g = std::get_if<SpinGrid>(&x);
            require(g != nullptr, ErrorCode::invalid_argument,
                    "grid resampling applies to spin grids only");
            require(!scheme.overlapping, ErrorCode::config,
                    "overlapping grid blocks are not supported");
            int L = g->side;
            int h = scheme.block_rows, w = scheme.block_cols;
            require(h >= 1 && w >= 1 && h <= L && w <= L,
                    ErrorCode::invalid_argument, "grid block shape out of range");
            require(L % h == 0 && L % w == 0, ErrorCode::config,
                    "block shape " + std::to_string(h) + "x" + std::to_string(w) +
                        " does not tile a " + std::to_string(L) + "x" +
                        std::to_string(L) + " grid");
            size_t tiles = static_cast<size_t>(L / h) * static_cast<size_t>(L / w);
            return SchemeShape{tiles, tiles};
        }
    }
}

IndexMatrix make_index_matrix(size_t R, const BlockScheme& scheme,
                              const Dataset& shape_like, RandomStream& rng) {
    require(R >= 1, ErrorCode::invalid_argument, "R must be >= 1");
    SchemeShape sh = scheme_shape(scheme, shape_like);
    IndexMatrix u;
    u.rows = R;
    u.slots = sh.slots;
    u.candidates = sh.candidates;
    u.idx.resize(R * sh.slots);
    for (size_t i = 0; i < u.idx.size(); ++i)
        u.idx[i] = static_cast<uint32_t>(rng.uniform_index(sh.candidates));
    return u;
}

namespace {

void gather_series(const std::vector<double>& src, const IndexMatrix& u,
                   size_t r, const BlockScheme& scheme,
                   std::vector<double>& dst) {
    size_t n = src.size();
    dst.resize(n);
    const uint32_t* row = u.row(r);
    if (scheme.kind == BlockKind::iid) {
        for (size_t i = 0; i < n; ++i) dst[i] = src[row[i]];
        return;
    }
    size_t B = static_cast<size_t>(scheme.block_length);
    for (size_t s = 0; s < u.slots; ++s) {
        size_t start = scheme.overlapping ? row[s] : row[s] * B;
        std::memcpy(dst.data() + s * B, src.data() + start, B * sizeof(double));
    }
}

}  // namespace

void resample_dataset(const Dataset& x, const IndexMatrix& u, size_t r,
                      const BlockScheme& scheme, Dataset& out) {
    require(r < u.rows, ErrorCode::invalid_argument, "resample row out of range");
    switch (scheme.kind) {
        case BlockKind::iid:
        case BlockKind::time_blocks: {
            if (const auto* s = std::get_if<ScalarSample>(&x)) {
                if (!std::holds_alternative<ScalarSample>(out))
                    out = ScalarSample{};
                gather_series(s->values, u, r, scheme,
                              std::get<ScalarSample>(out).values);
            } else {
                const auto& b = std::get<BivariateSeries>(x);
                if (!std::holds_alternative<BivariateSeries>(out))
                    out = BivariateSeries{};
                auto& o = std::get<BivariateSeries>(out);
                // same row applied to both series: blocks stay paired
                gather_series(b.x1, u, r, scheme, o.x1);
                gather_series(b.x2, u, r, scheme, o.x2);
            }
            return;
        }
        default: {
            const auto& g = std::get<SpinGrid>(x);
            if (!std::holds_alternative<SpinGrid>(out)) out = SpinGrid{};
            auto& o = std::get<SpinGrid>(out);
            o.side = g.side;
            o.spins.resize(g.spins.size());
            int h = scheme.block_rows, w = scheme.block_cols;
            int tiles_per_row = g.side / w;
            const uint32_t* row = u.row(r);
            for (size_t s = 0; s < u.slots; ++s) {
                // raster placement of the chosen tile into slot s
                int dst_tr = static_cast<int>(s) / tiles_per_row;
                int dst_tc = static_cast<int>(s) % tiles_per_row;
                int src_tr = static_cast<int>(row[s]) / tiles_per_row;
                int src_tc = static_cast<int>(row[s]) % tiles_per_row;
                for (int i = 0; i < h; ++i) {
                    const int8_t* sp =
                        g.spins.data() +
                        static_cast<size_t>(src_tr * h + i) * g.side +
                        src_tc * w;
                    int8_t* dp = &o.at(dst_tr * h + i, dst_tc * w);
                    std::memcpy(dp, sp, static_cast<size_t>(w));
                }
            }
            return;
        }
    }
}

Dataset resample_dataset(const Dataset& x, const IndexMatrix& u, size_t r,
                         const BlockScheme& scheme) {
    Dataset out;
    resample_dataset(x, u, r, scheme, out);
    return out;
}

}  // namespace rsabc
