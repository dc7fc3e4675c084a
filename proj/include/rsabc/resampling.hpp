#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsabc/dataset.hpp"
#include "rsabc/rng.hpp"

namespace rsabc {

enum class BlockKind { iid, time_blocks, grid_blocks };

BlockKind block_kind_from_string(const std::string& s);
std::string to_string(BlockKind k);

struct BlockScheme {
    BlockKind kind = BlockKind::iid;
    int block_length = 0;           // time_blocks
    bool overlapping = false;       // time_blocks only
    int block_rows = 0, block_cols = 0;  // grid_blocks

    static BlockScheme iid() { return BlockScheme{}; }
    static BlockScheme time(int B, bool overlapping = false);
    static BlockScheme grid(int h, int w);
};

// slots: how many unit draws one resample consumes;
// candidates: how many distinct units can be drawn.
struct SchemeShape {
    size_t slots = 0;
    size_t candidates = 0;
};

SchemeShape scheme_shape(const BlockScheme& scheme, const Dataset& x);

// Frozen resampling indices: one row per resample, 0-based entries in
// {0..candidates-1}. Index matrices are generated once per sampler run and
// never modified afterwards.
struct IndexMatrix {
    size_t rows = 0, slots = 0, candidates = 0;
    std::vector<uint32_t> idx;

    uint32_t at(size_t r, size_t s) const { return idx[r * slots + s]; }
    const uint32_t* row(size_t r) const { return idx.data() + r * slots; }
};

IndexMatrix make_index_matrix(size_t R, const BlockScheme& scheme,
                              const Dataset& shape_like, RandomStream& rng);

// Rebuilds the resample described by row r of u into `out` (shape reused when
// possible). out must not alias x.
void resample_dataset(const Dataset& x, const IndexMatrix& u, size_t r,
                      const BlockScheme& scheme, Dataset& out);

Dataset resample_dataset(const Dataset& x, const IndexMatrix& u, size_t r,
                         const BlockScheme& scheme);

}  // namespace rsabc
