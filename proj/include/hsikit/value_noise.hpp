#pragma once

#include <cstdint>
#include <vector>

#include "hsikit/common.hpp"

namespace hsikit {

// Seeded lattice value in [0, 1).
double lattice_hash01(std::uint64_t seed, std::int64_t ix, std::int64_t iy);

// Single-octave value noise: quintic-faded bilinear interpolation of lattice
// values at unit spacing. Output in [0, 1).
double value_noise(std::uint64_t seed, double x, double y);

// Additive fBm field, h*w row-major, octave frequency doubling from
// base_cell_px, amplitude halving, normalized back into [0, 1).
std::vector<double> fbm_field(std::uint64_t seed, int h, int w, double base_cell_px, int octaves);

}  // namespace hsikit
