#include "hsikit/value_noise.hpp"

#include <cmath>

namespace hsikit {

double lattice_hash01(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = mix64(mix64(seed, static_cast<std::uint64_t>(ix)),
                                  static_cast<std::uint64_t>(iy));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {
inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
}  // namespace

double value_noise(std::uint64_t seed, double x, double y) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = fade(x - fx);
    const double ty = fade(y - fy);

    const double v00 = lattice_hash01(seed, ix, iy);
    const double v10 = lattice_hash01(seed, ix + 1, iy);
    const double v01 = lattice_hash01(seed, ix, iy + 1);
    const double v11 = lattice_hash01(seed, ix + 1, iy + 1);

    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

std::vector<double> fbm_field(std::uint64_t seed, int h, int w, double base_cell_px, int octaves) {
    std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
    double amp = 1.0, cell = base_cell_px, norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        const std::uint64_t oseed = mix64(seed, static_cast<std::uint64_t>(o));
        std::size_t p = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x, ++p)
                out[p] += amp * value_noise(oseed, x / cell, y / cell);
        norm += amp;
        amp *= 0.5;
        cell = std::max(1.0, cell * 0.5);
    }
    for (double& v : out) v /= norm;
    return out;
}

}  // namespace hsikit
