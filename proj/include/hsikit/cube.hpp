#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "hsikit/common.hpp"

namespace hsikit {

// ----------------------------------------------------------------------------
// HsiCube - hyperspectral reflectance cube.
//
// Memory layout: band-sequential (BSQ), band-major then row-major:
//   data[b * height * width + y * width + x]
// Values are float32; all other numerics in the library run in double and
// quantize back on store.
// ----------------------------------------------------------------------------

struct HsiCube {
    int height = 0;
    int width = 0;
    int bands = 0;
    std::vector<float> data;
    std::vector<double> wavelengths_nm;  // empty, or strictly increasing, size == bands

    HsiCube() = default;
    HsiCube(int h, int w, int b, float fill = 0.0f)
        : height(h), width(w), bands(b),
          data(static_cast<std::size_t>(h) * w * b, fill) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    std::size_t size() const { return plane_size() * bands; }

    float& at(int y, int x, int b) { return data[plane_size() * b + static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x, int b) const { return data[plane_size() * b + static_cast<std::size_t>(y) * width + x]; }

    float* band_ptr(int b) { return data.data() + plane_size() * b; }
    const float* band_ptr(int b) const { return data.data() + plane_size() * b; }

    // Throws ParamError/ShapeError when an invariant does not hold:
    // positive dims, finite values, consistent strictly-increasing wavelengths.
    void validate() const;
};

// Inclusive 1-based band ranges to drop, mirroring the usual AVIRIS
// water-absorption exclusion.
struct BandExclusionList {
    std::vector<std::pair<int, int>> ranges;

    // Bands 1-10, 104-116, 152-170, 215-224; applied to a 224-band cube this
    // leaves 172 bands.
    static BandExclusionList aviris_default();

    void validate(int bands) const;
    int excluded_count() const;
};

struct SceneSpec {
    int height = 64;
    int width = 64;
    int bands = 172;
    std::uint64_t seed = 0;
    int n_materials = 4;  // <= 16
};

// HSC container, bit-exact: ASCII header then raw little-endian float32 BSQ
// payload. See README for the grammar.
HsiCube read_cube(const std::filesystem::path& path);
void write_cube(const HsiCube& cube, const std::filesystem::path& path);

HsiCube exclude_bands(const HsiCube& cube, const BandExclusionList& list);

// Deterministic procedural scene: linear mixture of <= 16 smooth endmember
// spectra, abundance maps from seeded value noise, values in [0, 1].
HsiCube synth_scene(const SceneSpec& spec);

// Binary 8-bit PGM of one band, min-max normalized. A constant band maps to
// gray 128 (degenerate-range rule).
void export_band_pgm(const HsiCube& cube, int band, const std::filesystem::path& path);

}  // namespace hsikit
