#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "hsikit/cube.hpp"
#include "hsikit/metrics.hpp"

using namespace hsikit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "hsikit_test_cube";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

HsiCube random_cube(std::uint64_t seed, int h, int w, int b) {
    HsiCube cube(h, w, b);
    Rng64 rng(seed);
    for (auto& v : cube.data) v = static_cast<float>(rng.uniform());
    return cube;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("hsc round trip is bit exact") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        Rng64 shape_rng(seed * 977);
        const int h = static_cast<int>(shape_rng.uniform_int(1, 9));
        const int w = static_cast<int>(shape_rng.uniform_int(1, 9));
        const int b = static_cast<int>(shape_rng.uniform_int(1, 7));
        HsiCube cube = random_cube(seed, h, w, b);
        if (seed % 2) {
            cube.wavelengths_nm.resize(b);
            for (int i = 0; i < b; ++i) cube.wavelengths_nm[i] = 400.0 + 3.7 * i;
        }
        const auto path = temp_dir() / ("rt_" + std::to_string(seed) + ".hsc");
        write_cube(cube, path);
        const HsiCube back = read_cube(path);
        CHECK(back.height == cube.height);
        CHECK(back.width == cube.width);
        CHECK(back.bands == cube.bands);
        CHECK(back.data == cube.data);
        CHECK(back.wavelengths_nm == cube.wavelengths_nm);
    }
}

TEST_CASE("1x1x1 cube writes header plus exactly 4 payload bytes 00 00 80 3F") {
    HsiCube cube(1, 1, 1, 1.0f);
    const auto path = temp_dir() / "one.hsc";
    write_cube(cube, path);
    const std::string blob = slurp(path);
    const std::string header = "HSC1\nheight=1\nwidth=1\nbands=1\ndtype=f32le\norder=bsq\n\n";
    REQUIRE(blob.size() == header.size() + 4);
    CHECK(blob.substr(0, header.size()) == header);
    CHECK(static_cast<unsigned char>(blob[header.size() + 0]) == 0x00);
    CHECK(static_cast<unsigned char>(blob[header.size() + 1]) == 0x00);
    CHECK(static_cast<unsigned char>(blob[header.size() + 2]) == 0x80);
    CHECK(static_cast<unsigned char>(blob[header.size() + 3]) == 0x3F);
}

TEST_CASE("same cube written twice produces byte-identical files") {
    const HsiCube cube = random_cube(77, 4, 5, 3);
    const auto p1 = temp_dir() / "det1.hsc";
    const auto p2 = temp_dir() / "det2.hsc";
    write_cube(cube, p1);
    write_cube(cube, p2);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("exact 0.25 survives the round trip") {
    HsiCube cube(2, 2, 2, 0.25f);
    const auto path = temp_dir() / "quarter.hsc";
    write_cube(cube, path);
    for (float v : read_cube(path).data) CHECK(v == 0.25f);
}

TEST_CASE("cube with NaN is rejected before any file is written") {
    HsiCube cube(2, 2, 1, 0.5f);
    cube.data[1] = std::nanf("");
    const auto path = temp_dir() / "nan.hsc";
    fs::remove(path);
    CHECK_THROWS_AS(write_cube(cube, path), ParamError);
    CHECK(!fs::exists(path));
}

TEST_CASE("header with wrong payload size is a size-mismatch error") {
    HsiCube cube(1, 1, 2, 0.5f);
    const auto path = temp_dir() / "trunc.hsc";
    write_cube(cube, path);
    std::string blob = slurp(path);
    blob.replace(blob.find("bands=2"), 7, "bands=3");
    std::ofstream(path, std::ios::binary | std::ios::trunc) << blob;
    CHECK_THROWS_WITH_AS(read_cube(path), doctest::Contains("size mismatch"), FormatError);
}

TEST_CASE("malformed header names the offending line") {
    const auto path = temp_dir() / "badline.hsc";
    std::ofstream(path, std::ios::binary | std::ios::trunc)
        << "HSC1\nheight=2\nwidht=2\nbands=1\ndtype=f32le\norder=bsq\n\n";
    CHECK_THROWS_WITH_AS(read_cube(path), doctest::Contains("width"), FormatError);
}

TEST_CASE("missing magic is a format error") {
    const auto path = temp_dir() / "nomagic.hsc";
    std::ofstream(path, std::ios::binary | std::ios::trunc) << "HSC2\n";
    CHECK_THROWS_AS(read_cube(path), FormatError);
}

TEST_CASE("aviris default exclusion turns 224 bands into 172") {
    const HsiCube cube = random_cube(11, 3, 3, 224);
    const HsiCube out = exclude_bands(cube, BandExclusionList::aviris_default());
    CHECK(out.bands == 172);
    // first retained band is original band 11 (1-based), i.e. index 10
    for (std::size_t i = 0; i < cube.plane_size(); ++i)
        CHECK(out.band_ptr(0)[i] == cube.band_ptr(10)[i]);
}

TEST_CASE("empty exclusion list is the identity") {
    const HsiCube cube = random_cube(12, 2, 3, 5);
    const HsiCube out = exclude_bands(cube, BandExclusionList{});
    CHECK(out.data == cube.data);
    CHECK(out.bands == cube.bands);
}

TEST_CASE("excluding range [2,3] of a 5-band cube keeps bands 1,4,5") {
    const HsiCube cube = random_cube(13, 2, 2, 5);
    const HsiCube out = exclude_bands(cube, BandExclusionList{{{2, 3}}});
    REQUIRE(out.bands == 3);
    const int kept[3] = {0, 3, 4};
    for (int b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < cube.plane_size(); ++i)
            CHECK(out.band_ptr(b)[i] == cube.band_ptr(kept[b])[i]);
}

TEST_CASE("exclusion ranges preserve retained values bit exactly, any split") {
    const HsiCube cube = random_cube(14, 3, 2, 16);
    const BandExclusionList list{{{1, 2}, {8, 8}, {15, 16}}};
    const HsiCube out = exclude_bands(cube, list);
    CHECK(out.bands == 16 - list.excluded_count());
    int src = 0;
    auto dropped = [&](int band1) {
        for (auto [lo, hi] : list.ranges)
            if (band1 >= lo && band1 <= hi) return true;
        return false;
    };
    for (int b = 0; b < out.bands; ++b) {
        while (dropped(src + 1)) ++src;
        for (std::size_t i = 0; i < cube.plane_size(); ++i)
            CHECK(out.band_ptr(b)[i] == cube.band_ptr(src)[i]);
        ++src;
    }
}

TEST_CASE("range exceeding the band count is a bounds error") {
    const HsiCube cube = random_cube(15, 2, 2, 4);
    CHECK_THROWS_AS(exclude_bands(cube, BandExclusionList{{{3, 5}}}), BoundsError);
}

TEST_CASE("synth_scene is a pure function of the spec") {
    SceneSpec spec;
    spec.height = 32;
    spec.width = 32;
    spec.bands = 16;
    spec.seed = 7;
    spec.n_materials = 4;
    const HsiCube a = synth_scene(spec);
    const HsiCube b = synth_scene(spec);
    CHECK(a.data == b.data);
    CHECK(a.wavelengths_nm == b.wavelengths_nm);
}

TEST_CASE("synth_scene values stay in [0, 1]") {
    SceneSpec spec;
    spec.height = 32;
    spec.width = 32;
    spec.bands = 16;
    spec.seed = 7;
    const HsiCube cube = synth_scene(spec);
    float lo = 1.0f, hi = 0.0f;
    for (float v : cube.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0f);
    CHECK(hi <= 1.0f);
}

TEST_CASE("single-material scene has zero spectral angle between pixels") {
    SceneSpec spec;
    spec.height = 8;
    spec.width = 8;
    spec.bands = 12;
    spec.seed = 3;
    spec.n_materials = 1;
    const HsiCube cube = synth_scene(spec);
    // roll pixels by one within each band; SAM of cube vs rolled cube is the
    // angle between different pixels' spectra
    HsiCube rolled = cube;
    for (int b = 0; b < cube.bands; ++b) {
        const float* src = cube.band_ptr(b);
        float* dst = rolled.band_ptr(b);
        const std::size_t n = cube.plane_size();
        for (std::size_t i = 0; i < n; ++i) dst[i] = src[(i + 1) % n];
    }
    CHECK(sam_degrees(cube, rolled) < 1e-3);
}

TEST_CASE("pgm export: constant band maps to gray 128") {
    HsiCube cube(2, 3, 1, 0.7f);
    const auto path = temp_dir() / "const.pgm";
    export_band_pgm(cube, 0, path);
    const std::string blob = slurp(path);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(blob.size() == header.size() + 6);
    for (std::size_t i = header.size(); i < blob.size(); ++i)
        CHECK(static_cast<unsigned char>(blob[i]) == 128);
}

TEST_CASE("pgm export: {0,1} band maps to {0,255}") {
    HsiCube cube(1, 2, 1);
    cube.data = {0.0f, 1.0f};
    const auto path = temp_dir() / "minmax.pgm";
    export_band_pgm(cube, 0, path);
    const std::string blob = slurp(path);
    CHECK(static_cast<unsigned char>(blob[blob.size() - 2]) == 0);
    CHECK(static_cast<unsigned char>(blob[blob.size() - 1]) == 255);
}

TEST_CASE("pgm export is deterministic and bounds-checked") {
    const HsiCube cube = random_cube(17, 5, 4, 2);
    const auto p1 = temp_dir() / "det1.pgm";
    const auto p2 = temp_dir() / "det2.pgm";
    export_band_pgm(cube, 1, p1);
    export_band_pgm(cube, 1, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK_THROWS_AS(export_band_pgm(cube, 2, temp_dir() / "oob.pgm"), BoundsError);
}

TEST_CASE("wavelength list must match bands and increase strictly") {
    HsiCube cube(1, 1, 2, 0.1f);
    cube.wavelengths_nm = {500.0};
    CHECK_THROWS_AS(cube.validate(), ShapeError);
    cube.wavelengths_nm = {500.0, 500.0};
    CHECK_THROWS_AS(cube.validate(), ParamError);
    cube.wavelengths_nm = {500.0, 501.0};
    CHECK_NOTHROW(cube.validate());
}
