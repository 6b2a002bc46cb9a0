#include "hsikit/cube.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "detail_io.hpp"
#include "hsikit/value_noise.hpp"

namespace hsikit {

namespace fs = std::filesystem;

void HsiCube::validate() const {
    if (height < 1 || width < 1 || bands < 1)
        throw ParamError("cube dimensions must be >= 1");
    if (data.size() != size())
        throw ShapeError("cube payload size does not match dimensions");
    for (float v : data) {
        if (!std::isfinite(v)) throw ParamError("cube contains non-finite values");
    }
    if (!wavelengths_nm.empty()) {
        if (static_cast<int>(wavelengths_nm.size()) != bands)
            throw ShapeError("wavelength list length does not match band count");
        for (std::size_t i = 1; i < wavelengths_nm.size(); ++i) {
            if (!(wavelengths_nm[i] > wavelengths_nm[i - 1]))
                throw ParamError("wavelengths must be strictly increasing");
        }
    }
}

BandExclusionList BandExclusionList::aviris_default() {
    return BandExclusionList{{{1, 10}, {104, 116}, {152, 170}, {215, 224}}};
}

void BandExclusionList::validate(int bands) const {
    std::vector<std::pair<int, int>> sorted = ranges;
    std::sort(sorted.begin(), sorted.end());
    int prev_hi = 0;
    for (auto [lo, hi] : sorted) {
        if (lo < 1 || hi < lo) throw ParamError("invalid band range");
        if (hi > bands) throw BoundsError("band range exceeds band count");
        if (lo <= prev_hi) throw ParamError("band ranges must be disjoint");
        prev_hi = hi;
    }
}

int BandExclusionList::excluded_count() const {
    int n = 0;
    for (auto [lo, hi] : ranges) n += hi - lo + 1;
    return n;
}

// ---------------------------------------------------------------------------
// HSC container
// ---------------------------------------------------------------------------

void write_cube(const HsiCube& cube, const fs::path& path) {
    cube.validate();

    std::string out;
    out += "HSC1\n";
    out += "height=" + std::to_string(cube.height) + "\n";
    out += "width=" + std::to_string(cube.width) + "\n";
    out += "bands=" + std::to_string(cube.bands) + "\n";
    out += "dtype=f32le\n";
    out += "order=bsq\n";
    if (!cube.wavelengths_nm.empty()) {
        out += "wavelengths=";
        for (std::size_t i = 0; i < cube.wavelengths_nm.size(); ++i) {
            if (i) out += ",";
            out += detail::fmt_double(cube.wavelengths_nm[i]);
        }
        out += "\n";
    }
    out += "\n";
    out.reserve(out.size() + cube.data.size() * 4);
    for (float v : cube.data) detail::put_f32_le(out, v);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

namespace {

std::string_view header_value(std::string_view line, std::string_view key) {
    if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
        line[key.size()] != '=')
        throw FormatError("malformed header line: '" + std::string(line) + "' (expected " +
                          std::string(key) + "=...)");
    return line.substr(key.size() + 1);
}

}  // namespace

HsiCube read_cube(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string_view {
        auto nl = blob.find('\n', pos);
        if (nl == std::string::npos) throw FormatError("truncated header: " + path.string());
        std::string_view line(blob.data() + pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    if (next_line() != "HSC1") throw FormatError("malformed header line: missing HSC1 magic");

    HsiCube cube;
    cube.height = static_cast<int>(detail::parse_int(header_value(next_line(), "height"), "height"));
    cube.width = static_cast<int>(detail::parse_int(header_value(next_line(), "width"), "width"));
    cube.bands = static_cast<int>(detail::parse_int(header_value(next_line(), "bands"), "bands"));
    if (header_value(next_line(), "dtype") != "f32le")
        throw FormatError("malformed header line: unsupported dtype");
    if (header_value(next_line(), "order") != "bsq")
        throw FormatError("malformed header line: unsupported order");
    if (cube.height < 1 || cube.width < 1 || cube.bands < 1)
        throw FormatError("malformed header line: non-positive dimension");

    std::string_view line = next_line();
    if (line.substr(0, 12) == "wavelengths=") {
        std::string_view list = line.substr(12);
        while (!list.empty()) {
            auto comma = list.find(',');
            std::string_view tok = list.substr(0, comma);
            cube.wavelengths_nm.push_back(detail::parse_double(tok, "wavelengths"));
            if (comma == std::string_view::npos) break;
            list = list.substr(comma + 1);
        }
        line = next_line();
    }
    if (!line.empty())
        throw FormatError("malformed header line: expected blank separator, got '" +
                          std::string(line) + "'");

    const std::size_t count =
        static_cast<std::size_t>(cube.height) * cube.width * cube.bands;
    if (blob.size() - pos != count * 4)
        throw FormatError("payload size mismatch: header implies " + std::to_string(count * 4) +
                          " bytes, file has " + std::to_string(blob.size() - pos));
    cube.data.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        cube.data[i] = detail::get_f32_le(blob.data() + pos + i * 4);

    cube.validate();
    return cube;
}

HsiCube exclude_bands(const HsiCube& cube, const BandExclusionList& list) {
    cube.validate();
    list.validate(cube.bands);

    std::vector<bool> drop(cube.bands, false);
    for (auto [lo, hi] : list.ranges)
        for (int b = lo; b <= hi; ++b) drop[b - 1] = true;

    HsiCube out;
    out.height = cube.height;
    out.width = cube.width;
    out.bands = cube.bands - list.excluded_count();
    out.data.reserve(out.size());
    for (int b = 0; b < cube.bands; ++b) {
        if (drop[b]) continue;
        out.data.insert(out.data.end(), cube.band_ptr(b), cube.band_ptr(b) + cube.plane_size());
        if (!cube.wavelengths_nm.empty()) out.wavelengths_nm.push_back(cube.wavelengths_nm[b]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Procedural scenes
// ---------------------------------------------------------------------------

namespace {

// Smooth endmember spectrum in [0.5, 0.98]: offset plus a few low-frequency
// cosines plus a gentle ramp. Bright on purpose, so noisy-only PSNR at the
// reference SNR lands in the mid-teens like real reflectance scenes.
std::vector<double> endmember_spectrum(std::uint64_t seed, int bands) {
    Rng64 rng(seed);
    const double c0 = rng.uniform(0.68, 0.84);
    const double ramp = rng.uniform(-0.10, 0.10);
    double amp[3], freq[3], phase[3];
    for (int j = 0; j < 3; ++j) {
        amp[j] = rng.uniform(0.02, 0.10) / (j + 1);
        freq[j] = rng.uniform(0.5, 2.5);
        phase[j] = rng.uniform(0.0, 6.283185307179586);
    }
    std::vector<double> e(bands);
    for (int b = 0; b < bands; ++b) {
        const double t = bands > 1 ? static_cast<double>(b) / (bands - 1) : 0.0;
        double v = c0 + ramp * (t - 0.5);
        for (int j = 0; j < 3; ++j) v += amp[j] * std::cos(6.283185307179586 * (freq[j] * t) + phase[j]);
        e[b] = std::clamp(v, 0.5, 0.98);
    }
    return e;
}

}  // namespace

HsiCube synth_scene(const SceneSpec& spec) {
    if (spec.height < 1 || spec.width < 1 || spec.bands < 1)
        throw ParamError("scene dimensions must be >= 1");
    if (spec.n_materials < 1 || spec.n_materials > 16)
        throw ParamError("n_materials must be in [1, 16]");

    const int h = spec.height, w = spec.width, m = spec.n_materials;
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    std::vector<std::vector<double>> spectra(m);
    for (int i = 0; i < m; ++i) spectra[i] = endmember_spectrum(mix64(spec.seed, 100 + i), spec.bands);

    // Soft material weights from per-material fBm fields. The sharpness makes
    // regions dominated by one material with smooth transitions.
    std::vector<std::vector<double>> weight(m, std::vector<double>(plane));
    {
        std::vector<std::vector<double>> field(m);
        for (int i = 0; i < m; ++i)
            field[i] = fbm_field(mix64(spec.seed, 200 + i), h, w, 16.0, 4);
        const double sharpness = 6.0;
        for (std::size_t p = 0; p < plane; ++p) {
            double denom = 0.0;
            for (int i = 0; i < m; ++i) {
                weight[i][p] = std::exp(sharpness * field[i][p]);
                denom += weight[i][p];
            }
            for (int i = 0; i < m; ++i) weight[i][p] /= denom;
        }
    }

    // Broadband per-pixel gain keeps some energy in every radial frequency
    // bin without disturbing spectral angles.
    std::vector<double> gain(plane);
    {
        const std::uint64_t gseed = mix64(spec.seed, 300);
        std::size_t p = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x, ++p)
                gain[p] = 1.0 + 0.06 * (2.0 * lattice_hash01(gseed, x, y) - 1.0);
    }

    HsiCube cube(h, w, spec.bands);
    for (int b = 0; b < spec.bands; ++b) {
        float* plane_ptr = cube.band_ptr(b);
        for (std::size_t p = 0; p < plane; ++p) {
            double v = 0.0;
            for (int i = 0; i < m; ++i) v += weight[i][p] * spectra[i][b];
            v *= gain[p];
            plane_ptr[p] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    cube.wavelengths_nm.resize(spec.bands);
    for (int b = 0; b < spec.bands; ++b)
        cube.wavelengths_nm[b] = 400.0 + (2500.0 - 400.0) * b / std::max(1, spec.bands - 1);
    if (spec.bands == 1) cube.wavelengths_nm = {400.0};
    return cube;
}

void export_band_pgm(const HsiCube& cube, int band, const fs::path& path) {
    if (band < 0 || band >= cube.bands) throw BoundsError("band index out of range");

    const float* p = cube.band_ptr(band);
    const std::size_t n = cube.plane_size();
    float lo = p[0], hi = p[0];
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, p[i]);
        hi = std::max(hi, p[i]);
    }

    std::string out = "P5\n" + std::to_string(cube.width) + " " + std::to_string(cube.height) +
                      "\n255\n";
    out.reserve(out.size() + n);
    if (hi > lo) {
        const double scale = 255.0 / (static_cast<double>(hi) - lo);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(static_cast<char>(
                static_cast<unsigned char>(std::lround((p[i] - lo) * scale))));
    } else {
        out.append(n, static_cast<char>(128));  // degenerate range -> midpoint
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace hsikit
