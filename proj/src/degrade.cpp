#include "hsikit/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "detail_io.hpp"
#include "hsikit/value_noise.hpp"

namespace hsikit {

namespace fs = std::filesystem;

// Per-family sub-seed tags, part of the reproducibility contract.
namespace {
constexpr std::uint64_t kGateStream = 1;
constexpr std::uint64_t kCloudStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kMissingStream = 4;
constexpr std::uint64_t kRowMaskBase = 1000;

constexpr Family kPipelineOrder[4] = {Family::cloud, Family::blur, Family::noise,
                                      Family::band_missing};
}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::cloud: return "cloud";
        case Family::blur: return "blur";
        case Family::noise: return "noise";
        case Family::band_missing: return "band_missing";
    }
    return "?";
}

const char* subtype_name(CloudSubtype s) { return s == CloudSubtype::thick ? "thick" : "thin"; }
const char* subtype_name(BlurSubtype s) { return s == BlurSubtype::spatial ? "spatial" : "spectral"; }
const char* subtype_name(MissingSubtype s) {
    switch (s) {
        case MissingSubtype::complete: return "complete";
        case MissingSubtype::band_wise: return "band_wise";
        case MissingSubtype::partial: return "partial";
    }
    return "?";
}

CloudParams CloudParams::thick() {
    CloudParams p;
    p.locality_degree = {2, 4};
    p.min_lvl = {0.0, 0.0};
    p.max_lvl = {1.0, 1.0};
    p.clear_threshold = {0.0, 0.4};
    p.blur_scaling = 1.0;
    p.decay_factor = 1.0;
    p.channel_offset = 0;
    return p;
}

CloudParams CloudParams::thin() {
    CloudParams p;
    p.locality_degree = {1, 1};
    p.min_lvl = {0.0, 0.4};
    p.max_lvl = {0.4, 0.6};
    p.clear_threshold = {0.0, 0.0};
    p.blur_scaling = 2.0;
    p.decay_factor = 1.0;
    p.channel_offset = 0;
    return p;
}

CloudParams CloudParams::defaults_for(CloudSubtype s) {
    return s == CloudSubtype::thick ? thick() : thin();
}

void CloudParams::validate() const {
    if (locality_degree.lo < 1 || locality_degree.hi < locality_degree.lo)
        throw ParamError("locality_degree range invalid");
    auto check01 = [](const Range& r, const char* name) {
        if (r.lo < 0.0 || r.hi > 1.0 || r.hi < r.lo)
            throw ParamError(std::string(name) + " range must lie in [0, 1]");
    };
    check01(min_lvl, "min_lvl");
    check01(max_lvl, "max_lvl");
    check01(clear_threshold, "clear_threshold");
    if (min_lvl.lo > max_lvl.lo || min_lvl.hi > max_lvl.hi)
        throw ParamError("min_lvl range must not exceed max_lvl range");
    if (blur_scaling <= 0.0) throw ParamError("blur_scaling must be positive");
    if (decay_factor <= 0.0) throw ParamError("decay_factor must be positive");
}

bool DegradationRecipe::has(Family f) const {
    return std::find(fired.begin(), fired.end(), f) != fired.end();
}

void DegradationRecipe::validate() const {
    if (gate_prob < 0.0 || gate_prob > 1.0) throw ParamError("gate_prob must be in [0, 1]");
    if (has(Family::cloud) != cloud_subtype.has_value())
        throw ParamError("cloud_subtype must be present iff cloud fired");
    if (has(Family::blur) != blur_subtype.has_value())
        throw ParamError("blur_subtype must be present iff blur fired");
    if (has(Family::noise) != noise_snr.has_value())
        throw ParamError("noise_snr must be present iff noise fired");
    const bool missing = has(Family::band_missing);
    if (missing != missing_subtype.has_value() || missing != missing_k.has_value())
        throw ParamError("missing fields must be present iff band_missing fired");
    if (missing) {
        if (*missing_k != static_cast<int>(missing_bands.size()))
            throw ParamError("missing_k must equal the number of missing bands");
        for (std::size_t i = 0; i < missing_bands.size(); ++i) {
            if (missing_bands[i] < 0) throw ParamError("missing band index negative");
            if (i && missing_bands[i] <= missing_bands[i - 1])
                throw ParamError("missing bands must be sorted and unique");
        }
    } else if (!missing_bands.empty()) {
        throw ParamError("missing_bands present without band_missing");
    }
    if (noise_snr && *noise_snr <= 0.0) throw ParamError("noise_snr must be positive");
}

DegradationRecipe sample_recipe(std::uint64_t seed, double gate_prob, int bands,
                                int missing_k_max) {
    if (gate_prob < 0.0 || gate_prob > 1.0) throw ParamError("gate_prob must be in [0, 1]");
    if (bands < 1) throw ParamError("bands must be >= 1");
    if (missing_k_max <= 0) missing_k_max = std::max(1, bands / 2);
    if (missing_k_max > bands) throw ParamError("missing_k_max exceeds band count");

    DegradationRecipe r;
    r.seed = seed;
    r.gate_prob = gate_prob;

    Rng64 rng(mix64(seed, kGateStream));
    bool gate[4];
    for (bool& g : gate) g = rng.uniform() < gate_prob;

    if (gate[0]) {
        r.fired.push_back(Family::cloud);
        r.cloud_subtype = rng.uniform() < 0.5 ? CloudSubtype::thick : CloudSubtype::thin;
    }
    if (gate[1]) {
        r.fired.push_back(Family::blur);
        r.blur_subtype = rng.uniform() < 0.5 ? BlurSubtype::spatial : BlurSubtype::spectral;
    }
    if (gate[2]) {
        r.fired.push_back(Family::noise);
        r.noise_snr = std::max(1.0, rng.normal(35.0, 5.0));
    }
    if (gate[3]) {
        r.fired.push_back(Family::band_missing);
        const int which = static_cast<int>(rng.uniform_int(0, 2));
        r.missing_subtype = static_cast<MissingSubtype>(which);
        r.missing_k = static_cast<int>(rng.uniform_int(1, missing_k_max));
        r.missing_bands = choose_missing_bands(bands, *r.missing_k, mix64(seed, kMissingStream));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Cloud
// ---------------------------------------------------------------------------

namespace {

// Separable gaussian smoothing, clamped edges, radius 3 sigma.
void gaussian_smooth(std::vector<double>& img, int h, int w, double sigma) {
    if (sigma <= 0.0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(img.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * img[static_cast<std::size_t>(y) * w +
                                                std::clamp(x + i, 0, w - 1)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            img[static_cast<std::size_t>(y) * w + x] = acc;
        }
}

}  // namespace

std::vector<double> cloud_mask(int h, int w, const CloudParams& params, std::uint64_t seed) {
    params.validate();
    Rng64 rng(seed);
    const int octaves = static_cast<int>(rng.uniform_int(params.locality_degree.lo,
                                                         params.locality_degree.hi));
    const double min_lvl = rng.uniform(params.min_lvl.lo, params.min_lvl.hi);
    const double max_lvl = rng.uniform(params.max_lvl.lo, params.max_lvl.hi);
    const double threshold = rng.uniform(params.clear_threshold.lo, params.clear_threshold.hi);

    // Product of octaves, the locality mechanism: each extra octave multiplies
    // in another field, shrinking and sharpening the covered regions.
    std::vector<double> mask(static_cast<std::size_t>(h) * w, 1.0);
    double cell = 16.0;
    for (int o = 0; o < octaves; ++o) {
        const std::uint64_t oseed = mix64(seed, 100 + static_cast<std::uint64_t>(o));
        std::size_t p = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x, ++p) mask[p] *= value_noise(oseed, x / cell, y / cell);
        cell = std::max(2.0, cell * 0.5);
    }

    const double lvl_span = max_lvl - min_lvl;
    for (double& v : mask) {
        if (threshold >= 1.0 || v <= threshold) {
            v = 0.0;  // forced clear
        } else {
            const double stretched = (v - threshold) / (1.0 - threshold);
            v = min_lvl + stretched * lvl_span;
        }
    }

    gaussian_smooth(mask, h, w, params.blur_scaling);
    for (double& v : mask) v = std::clamp(v, 0.0, 1.0);
    return mask;
}

HsiCube apply_cloud(const HsiCube& cube, CloudSubtype, const CloudParams& params,
                    std::uint64_t seed) {
    cube.validate();
    const std::vector<double> mask = cloud_mask(cube.height, cube.width, params, seed);

    HsiCube out = cube;
    const std::size_t plane = cube.plane_size();
    double amp = 1.0;
    for (int b = 0; b < cube.bands; ++b) {
        const float* src = cube.band_ptr(b);
        float* dst = out.band_ptr(b);
        const int roll = params.channel_offset * b;
        if (roll == 0) {
            for (std::size_t p = 0; p < plane; ++p) {
                const double m = mask[p];
                dst[p] = static_cast<float>(std::clamp((1.0 - m) * src[p] + m * amp, 0.0, 1.0));
            }
        } else {
            for (int y = 0; y < cube.height; ++y)
                for (int x = 0; x < cube.width; ++x) {
                    const int my = ((y + roll) % cube.height + cube.height) % cube.height;
                    const int mx = ((x + roll) % cube.width + cube.width) % cube.width;
                    const double m = mask[static_cast<std::size_t>(my) * cube.width + mx];
                    const std::size_t p = static_cast<std::size_t>(y) * cube.width + x;
                    dst[p] = static_cast<float>(std::clamp((1.0 - m) * src[p] + m * amp, 0.0, 1.0));
                }
        }
        amp *= params.decay_factor;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Blur
// ---------------------------------------------------------------------------

namespace {

// Bilinear resize with half-pixel centers and clamped edges, one band.
std::vector<double> resize_bilinear(const std::vector<double>& src, int sh, int sw, int oh,
                                    int ow) {
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    const double sy_scale = static_cast<double>(sh) / oh;
    const double sx_scale = static_cast<double>(sw) / ow;
    for (int i = 0; i < oh; ++i) {
        const double sy = (i + 0.5) * sy_scale - 0.5;
        const double fy = sy - std::floor(sy);
        int y0 = static_cast<int>(std::floor(sy));
        int y1 = y0 + 1;
        y0 = std::clamp(y0, 0, sh - 1);
        y1 = std::clamp(y1, 0, sh - 1);
        for (int j = 0; j < ow; ++j) {
            const double sx = (j + 0.5) * sx_scale - 0.5;
            const double fx = sx - std::floor(sx);
            int x0 = static_cast<int>(std::floor(sx));
            int x1 = x0 + 1;
            x0 = std::clamp(x0, 0, sw - 1);
            x1 = std::clamp(x1, 0, sw - 1);
            const double top = src[static_cast<std::size_t>(y0) * sw + x0] * (1.0 - fx) +
                               src[static_cast<std::size_t>(y0) * sw + x1] * fx;
            const double bot = src[static_cast<std::size_t>(y1) * sw + x0] * (1.0 - fx) +
                               src[static_cast<std::size_t>(y1) * sw + x1] * fx;
            out[static_cast<std::size_t>(i) * ow + j] = top * (1.0 - fy) + fy * bot;
        }
    }
    return out;
}

}  // namespace

HsiCube apply_spatial_blur(const HsiCube& cube) {
    cube.validate();
    if (cube.height < 4 || cube.width < 4)
        throw ShapeError("spatial blur requires height and width >= 4");

    const int dh = cube.height / 4, dw = cube.width / 4;
    HsiCube out = cube;
    std::vector<double> band(cube.plane_size());
    for (int b = 0; b < cube.bands; ++b) {
        const float* src = cube.band_ptr(b);
        for (std::size_t p = 0; p < band.size(); ++p) band[p] = src[p];
        const auto down = resize_bilinear(band, cube.height, cube.width, dh, dw);
        const auto up = resize_bilinear(down, dh, dw, cube.height, cube.width);
        float* dst = out.band_ptr(b);
        for (std::size_t p = 0; p < up.size(); ++p) dst[p] = static_cast<float>(up[p]);
    }
    return out;
}

HsiCube apply_spectral_blur(const HsiCube& cube) {
    cube.validate();
    if (cube.bands < 5) throw ShapeError("spectral blur requires bands >= 5");

    // Gaussian window, size 5, sigma 1, normalized.
    double w[5];
    double sum = 0.0;
    for (int k = -2; k <= 2; ++k) {
        w[k + 2] = std::exp(-0.5 * k * k);
        sum += w[k + 2];
    }
    for (double& v : w) v /= sum;

    const int nb = cube.bands;
    const int nd = (nb - 1) / 4 + 1;  // stride-4 window centers
    HsiCube out = cube;
    const std::size_t plane = cube.plane_size();
    std::vector<double> down(nd);
    for (std::size_t p = 0; p < plane; ++p) {
        for (int j = 0; j < nd; ++j) {
            const int center = 4 * j;
            double acc = 0.0;
            for (int k = -2; k <= 2; ++k)
                acc += w[k + 2] * cube.data[plane * std::clamp(center + k, 0, nb - 1) + p];
            down[j] = acc;
        }
        for (int b = 0; b < nb; ++b) {
            const int j = static_cast<int>(static_cast<std::int64_t>(b) * nd / nb);
            out.data[plane * b + p] = static_cast<float>(down[j]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

HsiCube apply_noise(const HsiCube& cube, double snr_linear, std::uint64_t seed) {
    cube.validate();
    if (snr_linear <= 0.0) throw ParamError("snr_linear must be positive");

    double power = 0.0;  // mean squared value, per-element signal power
    for (float v : cube.data) power += static_cast<double>(v) * v;
    power /= static_cast<double>(cube.size());

    const double scale = std::sqrt(power / snr_linear);
    HsiCube out = cube;
    const std::size_t plane = cube.plane_size();
    for (int b = 0; b < cube.bands; ++b) {
        Rng64 rng(mix64(seed, static_cast<std::uint64_t>(b)));
        float* dst = out.band_ptr(b);
        for (std::size_t p = 0; p < plane; ++p)
            dst[p] = static_cast<float>(dst[p] + rng.normal() * scale);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Band-missing
// ---------------------------------------------------------------------------

std::vector<int> choose_missing_bands(int bands, int k, std::uint64_t seed) {
    if (k < 0 || k > bands) throw ParamError("missing band count out of range");
    std::vector<int> pool(bands);
    std::iota(pool.begin(), pool.end(), 0);
    Rng64 rng(seed);
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<int>(rng.uniform_int(i, bands - 1));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::pair<HsiCube, std::vector<int>> apply_band_missing(const HsiCube& cube,
                                                        MissingSubtype subtype, int k,
                                                        std::uint64_t seed) {
    cube.validate();
    if (k < 0 || k > cube.bands) throw ParamError("missing band count exceeds band count");

    const std::vector<int> chosen = choose_missing_bands(cube.bands, k, seed);
    HsiCube out = cube;
    for (int b : chosen) {
        float* dst = out.band_ptr(b);
        switch (subtype) {
            case MissingSubtype::complete:
                std::fill(dst, dst + cube.plane_size(), 0.0f);
                break;
            case MissingSubtype::band_wise:
                for (int y = 0; y < cube.height; y += 2)
                    std::fill(dst + static_cast<std::size_t>(y) * cube.width,
                              dst + static_cast<std::size_t>(y + 1) * cube.width, 0.0f);
                break;
            case MissingSubtype::partial: {
                Rng64 rng(mix64(seed, kRowMaskBase + static_cast<std::uint64_t>(b)));
                for (int y = 0; y < cube.height; ++y) {
                    if (rng.uniform() < 0.3)
                        std::fill(dst + static_cast<std::size_t>(y) * cube.width,
                                  dst + static_cast<std::size_t>(y + 1) * cube.width, 0.0f);
                }
                break;
            }
        }
    }
    return {std::move(out), chosen};
}

// ---------------------------------------------------------------------------
// Pipeline and prompts
// ---------------------------------------------------------------------------

std::pair<HsiCube, PromptDescription> degrade_pipeline(const HsiCube& cube,
                                                       const DegradationRecipe& recipe) {
    cube.validate();
    recipe.validate();
    if (!recipe.missing_bands.empty() && recipe.missing_bands.back() >= cube.bands)
        throw ParamError("recipe missing bands exceed cube band count");

    HsiCube current = cube;
    for (Family f : kPipelineOrder) {
        if (!recipe.has(f)) continue;
        switch (f) {
            case Family::cloud:
                current = apply_cloud(current, *recipe.cloud_subtype,
                                      CloudParams::defaults_for(*recipe.cloud_subtype),
                                      mix64(recipe.seed, kCloudStream));
                break;
            case Family::blur:
                current = *recipe.blur_subtype == BlurSubtype::spatial
                              ? apply_spatial_blur(current)
                              : apply_spectral_blur(current);
                break;
            case Family::noise:
                current = apply_noise(current, *recipe.noise_snr, mix64(recipe.seed, kNoiseStream));
                break;
            case Family::band_missing: {
                auto [degraded, bands] =
                    apply_band_missing(current, *recipe.missing_subtype, *recipe.missing_k,
                                       mix64(recipe.seed, kMissingStream));
                if (bands != recipe.missing_bands)
                    throw ParamError("recipe band selection does not reproduce; was the recipe "
                                     "sampled for a different band count?");
                current = std::move(degraded);
                break;
            }
        }
    }
    return {std::move(current), describe(recipe)};
}

const std::vector<std::string>& canonical_tokens() {
    static const std::vector<std::string> tokens = {
        "thickly cloudy", "thinly cloudy",   "noisy",
        "spatial blurring", "spectral blurring",
        "complete missing", "band-wise missing", "partial missing"};
    return tokens;
}

namespace {

std::string cloud_token(CloudSubtype s) {
    return s == CloudSubtype::thick ? "thickly cloudy" : "thinly cloudy";
}
std::string blur_token(BlurSubtype s) {
    return s == BlurSubtype::spatial ? "spatial blurring" : "spectral blurring";
}
std::string missing_token(MissingSubtype s) {
    switch (s) {
        case MissingSubtype::complete: return "complete missing";
        case MissingSubtype::band_wise: return "band-wise missing";
        case MissingSubtype::partial: return "partial missing";
    }
    return "?";
}

// Token classification for prompt assembly. Canonical tag order is cloud,
// noise, blur, band-missing.
enum class TokenKind { cloud, noise, blur, missing };

TokenKind classify(const std::string& tag) {
    if (tag == "thickly cloudy" || tag == "thinly cloudy") return TokenKind::cloud;
    if (tag == "noisy") return TokenKind::noise;
    if (tag == "spatial blurring" || tag == "spectral blurring") return TokenKind::blur;
    if (tag == "complete missing" || tag == "band-wise missing" || tag == "partial missing")
        return TokenKind::missing;
    throw VocabError("unknown degradation tag: '" + tag + "'");
}

}  // namespace

std::string render_prompt(const std::vector<std::string>& tags, int n_missing_bands,
                          PromptFormat format) {
    std::string cloud_tag, noise_tag, blur_tag, missing_tag;
    for (const auto& t : tags) {
        switch (classify(t)) {
            case TokenKind::cloud: cloud_tag = t; break;
            case TokenKind::noise: noise_tag = t; break;
            case TokenKind::blur: blur_tag = t; break;
            case TokenKind::missing: missing_tag = t; break;
        }
    }

    if (format == PromptFormat::short_form) {
        std::string out;
        for (const std::string* t : {&cloud_tag, &noise_tag, &blur_tag, &missing_tag}) {
            if (t->empty()) continue;
            if (!out.empty()) out += ", ";
            out += *t;
        }
        return out.empty() ? "clean" : out;
    }

    if (cloud_tag.empty() && noise_tag.empty() && blur_tag.empty() && missing_tag.empty())
        return "This hyperspectral image is clean.";

    std::vector<std::string> clauses;
    if (!missing_tag.empty())
        clauses.push_back("faces with '" + missing_tag + "' on " +
                          std::to_string(n_missing_bands) + " bands");
    if (!cloud_tag.empty() || !noise_tag.empty()) {
        std::string c = clauses.empty() ? "confronts " : "it also confronts ";
        if (!cloud_tag.empty()) c += "'" + cloud_tag + "'";
        if (!cloud_tag.empty() && !noise_tag.empty()) c += ", ";
        if (!noise_tag.empty()) c += "'" + noise_tag + "'";
        clauses.push_back(c);
    }
    if (!blur_tag.empty()) {
        const std::string domain = blur_tag.substr(0, blur_tag.find(' '));
        std::string c = clauses.empty() ? "there exists " : "besides, there exists ";
        c += "'blurring effect in " + domain + " domain'";
        clauses.push_back(c);
    }

    std::string out = "This hyperspectral image ";
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i) out += "; ";
        out += clauses[i];
    }
    out += ".";
    return out;
}

PromptDescription describe(const DegradationRecipe& recipe) {
    recipe.validate();
    PromptDescription d;
    if (recipe.cloud_subtype) d.tags.push_back(cloud_token(*recipe.cloud_subtype));
    if (recipe.noise_snr) d.tags.push_back("noisy");
    if (recipe.blur_subtype) d.tags.push_back(blur_token(*recipe.blur_subtype));
    if (recipe.missing_subtype) d.tags.push_back(missing_token(*recipe.missing_subtype));
    d.n_missing_bands = recipe.missing_k.value_or(0);
    d.short_text = render_prompt(d.tags, d.n_missing_bands, PromptFormat::short_form);
    d.long_text = render_prompt(d.tags, d.n_missing_bands, PromptFormat::long_form);
    return d;
}

// ---------------------------------------------------------------------------
// Recipe serialization
// ---------------------------------------------------------------------------

std::string recipe_to_string(const DegradationRecipe& recipe) {
    recipe.validate();
    std::string out;
    out += "seed=" + std::to_string(recipe.seed) + "\n";
    out += "gate_prob=" + detail::fmt_double(recipe.gate_prob) + "\n";
    out += "fired=";
    for (std::size_t i = 0; i < recipe.fired.size(); ++i) {
        if (i) out += ",";
        out += family_name(recipe.fired[i]);
    }
    out += "\n";
    if (recipe.cloud_subtype)
        out += std::string("cloud_subtype=") + subtype_name(*recipe.cloud_subtype) + "\n";
    if (recipe.blur_subtype)
        out += std::string("blur_subtype=") + subtype_name(*recipe.blur_subtype) + "\n";
    if (recipe.noise_snr) out += "noise_snr=" + detail::fmt_double(*recipe.noise_snr) + "\n";
    if (recipe.missing_subtype) {
        out += std::string("missing_subtype=") + subtype_name(*recipe.missing_subtype) + "\n";
        out += "missing_k=" + std::to_string(*recipe.missing_k) + "\n";
        out += "missing_bands=";
        for (std::size_t i = 0; i < recipe.missing_bands.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(recipe.missing_bands[i]);
        }
        out += "\n";
    }
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(out)));
    out += std::string("# fnv1a64=") + hash + "\n";
    return out;
}

void write_recipe(const DegradationRecipe& recipe, const fs::path& path) {
    const std::string text = recipe_to_string(recipe);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    if (value.empty()) return out;
    while (true) {
        auto comma = value.find(',', pos);
        out.push_back(value.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

DegradationRecipe read_recipe(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("malformed recipe line: '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }

    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(std::string("recipe missing key: ") + key);
        return it->second;
    };

    DegradationRecipe r;
    r.seed = detail::parse_u64(need("seed"), "seed");
    r.gate_prob = detail::parse_double(need("gate_prob"), "gate_prob");
    for (const auto& name : split_list(need("fired"))) {
        if (name == "cloud") r.fired.push_back(Family::cloud);
        else if (name == "blur") r.fired.push_back(Family::blur);
        else if (name == "noise") r.fired.push_back(Family::noise);
        else if (name == "band_missing") r.fired.push_back(Family::band_missing);
        else throw FormatError("unknown family in recipe: '" + name + "'");
    }
    if (auto it = kv.find("cloud_subtype"); it != kv.end())
        r.cloud_subtype = it->second == "thick" ? CloudSubtype::thick : CloudSubtype::thin;
    if (auto it = kv.find("blur_subtype"); it != kv.end())
        r.blur_subtype = it->second == "spatial" ? BlurSubtype::spatial : BlurSubtype::spectral;
    if (auto it = kv.find("noise_snr"); it != kv.end())
        r.noise_snr = detail::parse_double(it->second, "noise_snr");
    if (auto it = kv.find("missing_subtype"); it != kv.end()) {
        if (it->second == "complete") r.missing_subtype = MissingSubtype::complete;
        else if (it->second == "band_wise") r.missing_subtype = MissingSubtype::band_wise;
        else if (it->second == "partial") r.missing_subtype = MissingSubtype::partial;
        else throw FormatError("unknown missing_subtype: '" + it->second + "'");
    }
    if (auto it = kv.find("missing_k"); it != kv.end())
        r.missing_k = static_cast<int>(detail::parse_int(it->second, "missing_k"));
    if (auto it = kv.find("missing_bands"); it != kv.end())
        for (const auto& tok : split_list(it->second))
            r.missing_bands.push_back(static_cast<int>(detail::parse_int(tok, "missing_bands")));

    r.validate();
    return r;
}

}  // namespace hsikit
