#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsikit/common.hpp"
#include "hsikit/cube.hpp"

namespace hsikit {

// ----------------------------------------------------------------------------
// Composite degradation synthesis: four families behind independent
// probabilistic gates, each fired family applying one randomly chosen subtype.
// Application order is fixed: cloud -> blur -> noise -> band-missing.
// ----------------------------------------------------------------------------

enum class Family { cloud, blur, noise, band_missing };

enum class CloudSubtype { thick, thin };
enum class BlurSubtype { spatial, spectral };
enum class MissingSubtype { complete, band_wise, partial };

const char* family_name(Family f);
const char* subtype_name(CloudSubtype s);
const char* subtype_name(BlurSubtype s);
const char* subtype_name(MissingSubtype s);

// Cloud mask generator parameters. Fields hold the ranges concrete values are
// drawn from per application.
struct CloudParams {
    IntRange locality_degree{2, 4};   // octave count of the mask noise
    Range min_lvl{0.0, 0.0};          // mask range after rescale
    Range max_lvl{1.0, 1.0};
    Range clear_threshold{0.0, 0.4};  // noise below the draw is forced clear
    double blur_scaling = 1.0;        // gaussian sigma applied to the mask
    double decay_factor = 1.0;        // per-band cloud amplitude decay
    int channel_offset = 0;           // per-band mask roll in pixels

    static CloudParams thick();
    static CloudParams thin();
    static CloudParams defaults_for(CloudSubtype s);

    void validate() const;
};

struct DegradationRecipe {
    std::uint64_t seed = 0;
    double gate_prob = 0.5;
    std::vector<Family> fired;  // subset of the four families, pipeline order

    std::optional<CloudSubtype> cloud_subtype;
    std::optional<BlurSubtype> blur_subtype;
    std::optional<double> noise_snr;  // linear power ratio, >= 1
    std::optional<MissingSubtype> missing_subtype;
    std::optional<int> missing_k;
    std::vector<int> missing_bands;  // sorted, unique, 0-based

    bool has(Family f) const;
    void validate() const;
};

struct PromptDescription {
    std::vector<std::string> tags;  // canonical order: cloud, noise, blur, missing
    int n_missing_bands = 0;
    std::string short_text;
    std::string long_text;
};

enum class PromptFormat { short_form, long_form };

// The eight canonical degradation tokens, in canonical order.
const std::vector<std::string>& canonical_tokens();

// Draws one recipe. Each family fires independently with probability
// gate_prob; fired families pick a subtype uniformly; SNR ~ Normal(35, 5)
// clamped below at 1 (linear power ratio); missing band count uniform in
// [1, missing_k_max] (default bands/2). Fully deterministic in (seed,
// gate_prob, bands, missing_k_max).
DegradationRecipe sample_recipe(std::uint64_t seed, double gate_prob, int bands = 172,
                                int missing_k_max = 0);

// Transparency mask in [0, 1] for one application, h*w row-major.
// Construction: product of locality_degree single-octave value-noise fields
// (frequency doubling per octave), clear-thresholded, restretched, rescaled to
// [min_lvl, max_lvl] (cleared pixels stay 0), gaussian-smoothed with
// sigma = blur_scaling.
std::vector<double> cloud_mask(int h, int w, const CloudParams& params, std::uint64_t seed);

// (1 - M) * clean + M * plate per pixel/band, plate amplitude
// decay_factor^band, output clamped to [0, 1].
HsiCube apply_cloud(const HsiCube& cube, CloudSubtype subtype, const CloudParams& params,
                    std::uint64_t seed);

// Bilinear downsample x4 then bilinear upsample back, half-pixel centers,
// clamped edges, per band.
HsiCube apply_spatial_blur(const HsiCube& cube);

// Gaussian window (size 5, sigma 1, clamped indices) along bands with stride
// 4, then nearest-neighbor upsample back to the original band count.
HsiCube apply_spectral_blur(const HsiCube& cube);

// cube + eps * sqrt(mean(cube^2) / snr_linear), eps unit gaussian per element.
// Per-band generator streams: Rng64(mix64(seed, band)).
HsiCube apply_noise(const HsiCube& cube, double snr_linear, std::uint64_t seed);

// The k distinct bands a given seed selects (partial Fisher-Yates, sorted).
std::vector<int> choose_missing_bands(int bands, int k, std::uint64_t seed);

// complete: chosen bands zeroed. band_wise: even rows (0, 2, 4, ...) zeroed on
// chosen bands. partial: per chosen band, each row zeroed with probability 0.3
// (one uniform per row, row order, stream Rng64(mix64(seed, 1000 + band))).
std::pair<HsiCube, std::vector<int>> apply_band_missing(const HsiCube& cube,
                                                        MissingSubtype subtype, int k,
                                                        std::uint64_t seed);

// Applies recipe.fired in pipeline order with per-family sub-seeds
// mix64(recipe.seed, 2..4), and renders the matching prompt.
std::pair<HsiCube, PromptDescription> degrade_pipeline(const HsiCube& cube,
                                                       const DegradationRecipe& recipe);

PromptDescription describe(const DegradationRecipe& recipe);

// short: canonical-order ", " join ("clean" when empty). long: supplementary
// sentence template with absent clauses dropped.
std::string render_prompt(const std::vector<std::string>& tags, int n_missing_bands,
                          PromptFormat format);

// key=value recipe files, '#' comments, round-trippable.
void write_recipe(const DegradationRecipe& recipe, const std::filesystem::path& path);
DegradationRecipe read_recipe(const std::filesystem::path& path);
std::string recipe_to_string(const DegradationRecipe& recipe);

}  // namespace hsikit
