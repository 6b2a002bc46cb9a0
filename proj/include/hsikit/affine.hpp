#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "hsikit/common.hpp"
#include "hsikit/cube.hpp"
#include "hsikit/freq.hpp"

namespace hsikit {

// ----------------------------------------------------------------------------
// Per-radial-bin affine frequency-domain degradation model:
//   F(degraded) = (1 + lambda_b) . F(clean) + mu_b   on bin b.
// lambda scales amplitudes, mu is the additive bias. Stored as lambda (not
// lambda_hat = 1 + lambda).
// ----------------------------------------------------------------------------

struct AffineFreqModel {
    int n_bins = 0;
    std::vector<std::complex<double>> lambda;
    std::vector<std::complex<double>> mu;
    std::vector<double> bin_edges;  // n_bins + 1, strictly increasing, cycles/sample

    // Bin index for a coefficient radius; clamps outside the edge span.
    int bin_of(double radius) const;
};

// Uniform edges over [0, sqrt(2)/2].
std::vector<double> uniform_bin_edges(int n_bins);

// Closed-form complex least squares per bin, aggregated over all bands and
// all coefficients in the bin (fixed band-major accumulation order). A bin
// with fewer than 2 coefficients raises ParamError naming the bin. A bin with
// no clean variation pins lambda_hat = 1 and fits mu alone.
AffineFreqModel fit_affine_model(const HsiCube& clean, const HsiCube& degraded, int n_bins);

// Per band, per coefficient:
//   F_rest = (F_deg - mu_b) * conj(lambda_hat_b) / max(|lambda_hat_b|^2, epsilon)
// then inverse transform (Wiener-style guard near |lambda_hat| = 0).
HsiCube invert_affine_model(const HsiCube& degraded, const AffineFreqModel& model,
                            double epsilon = 1e-3);

// Bins where |1 + lambda_b|^2 <= epsilon, i.e. the guard clips instead of
// inverting.
std::vector<int> non_invertible_bins(const AffineFreqModel& model, double epsilon = 1e-3);

// Bin-averaged magnitude of the additive bias field F(deg) - lambda_hat_b *
// F(clean), the quantity that is flat across bins for white noise. The fitted
// point value mu_b is the bin mean of the same field.
std::vector<double> radial_bias_profile(const HsiCube& clean, const HsiCube& degraded,
                                        const AffineFreqModel& model);

// CSV: header bin,edge_lo,edge_hi,lambda_re,lambda_im,mu_re,mu_im, one row per
// bin, shortest round-trip-exact decimal formatting.
void write_model_csv(const AffineFreqModel& model, const std::filesystem::path& path);
AffineFreqModel read_model_csv(const std::filesystem::path& path);

}  // namespace hsikit
