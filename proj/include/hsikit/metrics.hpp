#pragma once

#include <filesystem>
#include <vector>

#include "hsikit/common.hpp"
#include "hsikit/cube.hpp"

namespace hsikit {

struct MetricsReport {
    double psnr_db = 0.0;
    double sam_deg = 0.0;
    double rmse = 0.0;
    double ergas = 0.0;
};

struct LossWeights {
    double l1 = 1.0;
    double sam = 0.001;
    double swt = 0.01;
    double bmse = 0.01;
};

struct LossReport {
    double l1 = 0.0;
    double sam_loss_rad = 0.0;
    double swt = 0.0;
    double bmse = 0.0;
    double total = 0.0;
    LossWeights weights;
};

// 10 log10(range^2 / MSE) over the whole cube, capped at 100 dB.
double psnr(const HsiCube& ref, const HsiCube& test, double data_range = 1.0);

// Mean per-pixel arccos((x.y + eps) / (|x||y| + eps)), eps = 1e-8.
double sam_radians(const HsiCube& ref, const HsiCube& test);
double sam_degrees(const HsiCube& ref, const HsiCube& test);

double rmse(const HsiCube& ref, const HsiCube& test);

// 100 * scale_ratio * sqrt(mean_b (RMSE_b / mean_b(ref))^2), eps-guarded
// band means (Wald definition, same-resolution default scale_ratio = 1).
double ergas(const HsiCube& ref, const HsiCube& test, double scale_ratio = 1.0);

MetricsReport evaluate(const HsiCube& ref, const HsiCube& test, double data_range = 1.0,
                       double scale_ratio = 1.0);

// ----------------------------------------------------------------------------
// Undecimated (a-trous) 2-D Haar transform, periodic boundary. Analysis
// filters low = (1/2, 1/2), high = (1/2, -1/2) with taps at offsets 0 and 2^j
// at level j. Sub-band order: level 0 (LH, HL, HH), level 1 (LH, HL, HH), ...,
// then the final LL. The plain sum of all sub-bands reconstructs the input.
// ----------------------------------------------------------------------------

std::vector<std::vector<double>> swt2_haar(const std::vector<double>& img, int h, int w,
                                           int levels);
std::vector<double> swt2_reconstruct(const std::vector<std::vector<double>>& subbands);

// Per band: weighted mean-absolute sub-band differences (weights length
// 3 * levels + 1), averaged over bands. Requires height and width
// >= 2^levels.
double swt_loss(const HsiCube& ref, const HsiCube& test, int levels,
                const std::vector<double>& weights);

double l1_loss(const HsiCube& ref, const HsiCube& test);

// Mean over bands of the per-band RMS error (resolution-independent reading
// of the band-wise L2 term).
double bmse_loss(const HsiCube& ref, const HsiCube& test);

// All four terms (SAM in radians) and the weighted total. SWT runs with
// swt_levels levels and all-one sub-band weights.
LossReport total_loss(const HsiCube& ref, const HsiCube& test, const LossWeights& weights = {},
                      int swt_levels = 2);

// CSV appenders; the header is written when the file does not yet exist.
void append_metrics_csv(const std::filesystem::path& path, const MetricsReport& report);
void append_loss_csv(const std::filesystem::path& path, const LossReport& report);

}  // namespace hsikit
