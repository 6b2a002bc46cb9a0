#include "hsikit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "detail_io.hpp"

namespace hsikit {

namespace fs = std::filesystem;

namespace {

constexpr double kEps = 1e-8;
constexpr double kPsnrCap = 100.0;

void check_pair(const HsiCube& ref, const HsiCube& test) {
    if (ref.height != test.height || ref.width != test.width || ref.bands != test.bands)
        throw ShapeError("reference and test cube shapes differ");
}

double mse(const HsiCube& ref, const HsiCube& test) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        const double d = static_cast<double>(ref.data[i]) - test.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(ref.size());
}

}  // namespace

double psnr(const HsiCube& ref, const HsiCube& test, double data_range) {
    check_pair(ref, test);
    if (data_range <= 0.0) throw ParamError("data_range must be positive");
    const double m = mse(ref, test);
    if (m == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(data_range * data_range / m));
}

double sam_radians(const HsiCube& ref, const HsiCube& test) {
    check_pair(ref, test);
    if (ref.bands < 2) throw ShapeError("SAM requires at least 2 bands");

    const std::size_t plane = ref.plane_size();
    double acc = 0.0;
    for (std::size_t p = 0; p < plane; ++p) {
        double dot = 0.0, nr = 0.0, nt = 0.0;
        for (int b = 0; b < ref.bands; ++b) {
            const double x = ref.data[plane * b + p];
            const double y = test.data[plane * b + p];
            dot += x * y;
            nr += x * x;
            nt += y * y;
        }
        const double cosv = (dot + kEps) / (std::sqrt(nr) * std::sqrt(nt) + kEps);
        acc += std::acos(std::clamp(cosv, -1.0, 1.0));
    }
    return acc / static_cast<double>(plane);
}

double sam_degrees(const HsiCube& ref, const HsiCube& test) {
    return sam_radians(ref, test) * (180.0 / 3.14159265358979323846);
}

double rmse(const HsiCube& ref, const HsiCube& test) {
    check_pair(ref, test);
    return std::sqrt(mse(ref, test));
}

double ergas(const HsiCube& ref, const HsiCube& test, double scale_ratio) {
    check_pair(ref, test);
    const std::size_t plane = ref.plane_size();
    double acc = 0.0;
    for (int b = 0; b < ref.bands; ++b) {
        double band_mse = 0.0, band_mean = 0.0;
        const float* r = ref.band_ptr(b);
        const float* t = test.band_ptr(b);
        for (std::size_t p = 0; p < plane; ++p) {
            const double d = static_cast<double>(r[p]) - t[p];
            band_mse += d * d;
            band_mean += r[p];
        }
        band_mse /= static_cast<double>(plane);
        band_mean /= static_cast<double>(plane);
        const double rel = std::sqrt(band_mse) / std::max(std::abs(band_mean), kEps);
        acc += rel * rel;
    }
    return 100.0 * scale_ratio * std::sqrt(acc / ref.bands);
}

MetricsReport evaluate(const HsiCube& ref, const HsiCube& test, double data_range,
                       double scale_ratio) {
    MetricsReport rep;
    rep.psnr_db = psnr(ref, test, data_range);
    rep.sam_deg = sam_degrees(ref, test);
    rep.rmse = rmse(ref, test);
    rep.ergas = ergas(ref, test, scale_ratio);
    return rep;
}

// ---------------------------------------------------------------------------
// Undecimated Haar transform
// ---------------------------------------------------------------------------

namespace {

// One a-trous Haar level along both axes, taps at offsets 0 and `step`,
// periodic boundary. low = (x0 + x1)/2, high = (x0 - x1)/2, so per level
// input = LL + LH + HL + HH identically.
void haar_level(const std::vector<double>& in, int h, int w, int step,
                std::vector<double>& ll, std::vector<double>& lh, std::vector<double>& hl,
                std::vector<double>& hh) {
    std::vector<double> row_l(in.size()), row_h(in.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double a = in[static_cast<std::size_t>(y) * w + x];
            const double b = in[static_cast<std::size_t>(y) * w + (x + step) % w];
            row_l[static_cast<std::size_t>(y) * w + x] = 0.5 * (a + b);
            row_h[static_cast<std::size_t>(y) * w + x] = 0.5 * (a - b);
        }
    ll.resize(in.size());
    lh.resize(in.size());
    hl.resize(in.size());
    hh.resize(in.size());
    for (int y = 0; y < h; ++y) {
        const int y2 = (y + step) % h;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const std::size_t i2 = static_cast<std::size_t>(y2) * w + x;
            ll[i] = 0.5 * (row_l[i] + row_l[i2]);
            hl[i] = 0.5 * (row_l[i] - row_l[i2]);
            lh[i] = 0.5 * (row_h[i] + row_h[i2]);
            hh[i] = 0.5 * (row_h[i] - row_h[i2]);
        }
    }
}

}  // namespace

std::vector<std::vector<double>> swt2_haar(const std::vector<double>& img, int h, int w,
                                           int levels) {
    if (levels < 1) throw ParamError("levels must be >= 1");
    if (h < (1 << levels) || w < (1 << levels))
        throw ShapeError("image too small for requested SWT levels");
    if (img.size() != static_cast<std::size_t>(h) * w)
        throw ShapeError("image size does not match dimensions");

    std::vector<std::vector<double>> subbands;
    std::vector<double> approx = img;
    int step = 1;
    for (int j = 0; j < levels; ++j) {
        std::vector<double> ll, lh, hl, hh;
        haar_level(approx, h, w, step, ll, lh, hl, hh);
        subbands.push_back(std::move(lh));
        subbands.push_back(std::move(hl));
        subbands.push_back(std::move(hh));
        approx = std::move(ll);
        step <<= 1;
    }
    subbands.push_back(std::move(approx));
    return subbands;
}

std::vector<double> swt2_reconstruct(const std::vector<std::vector<double>>& subbands) {
    if (subbands.empty()) throw ParamError("no sub-bands");
    std::vector<double> out(subbands[0].size(), 0.0);
    for (const auto& sb : subbands)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += sb[i];
    return out;
}

double swt_loss(const HsiCube& ref, const HsiCube& test, int levels,
                const std::vector<double>& weights) {
    check_pair(ref, test);
    const std::size_t n_subbands = 3 * static_cast<std::size_t>(levels) + 1;
    if (weights.size() != n_subbands)
        throw ParamError("weights length must be 3*levels + 1 = " + std::to_string(n_subbands));

    const std::size_t plane = ref.plane_size();
    std::vector<double> a(plane), b(plane);
    double acc = 0.0;
    for (int band = 0; band < ref.bands; ++band) {
        const float* rp = ref.band_ptr(band);
        const float* tp = test.band_ptr(band);
        for (std::size_t i = 0; i < plane; ++i) {
            a[i] = rp[i];
            b[i] = tp[i];
        }
        const auto sa = swt2_haar(a, ref.height, ref.width, levels);
        const auto sb = swt2_haar(b, ref.height, ref.width, levels);
        double band_loss = 0.0;
        for (std::size_t j = 0; j < n_subbands; ++j) {
            double mad = 0.0;
            for (std::size_t i = 0; i < plane; ++i) mad += std::abs(sa[j][i] - sb[j][i]);
            band_loss += weights[j] * mad / static_cast<double>(plane);
        }
        acc += band_loss;
    }
    return acc / ref.bands;
}

double l1_loss(const HsiCube& ref, const HsiCube& test) {
    check_pair(ref, test);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i)
        acc += std::abs(static_cast<double>(ref.data[i]) - test.data[i]);
    return acc / static_cast<double>(ref.size());
}

double bmse_loss(const HsiCube& ref, const HsiCube& test) {
    check_pair(ref, test);
    const std::size_t plane = ref.plane_size();
    double acc = 0.0;
    for (int b = 0; b < ref.bands; ++b) {
        const float* r = ref.band_ptr(b);
        const float* t = test.band_ptr(b);
        double band_sq = 0.0;
        for (std::size_t p = 0; p < plane; ++p) {
            const double d = static_cast<double>(r[p]) - t[p];
            band_sq += d * d;
        }
        acc += std::sqrt(band_sq / static_cast<double>(plane));  // per-band RMS
    }
    return acc / ref.bands;
}

LossReport total_loss(const HsiCube& ref, const HsiCube& test, const LossWeights& weights,
                      int swt_levels) {
    LossReport rep;
    rep.weights = weights;
    rep.l1 = l1_loss(ref, test);
    rep.sam_loss_rad = sam_radians(ref, test);
    rep.swt = swt_loss(ref, test, swt_levels,
                       std::vector<double>(3 * static_cast<std::size_t>(swt_levels) + 1, 1.0));
    rep.bmse = bmse_loss(ref, test);
    rep.total = weights.l1 * rep.l1 + weights.sam * rep.sam_loss_rad + weights.swt * rep.swt +
                weights.bmse * rep.bmse;
    return rep;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

void append_row(const fs::path& path, const char* header, const std::string& row) {
    const bool fresh = !fs::exists(path);
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    if (fresh) f << header << "\n";
    f << row << "\n";
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace

void append_metrics_csv(const fs::path& path, const MetricsReport& report) {
    append_row(path, "psnr_db,sam_deg,rmse,ergas",
               detail::fmt_double(report.psnr_db) + "," + detail::fmt_double(report.sam_deg) +
                   "," + detail::fmt_double(report.rmse) + "," + detail::fmt_double(report.ergas));
}

void append_loss_csv(const fs::path& path, const LossReport& report) {
    append_row(path, "l1,sam_loss_rad,swt,bmse,total,lambda1,lambda2,lambda3,lambda4",
               detail::fmt_double(report.l1) + "," + detail::fmt_double(report.sam_loss_rad) +
                   "," + detail::fmt_double(report.swt) + "," + detail::fmt_double(report.bmse) +
                   "," + detail::fmt_double(report.total) + "," +
                   detail::fmt_double(report.weights.l1) + "," +
                   detail::fmt_double(report.weights.sam) + "," +
                   detail::fmt_double(report.weights.swt) + "," +
                   detail::fmt_double(report.weights.bmse));
}

}  // namespace hsikit
