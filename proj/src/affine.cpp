#include "hsikit/affine.hpp"

#include <cmath>
#include <fstream>

#include "detail_io.hpp"

namespace hsikit {

namespace fs = std::filesystem;

int AffineFreqModel::bin_of(double radius) const {
    if (radius <= bin_edges.front()) return 0;
    for (int b = 0; b < n_bins; ++b) {
        if (radius < bin_edges[b + 1]) return b;
    }
    return n_bins - 1;
}

std::vector<double> uniform_bin_edges(int n_bins) {
    const double r_max = std::sqrt(0.5);
    std::vector<double> edges(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) edges[b] = r_max * b / n_bins;
    return edges;
}

namespace {

void check_pair(const HsiCube& clean, const HsiCube& degraded) {
    if (clean.height != degraded.height || clean.width != degraded.width ||
        clean.bands != degraded.bands)
        throw ShapeError("clean and degraded cube shapes differ");
}

struct BinAccum {
    std::complex<double> sum_c{0.0, 0.0};   // sum of clean coefficients
    std::complex<double> sum_d{0.0, 0.0};   // sum of degraded coefficients
    std::complex<double> sum_cd{0.0, 0.0};  // sum of conj(clean) * degraded
    double sum_cc = 0.0;                    // sum of |clean|^2
    std::size_t n = 0;

    void add(std::complex<double> c, std::complex<double> d) {
        sum_c += c;
        sum_d += d;
        sum_cd += std::conj(c) * d;
        sum_cc += std::norm(c);
        ++n;
    }

    void merge(const BinAccum& o) {
        sum_c += o.sum_c;
        sum_d += o.sum_d;
        sum_cd += o.sum_cd;
        sum_cc += o.sum_cc;
        n += o.n;
    }
};

}  // namespace

AffineFreqModel fit_affine_model(const HsiCube& clean, const HsiCube& degraded, int n_bins) {
    check_pair(clean, degraded);
    if (n_bins < 1) throw ParamError("n_bins must be >= 1");

    AffineFreqModel model;
    model.n_bins = n_bins;
    model.bin_edges = uniform_bin_edges(n_bins);

    // Fixed band-major accumulation keeps results independent of any future
    // parallel split across bands.
    std::vector<BinAccum> acc(n_bins);
    for (int band = 0; band < clean.bands; ++band) {
        const BandSpectrum fc = fft2_band(band_image(clean, band));
        const BandSpectrum fd = fft2_band(band_image(degraded, band));
        for (int r = 0; r < fc.height; ++r)
            for (int c = 0; c < fc.width; ++c) {
                const int b = model.bin_of(normalized_radius(r, c, fc.height, fc.width));
                acc[b].add(fc.at(r, c), fd.at(r, c));
            }
    }

    model.lambda.resize(n_bins);
    model.mu.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        const BinAccum& a = acc[b];
        if (a.n < 2)
            throw ParamError("degenerate radial bin " + std::to_string(b) +
                             ": fewer than 2 coefficients");
        // Normal equations of min |d - lh*c - mu|^2:
        //   [sum|c|^2  sum(conj c)] [lh]   [sum(conj c * d)]
        //   [sum c     n         ] [mu] = [sum d          ]
        const double n = static_cast<double>(a.n);
        const double det = a.sum_cc * n - std::norm(a.sum_c);
        const double det_floor = 1e-12 * (a.sum_cc * n + 1.0);
        std::complex<double> lambda_hat, mu_hat;
        if (det <= det_floor) {
            // No clean variation in the bin (all coefficients equal): the
            // slope is unidentifiable, pin lambda_hat = 1 and fit the bias.
            lambda_hat = {1.0, 0.0};
            mu_hat = (a.sum_d - a.sum_c) / n;
        } else {
            lambda_hat = (a.sum_cd * n - std::conj(a.sum_c) * a.sum_d) / det;
            mu_hat = (a.sum_cc * a.sum_d - a.sum_c * a.sum_cd) / det;
        }
        model.lambda[b] = lambda_hat - 1.0;
        model.mu[b] = mu_hat;
    }
    return model;
}

HsiCube invert_affine_model(const HsiCube& degraded, const AffineFreqModel& model,
                            double epsilon) {
    degraded.validate();
    if (epsilon <= 0.0) throw ParamError("epsilon must be positive");
    if (model.n_bins < 1 || static_cast<int>(model.lambda.size()) != model.n_bins ||
        static_cast<int>(model.mu.size()) != model.n_bins ||
        static_cast<int>(model.bin_edges.size()) != model.n_bins + 1)
        throw ParamError("model is inconsistent");

    HsiCube out = degraded;
    for (int band = 0; band < degraded.bands; ++band) {
        BandSpectrum f = fft2_band(band_image(degraded, band));
        for (int r = 0; r < f.height; ++r)
            for (int c = 0; c < f.width; ++c) {
                const int b = model.bin_of(normalized_radius(r, c, f.height, f.width));
                const std::complex<double> lambda_hat = 1.0 + model.lambda[b];
                const double denom = std::max(std::norm(lambda_hat), epsilon);
                f.at(r, c) = (f.at(r, c) - model.mu[b]) * std::conj(lambda_hat) / denom;
            }
        const Image restored = ifft2_band(f);
        float* dst = out.band_ptr(band);
        for (std::size_t i = 0; i < restored.data.size(); ++i)
            dst[i] = static_cast<float>(restored.data[i]);
    }
    return out;
}

std::vector<int> non_invertible_bins(const AffineFreqModel& model, double epsilon) {
    std::vector<int> bins;
    for (int b = 0; b < model.n_bins; ++b) {
        if (std::norm(1.0 + model.lambda[b]) <= epsilon) bins.push_back(b);
    }
    return bins;
}

std::vector<double> radial_bias_profile(const HsiCube& clean, const HsiCube& degraded,
                                        const AffineFreqModel& model) {
    check_pair(clean, degraded);
    std::vector<double> sum(model.n_bins, 0.0);
    std::vector<std::size_t> count(model.n_bins, 0);
    for (int band = 0; band < clean.bands; ++band) {
        const BandSpectrum fc = fft2_band(band_image(clean, band));
        const BandSpectrum fd = fft2_band(band_image(degraded, band));
        for (int r = 0; r < fc.height; ++r)
            for (int c = 0; c < fc.width; ++c) {
                const int b = model.bin_of(normalized_radius(r, c, fc.height, fc.width));
                const std::complex<double> bias =
                    fd.at(r, c) - (1.0 + model.lambda[b]) * fc.at(r, c);
                sum[b] += std::abs(bias);
                ++count[b];
            }
    }
    for (int b = 0; b < model.n_bins; ++b)
        sum[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : 0.0;
    return sum;
}

void write_model_csv(const AffineFreqModel& model, const fs::path& path) {
    std::string out = "bin,edge_lo,edge_hi,lambda_re,lambda_im,mu_re,mu_im\n";
    for (int b = 0; b < model.n_bins; ++b) {
        out += std::to_string(b) + "," + detail::fmt_double(model.bin_edges[b]) + "," +
               detail::fmt_double(model.bin_edges[b + 1]) + "," +
               detail::fmt_double(model.lambda[b].real()) + "," +
               detail::fmt_double(model.lambda[b].imag()) + "," +
               detail::fmt_double(model.mu[b].real()) + "," +
               detail::fmt_double(model.mu[b].imag()) + "\n";
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

AffineFreqModel read_model_csv(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path.string());

    std::string line;
    if (!std::getline(f, line)) throw FormatError("empty model file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "bin,edge_lo,edge_hi,lambda_re,lambda_im,mu_re,mu_im")
        throw FormatError("unexpected model CSV header: '" + line + "'");

    AffineFreqModel model;
    std::vector<double> hi_edges;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            cols.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols.size() != 7) throw FormatError("model CSV row needs 7 columns: '" + line + "'");
        const int bin = static_cast<int>(detail::parse_int(cols[0], "bin"));
        if (bin != static_cast<int>(model.lambda.size()))
            throw FormatError("model CSV bins out of order");
        model.bin_edges.push_back(detail::parse_double(cols[1], "edge_lo"));
        hi_edges.push_back(detail::parse_double(cols[2], "edge_hi"));
        model.lambda.emplace_back(detail::parse_double(cols[3], "lambda_re"),
                                  detail::parse_double(cols[4], "lambda_im"));
        model.mu.emplace_back(detail::parse_double(cols[5], "mu_re"),
                              detail::parse_double(cols[6], "mu_im"));
    }
    if (model.lambda.empty()) throw FormatError("model CSV has no rows");
    model.n_bins = static_cast<int>(model.lambda.size());
    model.bin_edges.push_back(hi_edges.back());
    for (int b = 0; b < model.n_bins; ++b) {
        if (b + 1 < model.n_bins && hi_edges[b] != model.bin_edges[b + 1])
            throw FormatError("model CSV edges do not chain");
        if (!(model.bin_edges[b] < model.bin_edges[b + 1]))
            throw FormatError("model CSV edges not strictly increasing");
    }
    return model;
}

}  // namespace hsikit
