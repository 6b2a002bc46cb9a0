#include "hsikit/freq.hpp"

#include <cmath>

#include "fft.hpp"

namespace hsikit {

namespace {

// Unitary 2-D DFT, not shifted. Row transforms then column transforms.
std::vector<std::complex<double>> dft2(const std::vector<std::complex<double>>& in, int h, int w,
                                       bool inverse) {
    std::vector<std::complex<double>> out = in;
    std::vector<std::complex<double>> line;

    line.resize(w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) line[c] = out[static_cast<std::size_t>(r) * w + c];
        detail::fft_any(line, inverse);
        for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(r) * w + c] = line[c];
    }
    line.resize(h);
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) line[r] = out[static_cast<std::size_t>(r) * w + c];
        detail::fft_any(line, inverse);
        for (int r = 0; r < h; ++r) out[static_cast<std::size_t>(r) * w + c] = line[r];
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
    for (auto& v : out) v *= scale;
    return out;
}

// DC (0,0) -> (h/2, w/2)
std::vector<std::complex<double>> shift_dc(const std::vector<std::complex<double>>& in, int h,
                                           int w) {
    std::vector<std::complex<double>> out(in.size());
    const int cy = h / 2, cx = w / 2;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out[static_cast<std::size_t>((r + cy) % h) * w + (c + cx) % w] =
                in[static_cast<std::size_t>(r) * w + c];
    return out;
}

std::vector<std::complex<double>> unshift_dc(const std::vector<std::complex<double>>& in, int h,
                                             int w) {
    std::vector<std::complex<double>> out(in.size());
    const int cy = h / 2, cx = w / 2;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out[static_cast<std::size_t>(r) * w + c] =
                in[static_cast<std::size_t>((r + cy) % h) * w + (c + cx) % w];
    return out;
}

}  // namespace

Image band_image(const HsiCube& cube, int band) {
    if (band < 0 || band >= cube.bands) throw BoundsError("band index out of range");
    Image img(cube.height, cube.width);
    const float* p = cube.band_ptr(band);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = p[i];
    return img;
}

BandSpectrum fft2_band(const Image& band) {
    if (band.height < 2 || band.width < 2) throw ShapeError("fft2 requires dimensions >= 2");
    std::vector<std::complex<double>> in(band.data.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = {band.data[i], 0.0};
    BandSpectrum s(band.height, band.width);
    s.coeffs = shift_dc(dft2(in, band.height, band.width, false), band.height, band.width);
    return s;
}

std::vector<std::complex<double>> ifft2_complex(const BandSpectrum& spectrum) {
    const auto unshifted = unshift_dc(spectrum.coeffs, spectrum.height, spectrum.width);
    return dft2(unshifted, spectrum.height, spectrum.width, true);
}

Image ifft2_band(const BandSpectrum& spectrum) {
    const auto inv = ifft2_complex(spectrum);
    Image img(spectrum.height, spectrum.width);
    for (std::size_t i = 0; i < inv.size(); ++i) img.data[i] = inv[i].real();
    return img;
}

double normalized_radius(int r, int c, int height, int width) {
    const double fy = static_cast<double>(r - height / 2) / height;
    const double fx = static_cast<double>(c - width / 2) / width;
    return std::hypot(fy, fx);
}

Image residual_spectrum(const HsiCube& clean, const HsiCube& degraded, int band) {
    if (clean.height != degraded.height || clean.width != degraded.width ||
        clean.bands != degraded.bands)
        throw ShapeError("clean and degraded cube shapes differ");
    if (band < 0 || band >= clean.bands) throw BoundsError("band index out of range");

    Image diff(clean.height, clean.width);
    const float* a = clean.band_ptr(band);
    const float* b = degraded.band_ptr(band);
    for (std::size_t i = 0; i < diff.data.size(); ++i)
        diff.data[i] = static_cast<double>(a[i]) - b[i];

    const BandSpectrum s = fft2_band(diff);
    Image out(clean.height, clean.width);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::log1p(std::abs(s.coeffs[i]));
    return out;
}

std::vector<double> radial_profile(const Image& img, int n_bins) {
    if (n_bins < 1) throw ParamError("n_bins must be >= 1");
    const double r_max = std::sqrt(0.5);
    std::vector<double> sum(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            const double rad = normalized_radius(r, c, img.height, img.width);
            int b = static_cast<int>(rad / r_max * n_bins);
            b = std::min(b, n_bins - 1);
            sum[b] += img.at(r, c);
            ++count[b];
        }
    for (int b = 0; b < n_bins; ++b)
        sum[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : 0.0;
    return sum;
}

FreqSplit split_low_high(const BandSpectrum& spectrum, double cutoff_radius) {
    if (!(cutoff_radius > 0.0 && cutoff_radius < 1.0))
        throw ParamError("cutoff_radius must lie in (0, 1)");

    FreqSplit split;
    split.cutoff_radius = cutoff_radius;
    split.low = BandSpectrum(spectrum.height, spectrum.width);
    split.high = BandSpectrum(spectrum.height, spectrum.width);
    const double threshold = 0.5 * cutoff_radius;  // Nyquist units -> cycles/sample
    for (int r = 0; r < spectrum.height; ++r)
        for (int c = 0; c < spectrum.width; ++c) {
            const bool low = normalized_radius(r, c, spectrum.height, spectrum.width) < threshold;
            (low ? split.low : split.high).at(r, c) = spectrum.at(r, c);
        }
    return split;
}

}  // namespace hsikit
