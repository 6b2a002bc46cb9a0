#pragma once

#include <complex>
#include <vector>

#include "hsikit/common.hpp"
#include "hsikit/cube.hpp"

namespace hsikit {

// Small real matrix, row-major. Bands move through here on their way to and
// from the frequency domain.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// DC-centered unitary 2-D spectrum of one band.
struct BandSpectrum {
    int height = 0;
    int width = 0;
    std::vector<std::complex<double>> coeffs;

    BandSpectrum() = default;
    BandSpectrum(int h, int w)
        : height(h), width(w), coeffs(static_cast<std::size_t>(h) * w) {}

    std::complex<double>& at(int r, int c) { return coeffs[static_cast<std::size_t>(r) * width + c]; }
    std::complex<double> at(int r, int c) const { return coeffs[static_cast<std::size_t>(r) * width + c]; }
};

// Complementary binary radial split of a spectrum. low + high reproduces the
// input coefficient-for-coefficient.
struct FreqSplit {
    BandSpectrum low;
    BandSpectrum high;
    double cutoff_radius = 0.25;
};

Image band_image(const HsiCube& cube, int band);

// Unitary DFT (1/sqrt(HW) both ways), mixed-radix capable (radix-2 fast path,
// Bluestein otherwise), DC shifted to (H/2, W/2).
BandSpectrum fft2_band(const Image& band);
Image ifft2_band(const BandSpectrum& spectrum);

// Inverse transform without discarding the imaginary part, row-major
// (for residue checks on nominally real results).
std::vector<std::complex<double>> ifft2_complex(const BandSpectrum& spectrum);

// Normalized frequency radius of a DC-centered coefficient, cycles/sample,
// range [0, sqrt(2)/2].
double normalized_radius(int r, int c, int height, int width);

// log(1 + |F(clean - degraded)|) of one band, DC-centered.
Image residual_spectrum(const HsiCube& clean, const HsiCube& degraded, int band);

// Mean value of a DC-centered real matrix over n_bins uniform radial bins.
std::vector<double> radial_profile(const Image& img, int n_bins);

// cutoff_radius is in units of the Nyquist radius (0, 1): a coefficient is
// low-frequency iff normalized_radius < 0.5 * cutoff_radius.
FreqSplit split_low_high(const BandSpectrum& spectrum, double cutoff_radius);

}  // namespace hsikit
