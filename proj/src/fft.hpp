#pragma once

#include <complex>
#include <vector>

namespace hsikit::detail {

// In-place unnormalized DFT of arbitrary length: iterative radix-2 for powers
// of two, Bluestein's chirp-z otherwise. inverse=true flips the exponent sign
// (no 1/n scaling either way).
void fft_any(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace hsikit::detail
