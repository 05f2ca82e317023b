#pragma once

#include <complex>
#include <span>

namespace hwlab::detail {

/// Unnormalized in-place DFT on a dim-dimensional cube of n points per
/// axis. sign = -1 forward, +1 backward. Safe to call from several threads.
void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign);

}  // namespace hwlab::detail
