#pragma once

#include <complex>
#include <span>

namespace chronoclock::fft {

/// In-place radix-2 FFT for power-of-two sizes.
///
/// sign = -1: forward,  a_k <- sum_j a_j exp(-2*pi*i*j*k/n)
/// sign = +1: inverse,  a_j <- sum_k a_k exp(+2*pi*i*j*k/n)  (unscaled)
///
/// The caller applies any 1/n or unitary normalization. Throws
/// std::invalid_argument if the size is not a power of two.
void transform_pow2(std::span<std::complex<double>> a, int sign);

bool is_pow2(std::size_t n);

} // namespace chronoclock::fft
