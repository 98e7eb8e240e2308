#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace asso::detail {

// Out-of-place forward DFT (in and out must not alias), X[k] = sum_n x[n] exp(-j 2 pi k n / N), backed by
// FFTW. Plans are cached per length and shared across threads; execution uses
// the new-array interface, which FFTW documents as thread safe.
void forward_dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

} // namespace asso::detail
