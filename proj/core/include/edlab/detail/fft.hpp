#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace edlab::detail {

enum class FftDirection { forward, backward };

/// Unnormalized in-place DFT. forward: X_k = sum_n x_n exp(-2 pi i k n / N).
void fft_in_place(std::span<std::complex<double>> data, FftDirection direction);

/// `count` interleaved transforms of length n: element k of transform t sits at
/// data[t * distance + k * stride].
void fft_batch(std::span<std::complex<double>> data, std::size_t n, std::size_t count,
               std::size_t stride, std::size_t distance, FftDirection direction);

/// Transforms every column of a row-major rows x cols matrix.
inline void fft_columns(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols,
                        FftDirection direction) {
  fft_batch(data, rows, cols, cols, 1, direction);
}

/// out[k] = scale * exp(i (offset + step k)). Powers are accumulated by
/// multiplication and recomputed exactly every 32 entries.
void linear_phase(double offset, double step, double scale, std::span<std::complex<double>> out);

}  // namespace edlab::detail
