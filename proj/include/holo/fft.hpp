#pragma once

#include <cstddef>
#include <memory>

#include "holo/types.hpp"

namespace holo {

/// In-place 2D complex DFT of a fixed shape, backed by FFTW.
///
/// Convention: forward is unscaled with the e^{-2 pi i k x / N} kernel;
/// inverse carries the 1/(W*H) factor so inverse(forward(x)) == x.
/// Plans are created once per instance; an instance may not be shared
/// between threads, but separate instances can run concurrently.
class Fft2d {
 public:
  Fft2d(std::size_t height, std::size_t width);
  ~Fft2d();
  Fft2d(Fft2d&&) noexcept;
  Fft2d& operator=(Fft2d&&) noexcept;
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::size_t height() const;
  std::size_t width() const;

  void forward(ComplexGrid& grid);
  void inverse(ComplexGrid& grid);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// DFT sample frequencies in cycles per meter, in FFT order (0, 1, ...,
/// -1), for n samples at the given pitch.
double fft_frequency(std::size_t index, std::size_t n, double pitch);

/// Moves the zero-frequency sample to the grid center, (H/2, W/2).
template <typename T>
Grid2D<T> fft_shift(const Grid2D<T>& in) {
  Grid2D<T> out(in.height(), in.width());
  const std::size_t h = in.height();
  const std::size_t w = in.width();
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t rr = (r + h / 2) % h;
    for (std::size_t c = 0; c < w; ++c) out(rr, (c + w / 2) % w) = in(r, c);
  }
  return out;
}

}  // namespace holo
