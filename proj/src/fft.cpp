#include "holo/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "holo/error.hpp"

namespace holo {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft2d::Impl {
  std::size_t height = 0;
  std::size_t width = 0;
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    if (buffer) fftw_free(buffer);
  }

  void load(const ComplexGrid& grid) {
    static_assert(sizeof(Complex) == sizeof(fftw_complex));
    std::memcpy(buffer, grid.data(), grid.size() * sizeof(fftw_complex));
  }
  void store(ComplexGrid& grid) const {
    std::memcpy(static_cast<void*>(grid.data()), buffer, grid.size() * sizeof(fftw_complex));
  }
};

Fft2d::Fft2d(std::size_t height, std::size_t width) : impl_(std::make_unique<Impl>()) {
  if (height == 0 || width == 0) throw ConfigError("fft: empty grid");
  impl_->height = height;
  impl_->width = width;
  std::lock_guard lock(planner_mutex());
  impl_->buffer = fftw_alloc_complex(height * width);
  if (!impl_->buffer) throw NumericalError("fft: allocation failed");
  const int h = static_cast<int>(height);
  const int w = static_cast<int>(width);
  impl_->forward =
      fftw_plan_dft_2d(h, w, impl_->buffer, impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inverse =
      fftw_plan_dft_2d(h, w, impl_->buffer, impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->forward || !impl_->inverse) throw NumericalError("fft: planning failed");
}

Fft2d::~Fft2d() = default;
Fft2d::Fft2d(Fft2d&&) noexcept = default;
Fft2d& Fft2d::operator=(Fft2d&&) noexcept = default;

std::size_t Fft2d::height() const { return impl_->height; }
std::size_t Fft2d::width() const { return impl_->width; }

void Fft2d::forward(ComplexGrid& grid) {
  if (grid.height() != impl_->height || grid.width() != impl_->width)
    throw ConfigError("fft: grid shape does not match plan");
  impl_->load(grid);
  fftw_execute(impl_->forward);
  impl_->store(grid);
}

void Fft2d::inverse(ComplexGrid& grid) {
  if (grid.height() != impl_->height || grid.width() != impl_->width)
    throw ConfigError("fft: grid shape does not match plan");
  impl_->load(grid);
  fftw_execute(impl_->inverse);
  impl_->store(grid);
  const double scale = 1.0 / double(grid.size());
  for (auto& v : grid) v *= scale;
}

double fft_frequency(std::size_t index, std::size_t n, double pitch) {
  const auto i = static_cast<long long>(index);
  const auto nn = static_cast<long long>(n);
  const long long signed_index = i < (nn + 1) / 2 ? i : i - nn;
  return double(signed_index) / (double(n) * pitch);
}

}  // namespace holo
