#include "edlab/detail/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <utility>

namespace edlab::detail {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, std::size_t count, std::size_t stride, std::size_t distance,
                FftDirection direction) {
    const std::lock_guard lock(mutex_);
    const Key key{n, count, stride, distance, direction};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t extent = (count - 1) * distance + (n - 1) * stride + 1;
    auto* buffer = fftw_alloc_complex(extent);
    const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const int length = static_cast<int>(n);
    fftw_plan plan = fftw_plan_many_dft(1, &length, static_cast<int>(count), buffer, nullptr,
                                        static_cast<int>(stride), static_cast<int>(distance), buffer,
                                        nullptr, static_cast<int>(stride), static_cast<int>(distance),
                                        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, FftDirection>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_in_place(std::span<std::complex<double>> data, FftDirection direction) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(data.size(), 1, 1, data.size(), direction);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
}

void fft_batch(std::span<std::complex<double>> data, std::size_t n, std::size_t count,
               std::size_t stride, std::size_t distance, FftDirection direction) {
  if (n == 0 || count == 0) return;
  fftw_plan plan = cache().get(n, count, stride, distance, direction);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
}

void linear_phase(double offset, double step, double scale, std::span<std::complex<double>> out) {
  constexpr std::size_t kAnchor = 32;
  const std::complex<double> z = std::polar(1.0, step);
  std::complex<double> w;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k % kAnchor == 0) {
      w = std::polar(scale, offset + step * static_cast<double>(k));
    } else {
      w *= z;
    }
    out[k] = w;
  }
}

}  // namespace edlab::detail
