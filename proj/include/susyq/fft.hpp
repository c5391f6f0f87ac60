#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <utility>

namespace susyq::detail {

// FFTW's planner is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place complex transform over an FFTW-aligned buffer. Unnormalized in both directions.
///
/// `howmany`/`stride`/`dist` allow batched 1D transforms along either axis of a
/// row-major 2D array; the default is a single contiguous transform of length n.
class FftPlan {
 public:
  FftPlan() = default;

  explicit FftPlan(std::size_t n) : FftPlan(n, 1, 1, static_cast<int>(n), n) {}

  /// `howmany` transforms of length n; element j of transform b sits at b*dist + j*stride.
  FftPlan(std::size_t n, std::size_t howmany, int stride, int dist, std::size_t total) : size_(total) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    int len = static_cast<int>(n);
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), data_, nullptr, stride, dist, data_, nullptr,
                              stride, dist, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), data_, nullptr, stride, dist, data_, nullptr,
                              stride, dist, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept { swap(o); }
  FftPlan& operator=(FftPlan&& o) noexcept {
    FftPlan tmp(std::move(o));
    swap(tmp);
    return *this;
  }

  ~FftPlan() {
    if (data_ == nullptr) return;
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(bwd_);
    }
    fftw_free(data_);
  }

  std::span<std::complex<double>> buffer() {
    return {reinterpret_cast<std::complex<double>*>(data_), size_};
  }

  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  void swap(FftPlan& o) noexcept {
    std::swap(size_, o.size_);
    std::swap(data_, o.data_);
    std::swap(fwd_, o.fwd_);
    std::swap(bwd_, o.bwd_);
  }

  std::size_t size_ = 0;
  fftw_complex* data_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace susyq::detail
