// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Thin FFTW wrapper with a mutex-guarded plan cache. FFTW planning is not
// thread-safe but execution on distinct buffers is, so plans are created
// once per (size, direction) with FFTW_UNALIGNED and reused via
// fftw_execute_dft on caller buffers.

#ifndef STBEM_DETAIL_FFT_HPP
#define STBEM_DETAIL_FFT_HPP

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace stbem::detail {

class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine engine;
    return engine;
  }

  /// In-place transform of n complex samples; sign -1 forward, +1 backward.
  /// Unnormalized (raw FFTW convention); callers apply their own scaling.
  void transform(std::complex<double>* data, int n, int sign) {
    fftw_plan plan = plan_for(n, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

 private:
  FftEngine() = default;

  ~FftEngine() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan plan_for(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()),
        sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void fft_inplace(std::complex<double>* data, int n, int sign) {
  FftEngine::instance().transform(data, n, sign);
}

}  // namespace stbem::detail

#endif  // STBEM_DETAIL_FFT_HPP
