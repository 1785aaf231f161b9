#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace eppmzi {

using cplx = std::complex<double>;

enum class FftDirection { Forward, Backward };

namespace detail {

// FFTW's planner is not reentrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(std::vector<cplx>& data, FftDirection dir) {
    std::lock_guard lock(fftw_planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p,
                             dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("FFTW plan creation failed");
  }
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute() { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Unnormalized in-place DFT. Forward uses exp(-2 pi i jk/N), backward exp(+2 pi i jk/N).
inline void fft_inplace(std::vector<cplx>& data, FftDirection dir) {
  if (data.empty()) return;
  // Planning with FFTW_ESTIMATE never touches the array contents.
  detail::FftPlan plan(data, dir);
  plan.execute();
}

inline std::vector<cplx> fft(std::vector<cplx> data, FftDirection dir) {
  fft_inplace(data, dir);
  return data;
}

}  // namespace eppmzi
