#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <vector>

namespace specdpc::fft {

enum class Direction { forward, backward };

namespace detail {
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Unnormalized DFT. forward: sum x_m e^{-2 pi i k m / n}; backward uses e^{+...}.
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in,
                                             Direction dir) {
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.begin(), in.end());
    if (n <= 1) return out;
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        // Only plan creation and destruction are not thread-safe in FFTW.
        std::lock_guard lock(detail::planner_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace specdpc::fft
