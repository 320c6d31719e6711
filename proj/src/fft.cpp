#include "slbec/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

#include "slbec/errors.hpp"

namespace slbec {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::vector<cd>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

FftPlan::FftPlan(const Grid& grid) : grid_(grid) {
    validate_grid(grid);
    std::vector<cd> scratch(grid.size());
    const int n0 = static_cast<int>(grid.dims[0]);
    const int n1 = static_cast<int>(grid.dims[1]);
    const int n2 = static_cast<int>(grid.dims[2]);
    // FFTW_ESTIMATE keeps plans, and therefore results, reproducible run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_3d(n0, n1, n2, as_fftw(scratch), as_fftw(scratch), FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_3d(n0, n1, n2, as_fftw(scratch), as_fftw(scratch), FFTW_BACKWARD, flags);
    if (forward_ == nullptr || backward_ == nullptr) {
        release();
        throw NumericError("FFTW failed to create a plan");
    }
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : grid_(other.grid_), forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
    if (this != &other) {
        release();
        grid_ = other.grid_;
        forward_ = std::exchange(other.forward_, nullptr);
        backward_ = std::exchange(other.backward_, nullptr);
    }
    return *this;
}

void FftPlan::release() {
    std::lock_guard lock(planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
    forward_ = nullptr;
    backward_ = nullptr;
}

void FftPlan::forward(std::vector<cd>& data) const {
    if (data.size() != grid_.size()) throw GridError("FFT input size does not match plan grid");
    fftw_execute_dft(static_cast<fftw_plan>(forward_), as_fftw(data), as_fftw(data));
}

void FftPlan::inverse(std::vector<cd>& data) const {
    if (data.size() != grid_.size()) throw GridError("FFT input size does not match plan grid");
    fftw_execute_dft(static_cast<fftw_plan>(backward_), as_fftw(data), as_fftw(data));
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

void set_fft_threads(int threads) {
    std::lock_guard lock(planner_mutex());
    static const bool initialized = fftw_init_threads() != 0;
    if (!initialized) throw NumericError("FFTW thread support unavailable");
    fftw_plan_with_nthreads(threads < 1 ? 1 : threads);
}

}  // namespace slbec
