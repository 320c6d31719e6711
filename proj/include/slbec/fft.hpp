#pragma once

#include <vector>

#include "slbec/grid.hpp"

namespace slbec {

// In-place 3D complex DFT on a Grid (FFTW backed). forward() applies
// sum_j f_j exp(-i q.r_j); inverse() applies the conjugate transform and the
// 1/N normalization, so inverse(forward(f)) == f.
class FftPlan {
public:
    explicit FftPlan(const Grid& grid);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    void forward(std::vector<cd>& data) const;
    void inverse(std::vector<cd>& data) const;

    const Grid& grid() const { return grid_; }

private:
    void release();

    Grid grid_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

// Number of threads FFTW uses for plans created after this call.
void set_fft_threads(int threads);

}  // namespace slbec
