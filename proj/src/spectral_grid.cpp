#include "ionspec/spectral_grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "ionspec/errors.hpp"

namespace ionspec {

namespace {

// The FFTW planner is not thread-safe; plan execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralGrid::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

GridPtr SpectralGrid::create(int n) {
    if (n < 8) {
        throw ConfigError("grid size n must be at least 8, got " + std::to_string(n));
    }
    if (n % 2 != 0) {
        throw ConfigError("n must be even, got " + std::to_string(n));
    }
    static std::mutex cache_mutex;
    static std::map<int, std::weak_ptr<const SpectralGrid>> cache;
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(n); it != cache.end()) {
        if (auto alive = it->second.lock()) return alive;
    }
    GridPtr grid(new SpectralGrid(n));
    cache[n] = grid;
    return grid;
}

SpectralGrid::SpectralGrid(int n) : n_(n), plans_(std::make_unique<Plans>()) {
    std::vector<double> real_buf(physical_size());
    std::vector<cplx> spec_buf(spectral_size());
    auto* r = real_buf.data();
    auto* c = reinterpret_cast<fftw_complex*>(spec_buf.data());
    std::lock_guard lock(planner_mutex());
    plans_->r2c = fftw_plan_dft_r2c_2d(n, n, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_2d(n, n, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->r2c || !plans_->c2r) {
        throw ConfigError("FFTW failed to plan a " + std::to_string(n) + "^2 transform");
    }
}

SpectralGrid::~SpectralGrid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plans_->r2c);
    fftw_destroy_plan(plans_->c2r);
}

double SpectralGrid::spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }

double SpectralGrid::max_wavenumber_magnitude() const noexcept {
    return std::sqrt(2.0) * (n_ / 2);
}

void SpectralGrid::forward(std::span<const double> physical, std::span<cplx> coeffs) const {
    if (physical.size() != physical_size() || coeffs.size() != spectral_size()) {
        throw ConfigError("forward transform: array size does not match the " +
                          std::to_string(n_) + "x" + std::to_string(n_) + " grid");
    }
    // r2c does not modify its input.
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(physical.data()),
                         reinterpret_cast<fftw_complex*>(coeffs.data()));
    const double scale = 1.0 / static_cast<double>(physical_size());
    for (auto& v : coeffs) v *= scale;
}

void SpectralGrid::inverse(std::span<const cplx> coeffs, std::span<double> physical) const {
    if (physical.size() != physical_size() || coeffs.size() != spectral_size()) {
        throw ConfigError("inverse transform: array size does not match the " +
                          std::to_string(n_) + "x" + std::to_string(n_) + " grid");
    }
    // c2r overwrites its input.
    std::vector<cplx> scratch(coeffs.begin(), coeffs.end());
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                         physical.data());
}

}  // namespace ionspec
