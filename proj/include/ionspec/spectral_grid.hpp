#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <span>

namespace ionspec {

using cplx = std::complex<double>;

class SpectralGrid;
using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Collocation grid on the torus [0, 2pi]^2 with n points per dimension.
///
/// Physical samples are stored row-major: value(j1, j2) = f(2 pi j1 / n, 2 pi j2 / n)
/// lives at j1 * n + j2. Fourier coefficients use the real-to-complex half layout:
/// index (i1, i2) with i1 in [0, n) and i2 in [0, n/2], flattened as i1 * (n/2 + 1) + i2.
/// Index i maps to wavenumber i for i <= n/2 and i - n otherwise, so the lattice is
/// {-n/2 + 1, ..., n/2}^2. Modes with k2 < 0 are implied by Hermitian symmetry.
///
/// Coefficients are true Fourier-series coefficients: the forward transform divides by n^2.
class SpectralGrid {
public:
    /// Shared instance for size n. Throws ConfigError unless n is even and n >= 8.
    static GridPtr create(int n);

    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int n() const noexcept { return n_; }
    int half() const noexcept { return n_ / 2 + 1; }
    std::size_t physical_size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    std::size_t spectral_size() const noexcept { return static_cast<std::size_t>(n_) * half(); }
    double spacing() const noexcept;

    int wavenumber(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }
    int index_of(int k) const noexcept { return ((k % n_) + n_) % n_; }
    std::size_t flat(int i1, int i2) const noexcept {
        return static_cast<std::size_t>(i1) * half() + i2;
    }

    /// 2/3-rule band: 3|k1| < n and 3|k2| < n.
    bool in_dealias_band(int k1, int k2) const noexcept {
        return 3 * std::abs(k1) < n_ && 3 * std::abs(k2) < n_;
    }
    /// Largest |k_i| kept by the dealiasing mask.
    int dealias_cutoff() const noexcept { return (n_ - 1) / 3; }

    /// Largest |k| = sqrt(k1^2 + k2^2) on the lattice.
    double max_wavenumber_magnitude() const noexcept;

    void forward(std::span<const double> physical, std::span<cplx> coeffs) const;
    void inverse(std::span<const cplx> coeffs, std::span<double> physical) const;

    /// Pair-count of stored index (i1, i2) in a full-lattice sum.
    double lattice_weight(int i2) const noexcept {
        return (i2 == 0 || i2 == n_ / 2) ? 1.0 : 2.0;
    }

private:
    explicit SpectralGrid(int n);

    int n_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

/// Calls fn(i1, i2, k1, k2) over every stored half-spectrum entry.
template <class Fn>
void for_each_stored_mode(const SpectralGrid& grid, Fn&& fn) {
    const int n = grid.n();
    const int h = grid.half();
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = grid.wavenumber(i1);
        for (int i2 = 0; i2 < h; ++i2) {
            fn(i1, i2, k1, grid.wavenumber(i2));
        }
    }
}

}  // namespace ionspec
