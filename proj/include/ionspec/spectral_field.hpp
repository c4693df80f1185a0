#pragma once

#include <span>
#include <vector>

#include "ionspec/spectral_grid.hpp"

namespace ionspec {

/// Real scalar field on the torus held as Fourier coefficients on the half lattice.
class SpectralField {
public:
    SpectralField() = default;
    /// Zero field on grid.
    explicit SpectralField(GridPtr grid);
    SpectralField(GridPtr grid, std::vector<cplx> coeffs);

    static SpectralField from_physical(GridPtr grid, std::span<const double> values);
    std::vector<double> to_physical() const;

    const SpectralGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool valid() const { return static_cast<bool>(grid_); }
    bool same_grid(const SpectralField& other) const;

    std::span<cplx> data() { return coeffs_; }
    std::span<const cplx> data() const { return coeffs_; }

    /// Coefficient f_k for any lattice wavenumber (k2 < 0 resolved by conjugation).
    cplx coeff(int k1, int k2) const;
    /// Sets f_k and f_{-k} = conj(f_k). Self-conjugate modes keep only the real part.
    void set_coeff(int k1, int k2, cplx value);

    cplx mean() const { return coeffs_.front(); }
    double max_abs_coeff() const;
    /// |f_0| <= rel_tol * max |f_k|.
    bool is_mean_zero(double rel_tol = 1e-12) const;

    /// Zeroes every mode outside the 2/3-rule band.
    void apply_dealias();
    /// Restores exact conjugate symmetry on the k2 = 0 and k2 = n/2 columns.
    void enforce_hermitian();
    bool all_finite() const;

    SpectralField& operator+=(const SpectralField& rhs);
    SpectralField& operator-=(const SpectralField& rhs);
    SpectralField& operator*=(double s);
    /// this += s * x
    SpectralField& axpy(double s, const SpectralField& x);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    SpectralField operator-() const { return -1.0 * *this; }

private:
    void require_same_grid(const SpectralField& other, const char* op) const;

    GridPtr grid_;
    std::vector<cplx> coeffs_;
};

struct VectorField {
    SpectralField x;
    SpectralField y;
};

}  // namespace ionspec
