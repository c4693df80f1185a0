#include "ionspec/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ionspec/errors.hpp"

namespace ionspec {

SpectralField::SpectralField(GridPtr grid)
    : grid_(std::move(grid)), coeffs_(grid_ ? grid_->spectral_size() : 0) {
    if (!grid_) throw ConfigError("SpectralField requires a grid");
}

SpectralField::SpectralField(GridPtr grid, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (!grid_) throw ConfigError("SpectralField requires a grid");
    if (coeffs_.size() != grid_->spectral_size()) {
        throw ConfigError("coefficient array has " + std::to_string(coeffs_.size()) +
                          " entries, grid expects " + std::to_string(grid_->spectral_size()));
    }
}

SpectralField SpectralField::from_physical(GridPtr grid, std::span<const double> values) {
    SpectralField f(std::move(grid));
    f.grid_->forward(values, f.coeffs_);
    f.enforce_hermitian();
    return f;
}

std::vector<double> SpectralField::to_physical() const {
    std::vector<double> out(grid_->physical_size());
    grid_->inverse(coeffs_, out);
    return out;
}

bool SpectralField::same_grid(const SpectralField& other) const {
    return grid_ && other.grid_ && grid_->n() == other.grid_->n();
}

void SpectralField::require_same_grid(const SpectralField& other, const char* op) const {
    if (!same_grid(other)) {
        throw ConfigError(std::string(op) + ": operands live on different grids");
    }
}

cplx SpectralField::coeff(int k1, int k2) const {
    const auto& g = *grid_;
    const int i1 = g.index_of(k1);
    const int i2 = g.index_of(k2);
    if (i2 < g.half()) return coeffs_[g.flat(i1, i2)];
    return std::conj(coeffs_[g.flat(g.index_of(-k1), g.index_of(-k2))]);
}

void SpectralField::set_coeff(int k1, int k2, cplx value) {
    const auto& g = *grid_;
    int i1 = g.index_of(k1);
    int i2 = g.index_of(k2);
    if (i2 >= g.half()) {
        i1 = g.index_of(-k1);
        i2 = g.index_of(-k2);
        value = std::conj(value);
    }
    const int j1 = g.index_of(-g.wavenumber(i1));
    const bool self_conjugate = (i2 == 0 || i2 == g.n() / 2) && j1 == i1;
    if (self_conjugate) value = {value.real(), 0.0};
    coeffs_[g.flat(i1, i2)] = value;
    if (i2 == 0 || i2 == g.n() / 2) coeffs_[g.flat(j1, i2)] = std::conj(value);
}

double SpectralField::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

bool SpectralField::is_mean_zero(double rel_tol) const {
    return std::abs(mean()) <= rel_tol * max_abs_coeff();
}

void SpectralField::apply_dealias() {
    const auto& g = *grid_;
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (!g.in_dealias_band(k1, k2)) coeffs_[g.flat(i1, i2)] = 0.0;
    });
}

void SpectralField::enforce_hermitian() {
    const auto& g = *grid_;
    const int n = g.n();
    for (int i2 : {0, n / 2}) {
        for (int i1 = 0; i1 <= n / 2; ++i1) {
            const int j1 = (n - i1) % n;
            auto& a = coeffs_[g.flat(i1, i2)];
            auto& b = coeffs_[g.flat(j1, i2)];
            if (j1 == i1) {
                a = {a.real(), 0.0};
            } else {
                const cplx avg = 0.5 * (a + std::conj(b));
                a = avg;
                b = std::conj(avg);
            }
        }
    }
}

bool SpectralField::all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

SpectralField& SpectralField::operator+=(const SpectralField& rhs) {
    require_same_grid(rhs, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& rhs) {
    require_same_grid(rhs, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& x) {
    require_same_grid(x, "axpy");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * x.coeffs_[i];
    return *this;
}

}  // namespace ionspec
