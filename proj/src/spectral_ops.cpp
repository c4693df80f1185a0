#include "ionspec/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ionspec/errors.hpp"

namespace ionspec {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

double magnitude(int k1, int k2) { return std::hypot(static_cast<double>(k1), k2); }

bool is_nyquist(const SpectralGrid& g, int k1, int k2) {
    return k1 == g.n() / 2 || k2 == g.n() / 2;
}

void check_gevrey_exponent(const SpectralGrid& g, double tau, double s) {
    if (!(tau >= 0.0)) throw DomainError("Gevrey tau must be nonnegative");
    const double limit = std::log(std::numeric_limits<double>::max());
    const double kmax = g.max_wavenumber_magnitude();
    if (tau * std::pow(kmax, s) > limit) {
        const int k = g.n() / 2;
        throw GevreyOverflowError(
            k, k,
            "exp(tau |k|^s) overflows at mode (" + std::to_string(k) + ", " + std::to_string(k) +
                "): tau = " + std::to_string(tau) + ", s = " + std::to_string(s));
    }
}

template <class Symbol>
SpectralField apply_multiplier(const SpectralField& f, Symbol&& symbol) {
    SpectralField out(f.grid_ptr());
    const auto& g = f.grid();
    auto in = f.data();
    auto dst = out.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        const auto idx = g.flat(i1, i2);
        dst[idx] = symbol(k1, k2) * in[idx];
    });
    return out;
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* op) {
    if (!a.same_grid(b)) throw ConfigError(std::string(op) + ": operands live on different grids");
}

}  // namespace

SpectralField forward_transform(const GridPtr& grid, std::span<const double> physical) {
    return SpectralField::from_physical(grid, physical);
}

std::vector<double> inverse_transform(const SpectralField& field) { return field.to_physical(); }

SpectralField frac_laplacian(const SpectralField& f, double s) {
    if (s < 0.0 && !f.is_mean_zero()) {
        throw DomainError("Lambda^s with s < 0 requires a mean-zero field");
    }
    return apply_multiplier(f, [s](int k1, int k2) {
        if (k1 == 0 && k2 == 0) return 0.0;
        return std::pow(magnitude(k1, k2), s);
    });
}

SpectralField gevrey_filter(const SpectralField& f, double tau, double s) {
    check_gevrey_exponent(f.grid(), tau, s);
    return apply_multiplier(f, [tau, s](int k1, int k2) {
        if (k1 == 0 && k2 == 0) return 1.0;
        return std::exp(tau * std::pow(magnitude(k1, k2), s));
    });
}

SpectralField solve_poisson(const SpectralField& rho) {
    return apply_multiplier(rho, [](int k1, int k2) {
        if (k1 == 0 && k2 == 0) return 0.0;
        return 1.0 / static_cast<double>(k1 * k1 + k2 * k2);
    });
}

VectorField gradient(const SpectralField& f, GradientKind kind) {
    const auto& g = f.grid();
    SpectralField d1(f.grid_ptr());
    SpectralField d2(f.grid_ptr());
    auto in = f.data();
    auto o1 = d1.data();
    auto o2 = d2.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (is_nyquist(g, k1, k2)) return;
        const auto idx = g.flat(i1, i2);
        o1[idx] = cplx(0.0, k1) * in[idx];
        o2[idx] = cplx(0.0, k2) * in[idx];
    });
    if (kind == GradientKind::grad) return {std::move(d1), std::move(d2)};
    d2 *= -1.0;
    return {std::move(d2), std::move(d1)};
}

SpectralField divergence(const VectorField& v) {
    require_same_grid(v.x, v.y, "divergence");
    const auto& g = v.x.grid();
    SpectralField out(v.x.grid_ptr());
    auto vx = v.x.data();
    auto vy = v.y.data();
    auto dst = out.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (is_nyquist(g, k1, k2)) return;
        const auto idx = g.flat(i1, i2);
        dst[idx] = cplx(0.0, k1) * vx[idx] + cplx(0.0, k2) * vy[idx];
    });
    return out;
}

SpectralField curl(const VectorField& v) {
    require_same_grid(v.x, v.y, "curl");
    const auto& g = v.x.grid();
    SpectralField out(v.x.grid_ptr());
    auto vx = v.x.data();
    auto vy = v.y.data();
    auto dst = out.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (is_nyquist(g, k1, k2)) return;
        const auto idx = g.flat(i1, i2);
        dst[idx] = cplx(0.0, k1) * vy[idx] - cplx(0.0, k2) * vx[idx];
    });
    return out;
}

VectorField leray_project(const VectorField& v) {
    require_same_grid(v.x, v.y, "leray_project");
    const auto& g = v.x.grid();
    VectorField out{SpectralField(v.x.grid_ptr()), SpectralField(v.x.grid_ptr())};
    auto vx = v.x.data();
    auto vy = v.y.data();
    auto ox = out.x.data();
    auto oy = out.y.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (k1 == 0 && k2 == 0) return;
        const auto idx = g.flat(i1, i2);
        const double kk = static_cast<double>(k1 * k1 + k2 * k2);
        const cplx dot = static_cast<double>(k1) * vx[idx] + static_cast<double>(k2) * vy[idx];
        ox[idx] = vx[idx] - dot * (k1 / kk);
        oy[idx] = vy[idx] - dot * (k2 / kk);
    });
    return out;
}

SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g, "multiply_dealiased");
    SpectralField a = f;
    SpectralField b = g;
    a.apply_dealias();
    b.apply_dealias();
    auto pa = a.to_physical();
    const auto pb = b.to_physical();
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    auto out = SpectralField::from_physical(f.grid_ptr(), pa);
    out.apply_dealias();
    return out;
}

double inner_product(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g, "inner_product");
    const auto& grid = f.grid();
    auto a = f.data();
    auto b = g.data();
    double sum = 0.0;
    for_each_stored_mode(grid, [&](int i1, int i2, int, int) {
        const auto idx = grid.flat(i1, i2);
        sum += grid.lattice_weight(i2) * (a[idx] * std::conj(b[idx])).real();
    });
    return kFourPiSq * sum;
}

namespace {

template <class Weight>
double weighted_l2(const SpectralField& f, Weight&& weight) {
    const auto& g = f.grid();
    auto c = f.data();
    double sum = 0.0;
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        const double w = weight(k1, k2);
        if (w == 0.0) return;
        const double term = w * std::abs(c[g.flat(i1, i2)]);
        sum += g.lattice_weight(i2) * term * term;
    });
    return std::sqrt(kFourPiSq * sum);
}

double grid_quadrature_weight(const SpectralGrid& g) {
    const double h = g.spacing();
    return h * h;
}

}  // namespace

double norm(const SpectralField& f, const NormKind& kind) {
    return std::visit(
        [&f](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, L2Norm>) {
                return weighted_l2(f, [](int, int) { return 1.0; });
            } else if constexpr (std::is_same_v<K, LinfNorm>) {
                const auto p = f.to_physical();
                double m = 0.0;
                for (double v : p) m = std::max(m, std::abs(v));
                return m;
            } else if constexpr (std::is_same_v<K, L4Norm>) {
                const auto p = f.to_physical();
                double s = 0.0;
                for (double v : p) s += (v * v) * (v * v);
                return std::pow(s * grid_quadrature_weight(f.grid()), 0.25);
            } else if constexpr (std::is_same_v<K, SobolevNorm>) {
                const double m = k.m;
                return weighted_l2(f, [m](int k1, int k2) {
                    return 1.0 + ((k1 == 0 && k2 == 0) ? 0.0 : std::pow(magnitude(k1, k2), m));
                });
            } else {
                check_gevrey_exponent(f.grid(), k.tau, 1.0);
                const double tau = k.tau;
                const double m = k.m;
                return weighted_l2(f, [tau, m](int k1, int k2) {
                    if (k1 == 0 && k2 == 0) return 0.0;
                    const double mag = magnitude(k1, k2);
                    return std::exp(tau * mag) * std::pow(mag, m);
                });
            }
        },
        kind);
}

double norm(const VectorField& v, const NormKind& kind) {
    require_same_grid(v.x, v.y, "norm");
    if (std::holds_alternative<LinfNorm>(kind) || std::holds_alternative<L4Norm>(kind)) {
        const auto px = v.x.to_physical();
        const auto py = v.y.to_physical();
        double acc = 0.0;
        const bool linf = std::holds_alternative<LinfNorm>(kind);
        for (std::size_t i = 0; i < px.size(); ++i) {
            const double m2 = px[i] * px[i] + py[i] * py[i];
            acc = linf ? std::max(acc, m2) : acc + m2 * m2;
        }
        if (linf) return std::sqrt(acc);
        return std::pow(acc * grid_quadrature_weight(v.x.grid()), 0.25);
    }
    return std::hypot(norm(v.x, kind), norm(v.y, kind));
}

}  // namespace ionspec
