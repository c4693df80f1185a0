#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ionspec/spectral_field.hpp"

namespace ionspec {

/// Physical samples -> Fourier coefficients. Throws ConfigError on size mismatch.
SpectralField forward_transform(const GridPtr& grid, std::span<const double> physical);
/// Fourier coefficients -> physical samples on the collocation grid.
std::vector<double> inverse_transform(const SpectralField& field);

/// Lambda^s: multiplies f_k by |k|^s and clears the zero mode.
/// Negative s requires a mean-zero field (DomainError otherwise).
SpectralField frac_laplacian(const SpectralField& f, double s);

/// exp(tau Lambda^s). Zero mode passes through. Throws GevreyOverflowError when
/// tau * |k|^s exceeds log(DBL_MAX) for some lattice mode.
SpectralField gevrey_filter(const SpectralField& f, double tau, double s = 1.0);

/// Solves -Laplace(phi) = rho with mean-zero phi; the zero mode of rho is dropped.
SpectralField solve_poisson(const SpectralField& rho);

enum class GradientKind { grad, perp };

/// grad f = (d1 f, d2 f); perp f = (-d2 f, d1 f). Nyquist modes are dropped.
VectorField gradient(const SpectralField& f, GradientKind kind = GradientKind::grad);
/// d1 v1 + d2 v2
SpectralField divergence(const VectorField& v);
/// perp-divergence d1 v2 - d2 v1 (the scalar vorticity of v).
SpectralField curl(const VectorField& v);

/// Leray-Hodge projection v_k - (v_k . k) k / |k|^2; zero mode dropped.
VectorField leray_project(const VectorField& v);

/// Pseudo-spectral product with 2/3-rule truncation of both operands and result.
SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g);

/// L2 inner product 4 pi^2 sum_k Re(f_k conj(g_k)) over the full lattice.
double inner_product(const SpectralField& f, const SpectralField& g);

struct L2Norm {};
struct LinfNorm {};
struct L4Norm {};
/// (sum (1 + |k|^m)^2 |f_k|^2)^(1/2) with the 4 pi^2 Plancherel factor.
struct SobolevNorm {
    double m;
};
/// ||exp(tau Lambda) Lambda^m f||_{L2}
struct GevreyNorm {
    double tau;
    double m;
};
using NormKind = std::variant<L2Norm, LinfNorm, L4Norm, SobolevNorm, GevreyNorm>;

/// L2, Sobolev and Gevrey norms use Plancherel; Linf and L4 are evaluated on the
/// collocation grid and are therefore grid-dependent.
double norm(const SpectralField& f, const NormKind& kind);

/// Euclidean L2 norm of a vector field.
double norm(const VectorField& v, const NormKind& kind);

}  // namespace ionspec
