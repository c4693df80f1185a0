#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "ionspec/spectral_field.hpp"

namespace ionspec {

/// One ionic species: valence z (any real, 0 = passive scalar), diffusivity D > 0, concentration c.
/// All quantities are nondimensional.
struct IonSpecies {
    double z = 0.0;
    double D = 1.0;
    SpectralField c;
};

/// Euler fluid, evolved through the vorticity omega = d1 u2 - d2 u1.
struct EulerFluid {
    SpectralField omega;
};

/// Darcy fluid: velocity is slaved to the charge density, no prognostic variable.
struct DarcyFluid {};

using FluidState = std::variant<EulerFluid, DarcyFluid>;

enum class Model { NPE, NPD };
std::string_view model_name(Model m);

/// Derived quantities rebuilt from the species (and vorticity) by SimState::refresh().
struct DerivedFields {
    SpectralField rho;
    SpectralField phi;
    VectorField u;
};

/// Full simulation state: time, species list, fluid and cached (rho, Phi, u).
///
/// The cache carries an explicit freshness flag. Every mutable accessor clears it;
/// reading the cache while stale throws UsageError.
class SimState {
public:
    SimState(GridPtr grid, std::vector<IonSpecies> species, FluidState fluid, double time = 0.0);

    const GridPtr& grid_ptr() const { return grid_; }
    const SpectralGrid& grid() const { return *grid_; }
    Model model() const;

    double time() const { return time_; }
    void set_time(double t) { time_ = t; }
    std::int64_t step_index() const { return step_index_; }
    void set_step_index(std::int64_t s) { step_index_ = s; }

    const std::vector<IonSpecies>& species() const { return species_; }
    std::vector<IonSpecies>& mutable_species();
    const FluidState& fluid() const { return fluid_; }
    FluidState& mutable_fluid();

    /// Vorticity of an Euler state. Throws UsageError for Darcy.
    const SpectralField& omega() const;

    bool fresh() const { return cache_.has_value(); }
    void refresh();
    void invalidate() { cache_.reset(); }

    const SpectralField& rho() const { return derived().rho; }
    const SpectralField& phi() const { return derived().phi; }
    const VectorField& velocity() const { return derived().u; }

private:
    const DerivedFields& derived() const;
    void validate() const;

    GridPtr grid_;
    std::vector<IonSpecies> species_;
    FluidState fluid_;
    double time_ = 0.0;
    std::int64_t step_index_ = 0;
    std::optional<DerivedFields> cache_;
};

/// rho = sum_i z_i c_i. Throws ConfigError on empty input or grid mismatch.
SpectralField charge_density(const std::vector<IonSpecies>& species);

/// Biot-Savart: u = perp-grad psi with Laplace psi = omega. Mean-zero and divergence-free.
VectorField velocity_from_vorticity(const SpectralField& omega);

/// u = -P(rho grad Phi), products dealiased.
VectorField darcy_velocity(const SpectralField& rho, const SpectralField& phi);

/// Integral of rho grad Phi over the torus by collocation quadrature.
std::array<double, 2> electric_force_mean(const SpectralField& rho);

/// Explicit (non-diffusive) part of the right-hand sides. Computed in divergence
/// form so the zero mode of every species tendency is exactly zero.
struct NonlinearTerms {
    std::vector<SpectralField> species;    // -u.grad c_i + D_i z_i div(c_i grad Phi)
    std::optional<SpectralField> omega;    // -u.grad omega - perp-grad rho . grad Phi (Euler only)
};

/// Requires fresh caches.
NonlinearTerms nonlinear_terms(const SimState& state);

/// Full Nernst-Planck right-hand side d/dt c_i = -u.grad c_i + D_i Lap c_i + D_i z_i div(c_i grad Phi).
std::vector<SpectralField> np_tendency(const SimState& state);

/// d/dt omega = -u.grad omega - perp-grad rho . grad Phi. Throws UsageError on a Darcy state.
SpectralField vorticity_tendency(const SimState& state);

/// Unforced 2D Euler: -u.grad omega with u recovered from omega. This is the vorticity
/// core shared with vorticity_tendency; the charge forcing is added separately.
SpectralField euler_advection(const SpectralField& omega, const VectorField& u);

}  // namespace ionspec
