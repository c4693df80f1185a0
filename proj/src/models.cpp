#include "ionspec/models.hpp"

#include <string>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

namespace {

std::vector<double> band_limited_physical(const SpectralField& f) {
    SpectralField tmp = f;
    tmp.apply_dealias();
    return tmp.to_physical();
}

SpectralField dealiased_from_physical(const GridPtr& grid, const std::vector<double>& values) {
    auto out = SpectralField::from_physical(grid, values);
    out.apply_dealias();
    return out;
}

/// Divergence of the dealiased flux (a * fx, a * fy), all arguments physical.
SpectralField flux_divergence(const GridPtr& grid, const std::vector<double>& a,
                              const std::vector<double>& fx, const std::vector<double>& fy) {
    std::vector<double> px(a.size());
    std::vector<double> py(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        px[i] = a[i] * fx[i];
        py[i] = a[i] * fy[i];
    }
    return divergence({dealiased_from_physical(grid, px), dealiased_from_physical(grid, py)});
}

}  // namespace

std::string_view model_name(Model m) { return m == Model::NPE ? "NPE" : "NPD"; }

SimState::SimState(GridPtr grid, std::vector<IonSpecies> species, FluidState fluid, double time)
    : grid_(std::move(grid)), species_(std::move(species)), fluid_(std::move(fluid)), time_(time) {
    validate();
}

void SimState::validate() const {
    if (!grid_) throw ConfigError("SimState requires a grid");
    if (species_.empty()) throw ConfigError("SimState requires at least one species");
    for (std::size_t i = 0; i < species_.size(); ++i) {
        const auto& s = species_[i];
        if (!(s.D > 0.0)) {
            throw ConfigError("species[" + std::to_string(i) + "].D must be positive");
        }
        if (!s.c.valid() || s.c.grid().n() != grid_->n()) {
            throw ConfigError("species[" + std::to_string(i) + "] is not on the state grid");
        }
    }
    if (const auto* e = std::get_if<EulerFluid>(&fluid_)) {
        if (!e->omega.valid() || e->omega.grid().n() != grid_->n()) {
            throw ConfigError("vorticity is not on the state grid");
        }
    }
}

Model SimState::model() const {
    return std::holds_alternative<EulerFluid>(fluid_) ? Model::NPE : Model::NPD;
}

std::vector<IonSpecies>& SimState::mutable_species() {
    invalidate();
    return species_;
}

FluidState& SimState::mutable_fluid() {
    invalidate();
    return fluid_;
}

const SpectralField& SimState::omega() const {
    if (const auto* e = std::get_if<EulerFluid>(&fluid_)) return e->omega;
    throw UsageError("vorticity requested from a Darcy state");
}

void SimState::refresh() {
    validate();
    DerivedFields d;
    d.rho = charge_density(species_);
    d.phi = solve_poisson(d.rho);
    if (const auto* e = std::get_if<EulerFluid>(&fluid_)) {
        d.u = velocity_from_vorticity(e->omega);
    } else {
        d.u = darcy_velocity(d.rho, d.phi);
    }
    cache_ = std::move(d);
}

const DerivedFields& SimState::derived() const {
    if (!cache_) throw UsageError("derived fields (rho, Phi, u) are stale; call refresh()");
    return *cache_;
}

SpectralField charge_density(const std::vector<IonSpecies>& species) {
    if (species.empty()) throw ConfigError("charge_density: empty species list");
    SpectralField rho(species.front().c.grid_ptr());
    for (std::size_t i = 0; i < species.size(); ++i) {
        if (!species[i].c.same_grid(rho)) {
            throw ConfigError("charge_density: species[" + std::to_string(i) +
                              "] lives on a different grid");
        }
        rho.axpy(species[i].z, species[i].c);
    }
    return rho;
}

VectorField velocity_from_vorticity(const SpectralField& omega) {
    // Laplace psi = omega  <=>  psi = -solve_poisson(omega)
    return gradient(-1.0 * solve_poisson(omega), GradientKind::perp);
}

VectorField darcy_velocity(const SpectralField& rho, const SpectralField& phi) {
    const auto grad_phi = gradient(phi);
    VectorField force{multiply_dealiased(rho, grad_phi.x), multiply_dealiased(rho, grad_phi.y)};
    auto u = leray_project(force);
    u.x *= -1.0;
    u.y *= -1.0;
    return u;
}

std::array<double, 2> electric_force_mean(const SpectralField& rho) {
    const auto grad_phi = gradient(solve_poisson(rho));
    const auto r = rho.to_physical();
    const auto gx = grad_phi.x.to_physical();
    const auto gy = grad_phi.y.to_physical();
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        sx += r[i] * gx[i];
        sy += r[i] * gy[i];
    }
    const double h = rho.grid().spacing();
    return {sx * h * h, sy * h * h};
}

SpectralField euler_advection(const SpectralField& omega, const VectorField& u) {
    const auto w = band_limited_physical(omega);
    const auto ux = band_limited_physical(u.x);
    const auto uy = band_limited_physical(u.y);
    return -1.0 * flux_divergence(omega.grid_ptr(), w, ux, uy);
}

NonlinearTerms nonlinear_terms(const SimState& state) {
    const auto& grid = state.grid_ptr();
    const auto& u = state.velocity();
    const auto grad_phi = gradient(state.phi());
    const auto ux = band_limited_physical(u.x);
    const auto uy = band_limited_physical(u.y);
    const auto ex = band_limited_physical(grad_phi.x);
    const auto ey = band_limited_physical(grad_phi.y);

    NonlinearTerms out;
    out.species.reserve(state.species().size());
    std::vector<double> vx(ux.size());
    std::vector<double> vy(ux.size());
    for (const auto& sp : state.species()) {
        // div(c (D z grad Phi - u)) = -u.grad c + D z div(c grad Phi) since div u = 0
        const double drift = sp.D * sp.z;
        for (std::size_t i = 0; i < ux.size(); ++i) {
            vx[i] = drift * ex[i] - ux[i];
            vy[i] = drift * ey[i] - uy[i];
        }
        out.species.push_back(flux_divergence(grid, band_limited_physical(sp.c), vx, vy));
    }

    if (state.model() == Model::NPE) {
        auto w = euler_advection(state.omega(), u);
        // -perp-grad rho . grad Phi = -curl(rho grad Phi)
        const auto r = band_limited_physical(state.rho());
        std::vector<double> fx(r.size());
        std::vector<double> fy(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            fx[i] = r[i] * ex[i];
            fy[i] = r[i] * ey[i];
        }
        w -= curl({dealiased_from_physical(grid, fx), dealiased_from_physical(grid, fy)});
        out.omega = std::move(w);
    }
    return out;
}

std::vector<SpectralField> np_tendency(const SimState& state) {
    auto terms = nonlinear_terms(state);
    for (std::size_t i = 0; i < terms.species.size(); ++i) {
        const auto& sp = state.species()[i];
        terms.species[i].axpy(-sp.D, frac_laplacian(sp.c, 2.0));
    }
    return std::move(terms.species);
}

SpectralField vorticity_tendency(const SimState& state) {
    if (state.model() != Model::NPE) {
        throw UsageError("vorticity_tendency called on a Darcy state");
    }
    return std::move(*nonlinear_terms(state).omega);
}

}  // namespace ionspec
