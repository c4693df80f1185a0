#include "ionspec/gevrey_balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

/// 4 pi^2 sum_k e^{2 tau |k|} |k|^{2s} Re(f_k conj g_k); zero mode excluded.
double weighted_inner(const SpectralField& f, const SpectralField& g, double tau, double s) {
    const auto& grid = f.grid();
    const double guard = std::log(std::numeric_limits<double>::max());
    if (tau * grid.max_wavenumber_magnitude() > guard) {
        throw GevreyOverflowError(grid.n() / 2, grid.n() / 2,
                                  "Gevrey weight overflows at tau = " + std::to_string(tau));
    }
    auto a = f.data();
    auto b = g.data();
    double sum = 0.0;
    for_each_stored_mode(grid, [&](int i1, int i2, int k1, int k2) {
        if (k1 == 0 && k2 == 0) return;
        const double mag = std::hypot(static_cast<double>(k1), k2);
        const double w = std::exp(2.0 * tau * mag) * std::pow(mag, 2.0 * s);
        const auto idx = grid.flat(i1, i2);
        sum += grid.lattice_weight(i2) * w * (a[idx] * std::conj(b[idx])).real();
    });
    return kFourPiSq * sum;
}

double weighted_sq(const SpectralField& f, double tau, double s) {
    return weighted_inner(f, f, tau, s);
}

SpectralField dealiased_divergence_of_product(const SpectralField& a, const VectorField& v) {
    return divergence({multiply_dealiased(a, v.x), multiply_dealiased(a, v.y)});
}

}  // namespace

GevreyBalanceTerms gevrey_balance_terms(const SimState& state, double tau, double m,
                                        double tau_rate) {
    GevreyBalanceTerms t;
    const auto& u = state.velocity();
    const auto grad_phi = gradient(state.phi());
    SpectralField lap_phi = divergence(grad_phi);
    lap_phi.apply_dealias();

    for (const auto& sp : state.species()) {
        SpectralField cd = sp.c;
        cd.set_coeff(0, 0, 0.0);
        t.energy += 0.5 * weighted_sq(sp.c, tau, m);
        t.dissipation -= sp.D * weighted_sq(sp.c, tau, m + 1.0);
        t.tau_term += tau_rate * weighted_sq(sp.c, tau, m + 0.5);
        // u is divergence-free, so u.grad cd = div(u cd)
        t.advection -= weighted_inner(dealiased_divergence_of_product(cd, u), cd, tau, m);
        t.drift += sp.D * sp.z *
                   weighted_inner(dealiased_divergence_of_product(cd, grad_phi), cd, tau, m);
        t.mean_drift += sp.D * sp.z * sp.c.mean().real() * weighted_inner(lap_phi, cd, tau, m);
    }

    if (state.model() == Model::NPE) {
        const auto& w = state.omega();
        t.energy += 0.5 * weighted_sq(w, tau, m - 1.0);
        t.tau_term += tau_rate * weighted_sq(w, tau, m - 0.5);
        t.vort_advection -= weighted_inner(dealiased_divergence_of_product(w, u), w, tau, m - 1.0);
        const auto force = curl({multiply_dealiased(state.rho(), grad_phi.x),
                                 multiply_dealiased(state.rho(), grad_phi.y)});
        t.vort_forcing -= weighted_inner(force, w, tau, m - 1.0);
    }
    return t;
}

double gevrey_balance_residual(const SimState& a, const SimState& b, double tau, double m,
                               double tau_rate) {
    if (a.grid().n() != b.grid().n() || a.species().size() != b.species().size() ||
        a.model() != b.model()) {
        throw ConfigError("gevrey_balance_residual: states do not share grid and layout");
    }
    const double dt = b.time() - a.time();
    if (!(dt > 0.0)) throw ConfigError("gevrey_balance_residual: states must be ordered in time");

    auto fresh = [](const SimState& s) {
        if (s.fresh()) return s;
        SimState copy = s;
        copy.refresh();
        return copy;
    };
    const auto ta = gevrey_balance_terms(fresh(a), tau, m, tau_rate);
    const auto tb = gevrey_balance_terms(fresh(b), tau + tau_rate * dt, m, tau_rate);
    const double lhs = (tb.energy - ta.energy) / dt;
    const double rhs = 0.5 * (ta.rhs() + tb.rhs());
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    if (lhs == 0.0 && rhs == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

}  // namespace ionspec
