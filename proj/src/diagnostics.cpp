#include "ionspec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

NormSet norm_set(const SpectralField& f, double hm_order) {
    NormSet s;
    s.l2 = norm(f, L2Norm{});
    s.l4 = norm(f, L4Norm{});
    s.linf = norm(f, LinfNorm{});
    s.h1 = norm(f, SobolevNorm{1.0});
    s.h2 = norm(f, SobolevNorm{2.0});
    s.hm = norm(f, SobolevNorm{hm_order});
    return s;
}

double InvariantAccumulator::advance(double t, double rate) {
    if (started_) {
        if (!(t > last_time_)) {
            throw DataError("invariant reports must have strictly increasing times");
        }
        total_ += 0.5 * (rate + last_rate_) * (t - last_time_);
    }
    started_ = true;
    last_time_ = t;
    last_rate_ = rate;
    return total_;
}

double dissipation_rate(const SimState& state) {
    double rate = 0.0;
    for (const auto& sp : state.species()) {
        const double g = norm(sp.c, GevreyNorm{0.0, 1.0});
        rate += sp.D * g * g;
    }
    return rate;
}

InvariantReport invariant_report(const SimState& state, InvariantAccumulator& running) {
    constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
    InvariantReport r;
    r.time = state.time();
    r.hm_order = running.hm_order();
    for (const auto& sp : state.species()) {
        r.mass_per_species.push_back(kFourPiSq * sp.c.mean().real());
        const auto p = sp.c.to_physical();
        const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
        r.min_concentration_per_species.push_back(*lo);
        r.max_concentration_per_species.push_back(*hi);
        r.species_norms.push_back(norm_set(sp.c, r.hm_order));
    }
    const auto& u = state.velocity();
    r.mean_velocity = {u.x.mean().real(), u.y.mean().real()};
    r.force_mean = electric_force_mean(state.rho());
    const SpectralField omega = state.model() == Model::NPE ? state.omega() : curl(u);
    r.vorticity_norms = norm_set(omega, r.hm_order);
    r.dissipation = running.advance(state.time(), dissipation_rate(state));
    return r;
}

}  // namespace ionspec
