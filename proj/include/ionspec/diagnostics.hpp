#pragma once

#include <array>
#include <vector>

#include "ionspec/models.hpp"

namespace ionspec {

struct NormSet {
    double l2 = 0.0;
    double l4 = 0.0;
    double linf = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double hm = 0.0;  // H^m with m = InvariantReport::hm_order
};

NormSet norm_set(const SpectralField& f, double hm_order);

/// Per-time measurements of the conserved and bounded quantities.
struct InvariantReport {
    double time = 0.0;
    std::vector<double> mass_per_species;                // integral of c_i = 4 pi^2 Re c_i,0
    std::array<double, 2> mean_velocity{};               // zero mode of u
    std::array<double, 2> force_mean{};                  // integral of rho grad Phi
    std::vector<double> min_concentration_per_species;   // collocation-grid minimum
    std::vector<double> max_concentration_per_species;
    std::vector<NormSet> species_norms;
    NormSet vorticity_norms;                             // omega, or curl u for Darcy
    double dissipation = 0.0;                            // sum_i D_i int_0^t ||grad c_i||^2 ds
    double hm_order = 3.0;
};

/// Running state for the trapezoid quadrature of the dissipation integral.
class InvariantAccumulator {
public:
    explicit InvariantAccumulator(double hm_order = 3.0) : hm_order_(hm_order) {}

    double hm_order() const { return hm_order_; }
    /// Adds the trapezoid panel ending at (t, rate). Throws DataError unless t increases.
    double advance(double t, double rate);

private:
    double hm_order_;
    bool started_ = false;
    double last_time_ = 0.0;
    double last_rate_ = 0.0;
    double total_ = 0.0;
};

/// sum_i D_i ||grad c_i||_{L2}^2
double dissipation_rate(const SimState& state);

/// Requires fresh caches.
InvariantReport invariant_report(const SimState& state, InvariantAccumulator& running);

}  // namespace ionspec
