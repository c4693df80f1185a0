#pragma once

#include <span>
#include <string>
#include <vector>

#include "ionspec/models.hpp"
#include "ionspec/radius.hpp"

namespace ionspec {

/// Norms entering the NPD Sobolev ledger, sampled along a run.
struct NpdLedgerSample {
    double t = 0.0;
    double grad_rho_sq = 0.0;       // ||grad rho||^2
    double lap_c_sq_sum = 0.0;      // sum_i ||Lap c_i||^2
    double l4_sq_sum = 0.0;         // sum_i ||c_i||_{L4}^2
    double lam_m_c_sq_sum = 0.0;    // sum_i ||Lambda^m c_i||^2
};

NpdLedgerSample npd_ledger_sample(const SimState& state, double m);

/// Observed left side, bound right side and margin = bound - observed of a Gronwall-type
/// estimate along a run. Negative margins are flagged, not treated as errors.
struct GronwallReport {
    std::string kind;
    double C_user = 1.0;
    std::vector<double> times;
    std::vector<double> exponent;   // L(t) for NPD, log g(t) for NPE
    std::vector<double> bound;
    std::vector<double> observed;
    std::vector<double> margin;
    bool any_negative = false;
};

/// L(t) = C (sup_{s<=t} ||grad rho||^2)(sum_i int ||Lap c_i||^2) + int ||grad rho||^2
///        + sum_i int ||c_i||_{L4}^2
/// with trapezoid quadrature on the sample times, and the bound e^{L(t)} sum_i ||Lambda^m c_i(0)||^2.
/// Throws DataError for non-increasing times.
std::vector<double> npd_ledger_exponent(std::span<const NpdLedgerSample> samples, double C_user);
GronwallReport npd_gronwall_ledger(std::span<const NpdLedgerSample> samples, double C_user);

/// Compares sqrt(y(t)) (Gevrey energy at the budget's tau(t)) with A(t).
/// `sqrt_y` must be sampled on the budget's time grid.
GronwallReport npe_gronwall_ledger(const NpeRadiusBudget& budget, std::span<const double> sqrt_y);

}  // namespace ionspec
