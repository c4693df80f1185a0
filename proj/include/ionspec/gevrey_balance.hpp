#pragma once

#include "ionspec/models.hpp"

namespace ionspec {

/// Right-hand side of the Gevrey energy identity at one state, split term by term.
/// G = e^{tau Lambda} Lambda^m acts on concentrations, H = e^{tau Lambda} Lambda^{m-1} on omega,
/// and cd_i = c_i - cbar_i.
struct GevreyBalanceTerms {
    double energy = 0.0;        // E = (1/2)(sum ||G c_i||^2 + ||H omega||^2)
    double dissipation = 0.0;   // -sum D_i ||e^{tau Lambda} Lambda^{m+1} c_i||^2
    double tau_term = 0.0;      // tau' (sum ||e^{tau L} L^{m+1/2} c_i||^2 + ||e^{tau L} L^{m-1/2} omega||^2)
    double advection = 0.0;     // -sum <G(u.grad cd_i), G cd_i>
    double drift = 0.0;         // sum D_i z_i <G div(cd_i grad Phi), G cd_i>
    double mean_drift = 0.0;    // sum D_i z_i cbar_i <G Lap Phi, G cd_i>
    double vort_advection = 0.0;  // -<H(u.grad omega), H omega>
    double vort_forcing = 0.0;    // -<H curl(rho grad Phi), H omega>

    double rhs() const {
        return dissipation + tau_term + advection + drift + mean_drift + vort_advection +
               vort_forcing;
    }
};

/// Requires fresh caches. Products are dealiased exactly as in the model tendencies, so the
/// terms sum to dE/dt of the semi-discrete system.
GevreyBalanceTerms gevrey_balance_terms(const SimState& state, double tau, double m,
                                        double tau_rate = 0.0);

/// |(E_b - E_a)/dt - (rhs_a + rhs_b)/2| / max(|LHS|, |RHS|, eps) for two states of one run,
/// with tau(t_a) = tau and tau(t_b) = tau + tau_rate (t_b - t_a).
/// Throws ConfigError when the states differ in grid or layout or t_b <= t_a.
double gevrey_balance_residual(const SimState& a, const SimState& b, double tau, double m,
                               double tau_rate = 0.0);

}  // namespace ionspec
