#pragma once

#include <span>
#include <vector>

#include "ionspec/models.hpp"

namespace ionspec {

/// Shell-maximum spectrum: shell s collects the modes with round(|k|) = s, s >= 1.
struct ShellSpectrum {
    std::vector<int> shell;
    std::vector<double> k_at_max;       // |k| of the largest-amplitude mode in the shell
    std::vector<double> max_amplitude;  // max |f_k| over the shell
    std::vector<double> energy;         // sum |f_k|^2 over the shell (full lattice)
};

ShellSpectrum shell_spectrum(const SpectralField& f);

struct RadiusFit {
    double tau = 0.0;         // max(0, -slope)
    double r_squared = 0.0;   // clamped to [0, 1]
    int shells_used = 0;
};

/// Least-squares slope of log(shell max |f_k|) against |k| over shells k_min..k_max.
/// Shells whose maximum falls below noise_floor times the largest nonzero-mode amplitude are
/// skipped. Throws ConfigError when the band leaves the dealiased range and
/// InsufficientDataError when fewer than four shells survive.
RadiusFit radius_estimate(const SpectralField& f, int k_min, int k_max, double noise_floor = 1e-14);

/// Uniform radius proxy of a state: the smallest estimate over every species and, for NPE,
/// the vorticity. Fields without enough usable shells (e.g. constants) are skipped.
RadiusFit state_radius_estimate(const SimState& state, int k_min, int k_max,
                                double noise_floor = 1e-14);

struct RadiusRecord {
    double time = 0.0;
    double tau_estimated = 0.0;
    double tau_theory = 0.0;
    double fit_quality = 0.0;
    double gevrey_norm_at_tau = 0.0;
};

/// Lower bound on the NPD radius of analyticity: (1/2) min_i D_i min(t, T0/2).
double npd_radius_bound(double t, std::span<const double> diffusivities, double T0);

/// y = sum_i ||e^{tau Lambda} Lambda^m c_i||^2 (+ ||e^{tau Lambda} Lambda^{m-1} omega||^2 for NPE).
double gevrey_energy(const SimState& state, double tau, double m);

/// Inputs to the NPE growth rate B(t).
struct NpeRateInputs {
    double lam_m1_rho = 0.0;     // ||Lambda^{m-1} rho||
    double lam_m1_u = 0.0;       // ||Lambda^{m-1} u||
    double grad_u_linf = 0.0;    // max over the grid of the Frobenius norm of grad u
    double mean_sq_sum = 0.0;    // sum_i (spatial average of c_i(0))^2
    bool charged = true;         // indicator that the initial concentrations are not all zero
};

/// B = ||L^{m-1} rho|| + ||L^{m-1} rho||^2 + chi (||L^{m-1} u||^2 + 1) + ||grad u||_inf + sum cbar_i(0)^2
double npe_rate(const NpeRateInputs& in);

/// Collects B(t) ingredients from an NPE (or Darcy) state.
NpeRateInputs npe_rate_inputs(const SimState& state, double m, double mean_sq_sum, bool charged);

/// Running evaluation of the NPE radius formula
///   tau(t) = 1 / ( g(t) (1/tau0 + C int_0^t (||Lambda^{m-1} omega|| + Atilde) / g ds) )
/// with g(t) = exp(C int_0^t B ds) (exponential Gronwall factor),
///   A(t) = g(t) (sqrt(y(0)) + C (1 + tau0) int_0^t ||Lambda^{m-1} omega||^2 / g ds),
///   Atilde = A + chi A^2.
/// Integrals use the trapezoid rule on the sample times.
class NpeRadiusBudget {
public:
    NpeRadiusBudget(double tau0, double C_user, double sqrt_y0, bool charged);

    /// Throws DataError unless t is strictly greater than the previous sample time.
    void push(double t, double lam_m1_omega, double B);

    double tau0() const { return tau0_; }
    double C_user() const { return C_; }
    bool charged() const { return charged_; }
    std::size_t size() const { return times_.size(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& B() const { return B_; }
    const std::vector<double>& log_g() const { return log_g_; }
    const std::vector<double>& A() const { return A_; }
    const std::vector<double>& Atilde() const { return Atilde_; }
    const std::vector<double>& tau() const { return tau_; }

private:
    double tau0_;
    double C_;
    double sqrt_y0_;
    bool charged_;

    double int_B_ = 0.0;
    double int_w2_over_g_ = 0.0;
    double int_rate_over_g_ = 0.0;
    double last_w_ = 0.0;

    std::vector<double> times_;
    std::vector<double> B_;
    std::vector<double> log_g_;
    std::vector<double> A_;
    std::vector<double> Atilde_;
    std::vector<double> tau_;
};

struct NpeHistorySample {
    double t;
    double lam_m1_omega;
    double B;
};

/// Batch form: feeds every sample and returns tau(t). Throws ConfigError for tau0 <= 0 or
/// C_user <= 0, DataError for a non-monotone time grid.
std::vector<double> npe_radius_bound(double tau0, double C_user, double sqrt_y0, bool charged,
                                     std::span<const NpeHistorySample> history);

struct T0Calibration {
    double T0 = 0.0;
    /// True when the doubling bound held at every sample, so T0 is only a lower bound
    /// (the run length).
    bool saturated = false;
    double threshold = 0.0;
};

/// Largest sampled T0 such that sum_i ||e^{tau(t) Lambda} Lambda^m c_i(t)||^2 stays within
/// 2 (1 + sum_i ||Lambda^m c_i(0)||^2) for all t <= T0, with tau(t) = (1/2) min D_i t.
T0Calibration calibrate_npd_T0(std::span<const SimState> snapshots, double m);

}  // namespace ionspec
