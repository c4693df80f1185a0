#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ionspec/models.hpp"

namespace ionspec {

/// Integrating-factor Runge-Kutta schemes (Lawson form). The diffusion D_i Lap c_i is
/// integrated exactly through exp(-D_i |k|^2 dt); everything else is explicit.
enum class Scheme { IF_RK2, IF_RK4 };

int scheme_order(Scheme s);
std::string_view scheme_name(Scheme s);
/// "IF-RK2" / "IF-RK4"; throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);

struct StepperConfig {
    Scheme scheme = Scheme::IF_RK4;
    /// Fixed step, or the upper bound of the adaptive step.
    double dt = 1e-2;
    bool adaptive = false;
    double cfl = 0.5;
    double t_end = 1.0;
    /// Clamp physical values below -positivity_tol and restore the mass. Off by default.
    bool positivity_clip = false;
    double positivity_tol = 1e-8;
    /// Drop every explicit term (pure diffusion); used for integrating-factor checks.
    bool linear_only = false;
};

/// Advances by dt. Throws DivergenceError (with the step index) on non-finite coefficients,
/// ConfigError on a non-positive or non-finite dt. The result has fresh caches.
SimState step(const SimState& state, const StepperConfig& cfg, double dt);
/// Advances by cfg.dt, or by adaptive_dt() when cfg.adaptive is set.
SimState step(const SimState& state, const StepperConfig& cfg);

/// cfl * h / max(|u|, max_i D_i |z_i| |grad Phi|) with h = 2 pi / n, capped at cfg.dt.
/// Returns cfg.dt when every transport speed vanishes.
double adaptive_dt(const SimState& state, const StepperConfig& cfg);

/// Unforced 2D Euler step using the same vorticity core as the NPE system, with no
/// charge terms in the call path.
SpectralField euler_step(const SpectralField& omega, Scheme scheme, double dt);

struct StepRecord {
    std::int64_t index;
    double time;
    double dt;
};

struct Trajectory {
    std::vector<double> times;          // snapshot times, strictly increasing
    std::vector<SimState> snapshots;    // empty when RunOptions::keep_snapshots is false
    std::vector<StepRecord> steps;
    bool diverged = false;
    std::int64_t failed_step = -1;
    std::string error;
};

/// Called with fresh state at step 0, every `cadence` steps, and at the final step.
using StepHook = std::function<void(const SimState&)>;

struct RunOptions {
    int cadence = 1;
    bool keep_snapshots = true;
};

/// Integrates to cfg.t_end (the last step is shortened to land on it). A divergence stops
/// the run and is reported through Trajectory::diverged; earlier output is kept.
Trajectory run(const SimState& initial, const StepperConfig& cfg,
               const std::vector<StepHook>& hooks, const RunOptions& options = {});

}  // namespace ionspec
