#include "ionspec/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

namespace {

using FieldList = std::vector<SpectralField>;

/// exp(-D |k|^2 h) per stored mode.
std::vector<double> diffusion_factor(const SpectralGrid& g, double D, double h) {
    std::vector<double> f(g.spectral_size(), 1.0);
    if (D == 0.0) return f;
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        f[g.flat(i1, i2)] = std::exp(-D * static_cast<double>(k1 * k1 + k2 * k2) * h);
    });
    return f;
}

class IntegratingFactor {
public:
    IntegratingFactor(const SpectralGrid& g, const std::vector<double>& diffusivities, double h) {
        for (double D : diffusivities) {
            full_.push_back(diffusion_factor(g, D, h));
            half_.push_back(diffusion_factor(g, D, 0.5 * h));
        }
    }

    FieldList full(FieldList y) const { return apply(std::move(y), full_); }
    FieldList half(FieldList y) const { return apply(std::move(y), half_); }

private:
    static FieldList apply(FieldList y, const std::vector<std::vector<double>>& factors) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            auto d = y[i].data();
            const auto& f = factors[i];
            for (std::size_t j = 0; j < d.size(); ++j) d[j] *= f[j];
        }
        return y;
    }

    std::vector<std::vector<double>> full_;
    std::vector<std::vector<double>> half_;
};

FieldList axpy(FieldList y, double a, const FieldList& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(a, x[i]);
    return y;
}

/// Lawson integrating-factor RK step for y' = L y + N(y) with diagonal L = -D |k|^2.
template <class Rhs>
FieldList lawson_step(const FieldList& y, const IntegratingFactor& E, double h, Scheme scheme,
                      Rhs&& N) {
    if (scheme == Scheme::IF_RK2) {
        const auto k1 = N(y);
        const auto predictor = E.full(axpy(y, h, k1));
        const auto k2 = N(predictor);
        return axpy(E.full(axpy(y, 0.5 * h, k1)), 0.5 * h, k2);
    }
    const auto k1 = N(y);
    const auto y_half = E.half(y);
    const auto k2 = N(E.half(axpy(y, 0.5 * h, k1)));
    const auto k3 = N(axpy(y_half, 0.5 * h, k2));
    const auto k4 = N(axpy(E.full(y), h, E.half(k3)));

    FieldList mid = k2;
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] += k3[i];
    auto out = E.full(axpy(y, h / 6.0, k1));
    out = axpy(std::move(out), h / 3.0, E.half(std::move(mid)));
    return axpy(std::move(out), h / 6.0, k4);
}

FieldList pack(const SimState& s) {
    FieldList y;
    for (const auto& sp : s.species()) y.push_back(sp.c);
    if (s.model() == Model::NPE) y.push_back(s.omega());
    return y;
}

std::vector<double> diffusivities(const SimState& s) {
    std::vector<double> d;
    for (const auto& sp : s.species()) d.push_back(sp.D);
    if (s.model() == Model::NPE) d.push_back(0.0);
    return d;
}

SimState unpack(const SimState& like, const FieldList& y) {
    std::vector<IonSpecies> species = like.species();
    for (std::size_t i = 0; i < species.size(); ++i) species[i].c = y[i];
    FluidState fluid = like.fluid();
    if (auto* e = std::get_if<EulerFluid>(&fluid)) e->omega = y.back();
    return SimState(like.grid_ptr(), std::move(species), std::move(fluid), like.time());
}

void clip_positivity(SpectralField& c, double tol) {
    auto p = c.to_physical();
    const double before = c.mean().real();
    const double lo = *std::min_element(p.begin(), p.end());
    if (lo >= -tol) return;
    double sum = 0.0;
    for (auto& v : p) {
        v = std::max(v, -tol);
        sum += v;
    }
    const double after = sum / static_cast<double>(p.size());
    if (after > 0.0) {
        for (auto& v : p) v *= before / after;
    }
    c = SpectralField::from_physical(c.grid_ptr(), p);
    c.apply_dealias();
}

void check_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("time step must be positive and finite, got " + std::to_string(dt));
    }
}

}  // namespace

int scheme_order(Scheme s) { return s == Scheme::IF_RK2 ? 2 : 4; }

std::string_view scheme_name(Scheme s) { return s == Scheme::IF_RK2 ? "IF-RK2" : "IF-RK4"; }

Scheme parse_scheme(std::string_view name) {
    if (name == "IF-RK2") return Scheme::IF_RK2;
    if (name == "IF-RK4") return Scheme::IF_RK4;
    throw ConfigError("unknown scheme '" + std::string(name) + "' (expected IF-RK2 or IF-RK4)");
}

SimState step(const SimState& state, const StepperConfig& cfg, double dt) {
    check_dt(dt);
    const auto& g = state.grid();
    const auto D = diffusivities(state);
    const double max_rate = *std::max_element(D.begin(), D.end()) *
                            std::pow(g.max_wavenumber_magnitude(), 2) * dt;
    if (!std::isfinite(max_rate)) {
        throw ConfigError("integrating factor exponent is not finite for dt = " + std::to_string(dt));
    }
    const IntegratingFactor E(g, D, dt);

    auto rhs = [&](const FieldList& y) -> FieldList {
        if (cfg.linear_only) {
            FieldList zero;
            for (const auto& f : y) zero.emplace_back(f.grid_ptr());
            return zero;
        }
        SimState stage = unpack(state, y);
        stage.refresh();
        auto terms = nonlinear_terms(stage);
        FieldList out = std::move(terms.species);
        if (terms.omega) out.push_back(std::move(*terms.omega));
        return out;
    };

    auto y = lawson_step(pack(state), E, dt, cfg.scheme, rhs);
    const auto next_index = state.step_index() + 1;
    for (auto& f : y) {
        f.enforce_hermitian();
        if (!f.all_finite()) {
            throw DivergenceError(next_index, "non-finite coefficient at step " +
                                                  std::to_string(next_index) + " (t = " +
                                                  std::to_string(state.time() + dt) + ")");
        }
    }
    if (cfg.positivity_clip) {
        for (std::size_t i = 0; i < state.species().size(); ++i) clip_positivity(y[i], cfg.positivity_tol);
    }

    SimState next = unpack(state, y);
    next.set_time(state.time() + dt);
    next.set_step_index(next_index);
    next.refresh();
    return next;
}

SimState step(const SimState& state, const StepperConfig& cfg) {
    return step(state, cfg, cfg.adaptive ? adaptive_dt(state, cfg) : cfg.dt);
}

double adaptive_dt(const SimState& state, const StepperConfig& cfg) {
    check_dt(cfg.dt);
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    double speed = norm(state.velocity(), LinfNorm{});
    double drift = 0.0;
    for (const auto& sp : state.species()) drift = std::max(drift, sp.D * std::abs(sp.z));
    if (drift > 0.0) speed = std::max(speed, drift * norm(gradient(state.phi()), LinfNorm{}));
    if (speed == 0.0) return cfg.dt;
    return std::min(cfg.dt, cfg.cfl * state.grid().spacing() / speed);
}

SpectralField euler_step(const SpectralField& omega, Scheme scheme, double dt) {
    check_dt(dt);
    const IntegratingFactor E(omega.grid(), {0.0}, dt);
    auto rhs = [](const FieldList& y) -> FieldList {
        return {euler_advection(y[0], velocity_from_vorticity(y[0]))};
    };
    auto y = lawson_step(FieldList{omega}, E, dt, scheme, rhs);
    y[0].enforce_hermitian();
    return std::move(y[0]);
}

Trajectory run(const SimState& initial, const StepperConfig& cfg,
               const std::vector<StepHook>& hooks, const RunOptions& options) {
    if (!(cfg.t_end >= initial.time())) {
        throw ConfigError("t_end precedes the initial time");
    }
    if (options.cadence < 1) throw ConfigError("cadence must be at least 1");

    Trajectory traj;
    SimState s = initial;
    if (!s.fresh()) s.refresh();

    auto record = [&](const SimState& st) {
        for (const auto& h : hooks) h(st);
        traj.times.push_back(st.time());
        if (options.keep_snapshots) traj.snapshots.push_back(st);
    };
    record(s);

    const double eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    while (s.time() < cfg.t_end - eps) {
        double dt = cfg.adaptive ? adaptive_dt(s, cfg) : cfg.dt;
        const bool last = s.time() + dt >= cfg.t_end - eps;
        if (last) dt = cfg.t_end - s.time();
        try {
            s = step(s, cfg, dt);
        } catch (const DivergenceError& e) {
            traj.diverged = true;
            traj.failed_step = e.step();
            traj.error = e.what();
            break;
        }
        if (last) {
            s.set_time(cfg.t_end);
        } else if (!cfg.adaptive) {
            // fixed steps: label times by multiplication so they do not drift by summation
            s.set_time(initial.time() + static_cast<double>(s.step_index() - initial.step_index()) * cfg.dt);
        }
        traj.steps.push_back({s.step_index(), s.time(), dt});
        if (last || s.step_index() % options.cadence == 0) record(s);
    }
    return traj;
}

}  // namespace ionspec
