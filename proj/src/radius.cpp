#include "ionspec/radius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

ShellSpectrum shell_spectrum(const SpectralField& f) {
    const auto& g = f.grid();
    const int max_shell = static_cast<int>(std::lround(g.max_wavenumber_magnitude()));
    std::vector<double> amp(max_shell + 1, -1.0);
    std::vector<double> kmax(max_shell + 1, 0.0);
    std::vector<double> energy(max_shell + 1, 0.0);
    auto c = f.data();
    for_each_stored_mode(g, [&](int i1, int i2, int k1, int k2) {
        if (k1 == 0 && k2 == 0) return;
        const double mag = std::hypot(static_cast<double>(k1), k2);
        const int s = static_cast<int>(std::lround(mag));
        const double a = std::abs(c[g.flat(i1, i2)]);
        energy[s] += g.lattice_weight(i2) * a * a;
        // ties resolve to the smaller |k| so the result does not depend on traversal order
        if (a > amp[s] || (a == amp[s] && mag < kmax[s])) {
            amp[s] = a;
            kmax[s] = mag;
        }
    });
    ShellSpectrum out;
    for (int s = 1; s <= max_shell; ++s) {
        if (amp[s] < 0.0) continue;
        out.shell.push_back(s);
        out.k_at_max.push_back(kmax[s]);
        out.max_amplitude.push_back(amp[s]);
        out.energy.push_back(energy[s]);
    }
    return out;
}

RadiusFit radius_estimate(const SpectralField& f, int k_min, int k_max, double noise_floor) {
    const int cutoff = f.grid().dealias_cutoff();
    if (k_min < 1 || k_max <= k_min || k_max > cutoff) {
        throw ConfigError("radius fit band [" + std::to_string(k_min) + ", " +
                          std::to_string(k_max) + "] must satisfy 1 <= k_min < k_max <= " +
                          std::to_string(cutoff));
    }
    const auto spec = shell_spectrum(f);
    const double top =
        spec.max_amplitude.empty()
            ? 0.0
            : *std::max_element(spec.max_amplitude.begin(), spec.max_amplitude.end());

    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < spec.shell.size(); ++i) {
        const int s = spec.shell[i];
        if (s < k_min || s > k_max) continue;
        const double a = spec.max_amplitude[i];
        if (!(a > noise_floor * top) || a == 0.0) continue;
        x.push_back(spec.k_at_max[i]);
        y.push_back(std::log(a));
    }
    if (x.size() < 4) {
        throw InsufficientDataError("radius fit needs at least 4 shells above the noise floor, found " +
                                    std::to_string(x.size()));
    }
    const double nx = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / nx;
        my += y[i] / nx;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("radius fit abscissae are degenerate");
    const double slope = sxy / sxx;
    double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    r2 = std::clamp(r2, 0.0, 1.0);
    return {std::max(0.0, -slope), r2, static_cast<int>(x.size())};
}

RadiusFit state_radius_estimate(const SimState& state, int k_min, int k_max, double noise_floor) {
    std::vector<const SpectralField*> fields;
    for (const auto& sp : state.species()) fields.push_back(&sp.c);
    if (state.model() == Model::NPE) fields.push_back(&state.omega());

    bool found = false;
    RadiusFit best;
    for (const auto* f : fields) {
        try {
            const auto fit = radius_estimate(*f, k_min, k_max, noise_floor);
            if (!found || fit.tau < best.tau) best = fit;
            found = true;
        } catch (const InsufficientDataError&) {
        }
    }
    if (!found) throw InsufficientDataError("no field of the state has enough usable shells");
    return best;
}

double npd_radius_bound(double t, std::span<const double> diffusivities, double T0) {
    if (diffusivities.empty()) throw ConfigError("npd_radius_bound: empty diffusivity list");
    if (!(T0 > 0.0)) throw ConfigError("npd_radius_bound: T0 must be positive");
    if (!(t >= 0.0)) throw ConfigError("npd_radius_bound: t must be nonnegative");
    const double dmin = *std::min_element(diffusivities.begin(), diffusivities.end());
    return 0.5 * dmin * std::min(t, 0.5 * T0);
}

double gevrey_energy(const SimState& state, double tau, double m) {
    double y = 0.0;
    for (const auto& sp : state.species()) {
        const double v = norm(sp.c, GevreyNorm{tau, m});
        y += v * v;
    }
    if (state.model() == Model::NPE) {
        const double v = norm(state.omega(), GevreyNorm{tau, m - 1.0});
        y += v * v;
    }
    return y;
}

double npe_rate(const NpeRateInputs& in) {
    const double chi = in.charged ? 1.0 : 0.0;
    return in.lam_m1_rho + in.lam_m1_rho * in.lam_m1_rho +
           chi * (in.lam_m1_u * in.lam_m1_u + 1.0) + in.grad_u_linf + in.mean_sq_sum;
}

NpeRateInputs npe_rate_inputs(const SimState& state, double m, double mean_sq_sum, bool charged) {
    NpeRateInputs in;
    in.lam_m1_rho = norm(state.rho(), GevreyNorm{0.0, m - 1.0});
    const auto& u = state.velocity();
    in.lam_m1_u = norm(u, GevreyNorm{0.0, m - 1.0});
    const auto gx = gradient(u.x);
    const auto gy = gradient(u.y);
    const auto a = gx.x.to_physical();
    const auto b = gx.y.to_physical();
    const auto c = gy.x.to_physical();
    const auto d = gy.y.to_physical();
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mx = std::max(mx, a[i] * a[i] + b[i] * b[i] + c[i] * c[i] + d[i] * d[i]);
    }
    in.grad_u_linf = std::sqrt(mx);
    in.mean_sq_sum = mean_sq_sum;
    in.charged = charged;
    return in;
}

NpeRadiusBudget::NpeRadiusBudget(double tau0, double C_user, double sqrt_y0, bool charged)
    : tau0_(tau0), C_(C_user), sqrt_y0_(sqrt_y0), charged_(charged) {
    if (!(tau0 > 0.0)) throw ConfigError("NPE radius budget: tau0 must be positive");
    if (!(C_user > 0.0)) throw ConfigError("NPE radius budget: C_user must be positive");
    if (!(sqrt_y0 >= 0.0)) throw ConfigError("NPE radius budget: sqrt(y(0)) must be nonnegative");
}

void NpeRadiusBudget::push(double t, double lam_m1_omega, double B) {
    const double chi = charged_ ? 1.0 : 0.0;
    if (times_.empty()) {
        times_.push_back(t);
        B_.push_back(B);
        log_g_.push_back(0.0);
        const double A = sqrt_y0_;
        A_.push_back(A);
        Atilde_.push_back(A + chi * A * A);
        tau_.push_back(tau0_);
        last_w_ = lam_m1_omega;
        return;
    }
    const double t_prev = times_.back();
    if (!(t > t_prev)) {
        throw DataError("NPE radius history: time grid must be strictly increasing (" +
                        std::to_string(t_prev) + " then " + std::to_string(t) + ")");
    }
    const double h = t - t_prev;
    int_B_ += 0.5 * h * (B + B_.back());
    const double log_g = C_ * int_B_;
    const double inv_g = std::exp(-log_g);
    const double inv_g_prev = std::exp(-log_g_.back());

    int_w2_over_g_ +=
        0.5 * h * (lam_m1_omega * lam_m1_omega * inv_g + last_w_ * last_w_ * inv_g_prev);
    const double g = std::exp(log_g);
    const double A = g * (sqrt_y0_ + C_ * (1.0 + tau0_) * int_w2_over_g_);
    const double At = A + chi * A * A;

    int_rate_over_g_ +=
        0.5 * h * ((lam_m1_omega + At) * inv_g + (last_w_ + Atilde_.back()) * inv_g_prev);
    const double tau = 1.0 / (g * (1.0 / tau0_ + C_ * int_rate_over_g_));

    times_.push_back(t);
    B_.push_back(B);
    log_g_.push_back(log_g);
    A_.push_back(A);
    Atilde_.push_back(At);
    tau_.push_back(tau);
    last_w_ = lam_m1_omega;
}

std::vector<double> npe_radius_bound(double tau0, double C_user, double sqrt_y0, bool charged,
                                     std::span<const NpeHistorySample> history) {
    NpeRadiusBudget budget(tau0, C_user, sqrt_y0, charged);
    for (const auto& s : history) budget.push(s.t, s.lam_m1_omega, s.B);
    return budget.tau();
}

T0Calibration calibrate_npd_T0(std::span<const SimState> snapshots, double m) {
    if (snapshots.empty()) throw DataError("T0 calibration needs at least one snapshot");
    const auto& first = snapshots.front();
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& sp : first.species()) dmin = std::min(dmin, sp.D);

    double base = 0.0;
    for (const auto& sp : first.species()) {
        const double v = norm(sp.c, GevreyNorm{0.0, m});
        base += v * v;
    }
    T0Calibration cal;
    cal.threshold = 2.0 * (1.0 + base);
    const double t0 = first.time();
    double last_ok = t0;
    for (const auto& s : snapshots) {
        const double tau = 0.5 * dmin * (s.time() - t0);
        double y = 0.0;
        for (const auto& sp : s.species()) {
            const double v = norm(sp.c, GevreyNorm{tau, m});
            y += v * v;
        }
        if (y > cal.threshold) {
            cal.T0 = last_ok - t0;
            return cal;
        }
        last_ok = s.time();
    }
    cal.T0 = last_ok - t0;
    cal.saturated = true;
    return cal;
}

}  // namespace ionspec
