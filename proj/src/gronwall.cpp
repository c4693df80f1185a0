#include "ionspec/gronwall.hpp"

#include <algorithm>
#include <cmath>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"

namespace ionspec {

namespace {

void finish(GronwallReport& r) {
    r.margin.resize(r.bound.size());
    for (std::size_t i = 0; i < r.bound.size(); ++i) {
        r.margin[i] = r.bound[i] - r.observed[i];
        if (r.margin[i] < 0.0) r.any_negative = true;
    }
}

}  // namespace

NpdLedgerSample npd_ledger_sample(const SimState& state, double m) {
    NpdLedgerSample s;
    s.t = state.time();
    const double gr = norm(state.rho(), GevreyNorm{0.0, 1.0});
    s.grad_rho_sq = gr * gr;
    for (const auto& sp : state.species()) {
        const double lap = norm(sp.c, GevreyNorm{0.0, 2.0});
        const double l4 = norm(sp.c, L4Norm{});
        const double hm = norm(sp.c, GevreyNorm{0.0, m});
        s.lap_c_sq_sum += lap * lap;
        s.l4_sq_sum += l4 * l4;
        s.lam_m_c_sq_sum += hm * hm;
    }
    return s;
}

std::vector<double> npd_ledger_exponent(std::span<const NpdLedgerSample> samples, double C_user) {
    std::vector<double> L;
    L.reserve(samples.size());
    double sup_grad = 0.0;
    double int_lap = 0.0;
    double int_grad = 0.0;
    double int_l4 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (i > 0) {
            const auto& p = samples[i - 1];
            if (!(s.t > p.t)) throw DataError("NPD ledger: sample times must strictly increase");
            const double h = s.t - p.t;
            int_lap += 0.5 * h * (s.lap_c_sq_sum + p.lap_c_sq_sum);
            int_grad += 0.5 * h * (s.grad_rho_sq + p.grad_rho_sq);
            int_l4 += 0.5 * h * (s.l4_sq_sum + p.l4_sq_sum);
        }
        sup_grad = std::max(sup_grad, s.grad_rho_sq);
        L.push_back(C_user * sup_grad * int_lap + int_grad + int_l4);
    }
    return L;
}

GronwallReport npd_gronwall_ledger(std::span<const NpdLedgerSample> samples, double C_user) {
    GronwallReport r;
    r.kind = "NPD";
    r.C_user = C_user;
    r.exponent = npd_ledger_exponent(samples, C_user);
    const double base = samples.empty() ? 0.0 : samples.front().lam_m_c_sq_sum;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        r.times.push_back(samples[i].t);
        r.bound.push_back(std::exp(r.exponent[i]) * base);
        r.observed.push_back(samples[i].lam_m_c_sq_sum);
    }
    finish(r);
    return r;
}

GronwallReport npe_gronwall_ledger(const NpeRadiusBudget& budget, std::span<const double> sqrt_y) {
    if (sqrt_y.size() != budget.size()) {
        throw DataError("NPE ledger: observed series length does not match the budget");
    }
    GronwallReport r;
    r.kind = "NPE";
    r.C_user = budget.C_user();
    r.times = budget.times();
    r.exponent = budget.log_g();
    r.bound = budget.A();
    r.observed.assign(sqrt_y.begin(), sqrt_y.end());
    finish(r);
    return r;
}

}  // namespace ionspec
