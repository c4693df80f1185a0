#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ionspec/errors.hpp"
#include "ionspec/spectral_ops.hpp"
#include "ionspec/stepper.hpp"
#include "../support/field_helpers.hpp"
#include "../support/oracles.hpp"

using namespace ionspec;
using testing_support::max_diff;
using testing_support::single_mode;
using testing_support::to_field;

namespace {

SpectralField constant(const GridPtr& g, double v) {
    SpectralField f(g);
    f.set_coeff(0, 0, v);
    return f;
}

SpectralField smooth_positive(const GridPtr& g, std::uint64_t seed, double mean, double amp) {
    auto lat = oracle::random_band_limited(g->n(), seed, amp, true);
    // damp high modes so the field is smooth
    for (auto& [k, v] : lat.c) v *= std::exp(-0.5 * std::hypot(k.first, k.second));
    lat.c[{0, 0}] = mean;
    return to_field(lat, g);
}

}  // namespace

TEST_CASE("scheme names") {
    CHECK(parse_scheme("IF-RK2") == Scheme::IF_RK2);
    CHECK(parse_scheme("IF-RK4") == Scheme::IF_RK4);
    CHECK(scheme_order(Scheme::IF_RK4) == 4);
    CHECK_THROWS_AS(parse_scheme("RK3"), ConfigError);
}

TEST_CASE("pure diffusion is integrated exactly") {
    auto g = SpectralGrid::create(16);
    const double D = 0.8;
    for (double dt : {1e-3, 0.1, 1.0, 5.0}) {
        for (Scheme sc : {Scheme::IF_RK2, Scheme::IF_RK4}) {
            SimState s(g, {{0.0, D, single_mode(g, 1, 0, 0.5)}}, DarcyFluid{});
            s.refresh();
            StepperConfig cfg;
            cfg.scheme = sc;
            auto next = step(s, cfg, dt);
            CHECK(std::abs(next.species()[0].c.coeff(1, 0).real() - 0.5 * std::exp(-D * dt)) < 1e-13);
            CHECK(next.time() == doctest::Approx(dt));
            CHECK(next.step_index() == 1);
        }
    }
    // with the explicit terms switched off even charged species decay exactly
    SimState s(g, {{1.0, D, constant(g, 1.0) + single_mode(g, 2, 1, 0.1)},
                   {-1.0, 2 * D, constant(g, 1.0)}}, DarcyFluid{});
    s.refresh();
    StepperConfig cfg;
    cfg.linear_only = true;
    auto next = step(s, cfg, 0.37);
    CHECK(std::abs(next.species()[0].c.coeff(2, 1).real() - 0.1 * std::exp(-5 * D * 0.37)) < 1e-13);
}

TEST_CASE("equilibrium is a fixed point") {
    auto g = SpectralGrid::create(16);
    SimState s(g, {{1.0, 0.5, constant(g, 2.0)}, {-1.0, 1.0, constant(g, 2.0)}},
               EulerFluid{SpectralField(g)});
    s.refresh();
    StepperConfig cfg;
    auto next = step(s, cfg, 0.1);
    CHECK(max_diff(next.species()[0].c, s.species()[0].c) < 1e-12);
    CHECK(max_diff(next.species()[1].c, s.species()[1].c) < 1e-12);
    CHECK(next.omega().max_abs_coeff() < 1e-12);
}

TEST_CASE("non-positive dt is rejected") {
    auto g = SpectralGrid::create(8);
    SimState s(g, {{1.0, 0.5, constant(g, 2.0)}}, DarcyFluid{});
    s.refresh();
    CHECK_THROWS_AS(step(s, StepperConfig{}, 0.0), ConfigError);
    CHECK_THROWS_AS(step(s, StepperConfig{}, std::numeric_limits<double>::infinity()), ConfigError);
}

TEST_CASE("adaptive_dt") {
    auto g = SpectralGrid::create(32);
    StepperConfig cfg;
    cfg.dt = 0.05;
    cfg.cfl = 0.5;
    SimState still(g, {{0.0, 1.0, constant(g, 1.0)}}, EulerFluid{SpectralField(g)});
    still.refresh();
    CHECK(adaptive_dt(still, cfg) == 0.05);

    // Taylor-Green: u = (sin x cos y, -cos x sin y), omega = 2 sin x sin y
    SpectralField w(g);
    w.set_coeff(1, 1, -0.5);
    w.set_coeff(1, -1, 0.5);
    SimState tg(g, {{0.0, 1.0, constant(g, 1.0)}}, EulerFluid{w});
    tg.refresh();
    const int n = 32;
    double umax = 0.0;
    for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
            const double x = 2 * std::numbers::pi * j1 / n, y = 2 * std::numbers::pi * j2 / n;
            umax = std::max(umax, std::hypot(std::sin(x) * std::cos(y), std::cos(x) * std::sin(y)));
        }
    cfg.dt = 10.0;
    const double expected = 0.5 * (2 * std::numbers::pi / 32) / umax;
    CHECK(adaptive_dt(tg, cfg) == doctest::Approx(expected).epsilon(1e-13));

    SimState tg2(g, {{0.0, 1.0, constant(g, 1.0)}}, EulerFluid{2.0 * w});
    tg2.refresh();
    CHECK(adaptive_dt(tg2, cfg) == doctest::Approx(0.5 * expected).epsilon(1e-13));

    cfg.dt = 1e-4;
    CHECK(adaptive_dt(tg, cfg) == 1e-4);
    cfg.cfl = 1.5;
    CHECK_THROWS_AS(adaptive_dt(tg, cfg), ConfigError);
}

TEST_CASE("run bookkeeping") {
    auto g = SpectralGrid::create(16);
    SimState s(g, {{0.0, 1.0, constant(g, 1.0) + single_mode(g, 1, 0, 0.5)}}, DarcyFluid{});
    StepperConfig cfg;
    cfg.t_end = 0.0;
    auto empty = run(s, cfg, {});
    CHECK(empty.steps.empty());
    CHECK(empty.snapshots.size() == 1);

    cfg.t_end = -1.0;
    CHECK_THROWS_AS(run(s, cfg, {}), ConfigError);

    cfg.t_end = 1.0;
    cfg.dt = 0.03;
    int calls = 0;
    auto traj = run(s, cfg, {[&](const SimState& st) { CHECK(st.fresh()); ++calls; }}, {5, true});
    CHECK(traj.steps.size() == 34);
    CHECK(traj.steps.back().time == 1.0);
    CHECK(traj.snapshots.back().time() == 1.0);
    CHECK(calls == static_cast<int>(traj.times.size()));
    for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
    const auto& c = traj.snapshots.back().species()[0].c;
    CHECK(std::abs(c.coeff(1, 0).real() - 0.5 * std::exp(-1.0)) < 1e-13);
    CHECK(c.coeff(0, 0).real() == 1.0);
}

TEST_CASE("divergence is reported with a partial trajectory") {
    auto g = SpectralGrid::create(16);
    auto c = constant(g, 1.0);
    c.set_coeff(1, 1, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
    SimState s(g, {{0.0, 1.0, c}}, DarcyFluid{});
    StepperConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt = 0.1;
    auto traj = run(s, cfg, {});
    CHECK(traj.diverged);
    CHECK(traj.failed_step == 1);
    CHECK(traj.snapshots.size() == 1);
    CHECK(traj.steps.empty());

    SimState s2(g, {{0.0, 1.0, c}}, DarcyFluid{});
    s2.refresh();
    try {
        step(s2, cfg, 0.1);
        CHECK(false);
    } catch (const DivergenceError& e) {
        CHECK(e.step() == 1);
    }
}

TEST_CASE("mass, Hermitian symmetry and determinism along an NPE run") {
    auto g = SpectralGrid::create(16);
    auto make = [&] {
        return SimState(g, {{1.0, 0.5, smooth_positive(g, 1, 1.0, 0.3)},
                            {-1.0, 1.0, smooth_positive(g, 2, 1.0, 0.3)}},
                        EulerFluid{to_field(oracle::random_band_limited(16, 3, 0.2, true), g)});
    };
    StepperConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    auto a = run(make(), cfg, {});
    auto b = run(make(), cfg, {});
    REQUIRE_FALSE(a.diverged);
    const auto& s0 = a.snapshots.front();
    const auto& s1 = a.snapshots.back();
    for (std::size_t i = 0; i < 2; ++i) {
        const double m0 = s0.species()[i].c.mean().real();
        CHECK(std::abs(s1.species()[i].c.mean().real() - m0) <= 1e-10 * std::abs(m0));
        const auto& c = s1.species()[i].c;
        for (int k1 = -7; k1 <= 8; ++k1)
            for (int k2 = -7; k2 <= 8; ++k2) CHECK(c.coeff(-k1, -k2) == std::conj(c.coeff(k1, k2)));
        auto x = s1.species()[i].c.data();
        auto y = b.snapshots.back().species()[i].c.data();
        CHECK(std::equal(x.begin(), x.end(), y.begin()));
    }
}

TEST_CASE("positivity clip restores mass and bounds negatives") {
    auto g = SpectralGrid::create(16);
    // 0.2 + cos x1 dips to -0.8
    SimState s(g, {{0.0, 0.1, constant(g, 0.2) + single_mode(g, 1, 0, 0.5)}}, DarcyFluid{});
    s.refresh();
    StepperConfig cfg;
    cfg.positivity_clip = true;
    cfg.positivity_tol = 1e-3;
    auto next = step(s, cfg, 1e-3);
    const auto p = next.species()[0].c.to_physical();
    CHECK(std::abs(next.species()[0].c.mean().real() - 0.2) < 1e-14);
    // dealiasing after the clamp rings slightly; the minimum is far above the unclipped -0.8
    CHECK(*std::min_element(p.begin(), p.end()) > -0.2);

    cfg.positivity_clip = false;
    auto raw = step(s, cfg, 1e-3);
    const auto q = raw.species()[0].c.to_physical();
    CHECK(*std::min_element(q.begin(), q.end()) < -0.7);
}

TEST_CASE("NPE without ions follows the unforced Euler step") {
    auto g = SpectralGrid::create(16);
    const auto w = to_field(oracle::random_band_limited(16, 9, 0.3, true), g);
    SimState s(g, {{1.0, 1.0, SpectralField(g)}, {-1.0, 0.5, SpectralField(g)}}, EulerFluid{w});
    s.refresh();
    StepperConfig cfg;
    SpectralField ref = w;
    for (int i = 0; i < 5; ++i) {
        s = step(s, cfg, 0.02);
        ref = euler_step(ref, cfg.scheme, 0.02);
    }
    CHECK(max_diff(s.omega(), ref) == 0.0);
}
