#include "ionspec/initial_condition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ionspec/errors.hpp"
#include "ionspec/snapshot_io.hpp"

namespace ionspec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; avoids the library-specific distributions.
double uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double envelope(const FieldSpec& s, double k) {
    switch (s.law) {
        case AmplitudeLaw::exponential: return std::exp(-s.rate * k);
        case AmplitudeLaw::power: return std::pow(k, -s.rate);
        case AmplitudeLaw::gaussian: return std::exp(-s.rate * k * k);
    }
    return 1.0;
}

SpectralField random_band(const FieldSpec& s, const GridPtr& grid, std::uint64_t seed) {
    SpectralField f(grid);
    std::mt19937_64 gen(seed);
    const int kmax = s.shell_max;
    // visit the upper half-plane in a fixed order so the draw sequence does not depend on n
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = 0; k2 <= kmax; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            const double mag = std::hypot(double(k1), double(k2));
            const int shell = static_cast<int>(std::lround(mag));
            const double u_amp = uniform(gen);
            const double u_phase = uniform(gen);
            if (shell < s.shell_min || shell > s.shell_max) continue;
            const double a = s.amplitude * envelope(s, mag) * (0.5 + u_amp);
            f.set_coeff(k1, k2, std::polar(a, 2.0 * std::numbers::pi * u_phase));
        }
    }
    f.set_coeff(0, 0, s.mean);
    return f;
}

SpectralField from_modes(const FieldSpec& s, const GridPtr& grid) {
    SpectralField f(grid);
    for (const auto& m : s.modes) {
        // a cos(k.x + phi) = (a/2) e^{i phi} e^{ik.x} + c.c.
        if (m.k1 == 0 && m.k2 == 0) {
            f.set_coeff(0, 0, f.coeff(0, 0) + m.amplitude * std::cos(m.phase));
            continue;
        }
        const cplx c = 0.5 * m.amplitude * std::polar(1.0, m.phase);
        f.set_coeff(m.k1, m.k2, f.coeff(m.k1, m.k2) + c);
    }
    return f;
}

SpectralField from_file(const FieldSpec& s, const GridPtr& grid) {
    const SimState snap = read_snapshot(s.path);
    if (snap.grid().n() != grid->n()) {
        throw IoError(s.path + ": snapshot grid n=" + std::to_string(snap.grid().n()) +
                      " does not match n=" + std::to_string(grid->n()));
    }
    if (s.field == "vorticity") {
        if (snap.model() != Model::NPE) throw IoError(s.path + ": snapshot has no vorticity");
        return snap.omega();
    }
    if (s.field.rfind("species[", 0) == 0 && s.field.back() == ']') {
        std::size_t i = 0;
        try {
            i = std::stoul(s.field.substr(8, s.field.size() - 9));
        } catch (const std::exception&) {
            throw IoError(s.path + ": bad field selector '" + s.field + "'");
        }
        if (i >= snap.species().size()) {
            throw IoError(s.path + ": snapshot has no " + s.field);
        }
        return snap.species()[i].c;
    }
    throw IoError(s.path + ": bad field selector '" + s.field + "'");
}

}  // namespace

std::uint64_t species_stream(std::size_t index) { return 0x5000 + index; }
std::uint64_t vorticity_stream() { return 0x7000; }

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

SpectralField initial_condition(const FieldSpec& spec, const GridPtr& grid, FieldRole role,
                                std::uint64_t seed, std::uint64_t stream,
                                std::vector<std::string>* warnings) {
    SpectralField f(grid);
    switch (spec.kind) {
        case FieldSpec::Kind::constant: f.set_coeff(0, 0, spec.value); break;
        case FieldSpec::Kind::modes: f = from_modes(spec, grid); break;
        case FieldSpec::Kind::random_band: f = random_band(spec, grid, split_seed(seed, stream)); break;
        case FieldSpec::Kind::file: f = from_file(spec, grid); break;
    }
    f.apply_dealias();

    if (role == FieldRole::vorticity) {
        if (f.mean() != cplx(0.0) && warnings) {
            warnings->push_back("vorticity mean " + std::to_string(f.mean().real()) +
                                " removed");
        }
        f.set_coeff(0, 0, 0.0);
        return f;
    }
    const auto p = f.to_physical();
    const double lo = *std::min_element(p.begin(), p.end());
    if (lo < 0.0) {
        f.set_coeff(0, 0, f.mean() - lo);
        if (warnings) {
            warnings->push_back("concentration minimum " + std::to_string(lo) +
                                " lifted to 0 by adding a constant");
        }
    }
    return f;
}

SimState initial_state(const RunConfig& cfg, std::vector<std::string>* warnings) {
    auto grid = SpectralGrid::create(cfg.n);
    std::vector<IonSpecies> species;
    for (std::size_t i = 0; i < cfg.species.size(); ++i) {
        const auto& s = cfg.species[i];
        species.push_back({s.z, s.D,
                           initial_condition(s.initial, grid, FieldRole::concentration, cfg.seed,
                                             species_stream(i), warnings)});
    }
    FluidState fluid = DarcyFluid{};
    if (cfg.model == Model::NPE) {
        fluid = EulerFluid{initial_condition(cfg.vorticity.value_or(FieldSpec{}), grid,
                                             FieldRole::vorticity, cfg.seed, vorticity_stream(),
                                             warnings)};
    }
    SimState state(grid, std::move(species), std::move(fluid));
    state.refresh();
    return state;
}

}  // namespace ionspec
