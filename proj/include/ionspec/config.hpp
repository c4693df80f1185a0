#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ionspec/models.hpp"
#include "ionspec/stepper.hpp"

namespace ionspec {

struct ModeSpec {
    int k1 = 0;
    int k2 = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

enum class AmplitudeLaw { exponential, power, gaussian };

/// Initial-condition recipe for one field.
struct FieldSpec {
    enum class Kind { constant, modes, random_band, file };
    Kind kind = Kind::constant;

    double value = 0.0;                  // constant
    std::vector<ModeSpec> modes;         // modes: each entry adds a cos(k.x + phase)

    int shell_min = 1;                   // random_band
    int shell_max = 4;
    double amplitude = 0.1;
    AmplitudeLaw law = AmplitudeLaw::exponential;
    double rate = 1.0;
    double mean = 0.0;

    std::string path;                    // file: snapshot path
    std::string field;                   // "species[i]" or "vorticity"
};

struct SpeciesConfig {
    double z = 0.0;
    double D = 1.0;
    FieldSpec initial;
};

struct GevreyProbe {
    double tau = 0.0;
    double m = 3.0;
};

struct DiagnosticsConfig {
    int cadence = 10;              // steps between invariant/radius rows
    int snapshot_cadence = 0;      // steps between snapshots; 0 keeps only the first and last
    double hm_order = 3.0;
    int fit_k_min = 2;
    int fit_k_max = 0;             // 0 selects the dealiasing cutoff
    double noise_floor = 1e-14;
    double ledger_m = 3.0;         // Sobolev/Gevrey order used by the Gronwall ledgers
    std::vector<GevreyProbe> probes;
};

struct RunConfig {
    Model model = Model::NPD;
    int n = 32;
    std::vector<SpeciesConfig> species;
    std::optional<FieldSpec> vorticity;   // NPE only
    StepperConfig stepper;
    DiagnosticsConfig diagnostics;
    std::string output = "run";
    std::uint64_t seed = 0;
    double C_user = 1.0;
    double tau0 = 0.1;                    // NPE only
    std::optional<double> T0;             // NPD only; empty means calibrate from the run
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise ValidationError
/// carrying the offending key path.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const RunConfig& cfg);
/// Canonical resolved document (every default spelled out). Parsing it yields an equal
/// config whose resolved text is byte-identical.
std::string resolved_config_text(const RunConfig& cfg);

/// Cartesian sweep over parameter axes applied to a base run document.
struct SweepAxis {
    std::string key;                       // e.g. "n", "stepper.dt", "species[*].D"
    std::vector<nlohmann::json> values;
};

struct SweepPoint {
    std::size_t index = 0;
    nlohmann::json params;                 // key -> value for this point
    RunConfig config;
};

struct SweepConfig {
    nlohmann::json base;
    std::vector<SweepAxis> axes;
};

SweepConfig parse_sweep(std::string_view text);
/// Expands the product in axis order (last axis fastest). Every point is validated.
std::vector<SweepPoint> expand_sweep(const SweepConfig& sweep);

/// Sets `key` (dotted path with [i] or [*] indices) in a JSON document.
void set_json_path(nlohmann::json& doc, std::string_view key, const nlohmann::json& value);

}  // namespace ionspec
