#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ionspec/config.hpp"
#include "ionspec/models.hpp"

namespace ionspec {

enum class FieldRole { concentration, vorticity };

/// Stream ids for the counter-based seed split: one per field, independent of draw order.
std::uint64_t species_stream(std::size_t index);
std::uint64_t vorticity_stream();

/// splitmix64 of (seed, stream): the seed of an independent generator per field.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Builds a band-limited field from a recipe. Concentrations that dip below zero on the grid
/// are lifted by the needed constant (a message is appended to `warnings`); vorticity is made
/// mean-zero. File references are read through the snapshot reader and raise IoError when
/// unreadable or on a different grid.
SpectralField initial_condition(const FieldSpec& spec, const GridPtr& grid, FieldRole role,
                                std::uint64_t seed, std::uint64_t stream,
                                std::vector<std::string>* warnings = nullptr);

/// Initial state of a run configuration.
SimState initial_state(const RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

}  // namespace ionspec
