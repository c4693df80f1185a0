#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ionspec/models.hpp"

namespace ionspec {

/// Binary snapshot layout (all little-endian):
///   "IONSPEC\0", u32 version, u32 n, u8 model (1 = NPE, 2 = NPD), f64 time, i64 step,
///   u32 species count, species_count x (f64 z, f64 D),
///   one block per species then omega (NPE): n x n complex128 in row-major lattice order
///   (index i1 then i2, FFT ordering), u64 FNV-1a of every preceding byte.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<unsigned char> encode_snapshot(const SimState& state);
SimState decode_snapshot(const std::vector<unsigned char>& bytes, const std::string& origin = "snapshot");

/// Writes atomically through a temporary file. Throws IoError when the directory is missing.
void write_snapshot(const SimState& state, const std::filesystem::path& path);
/// Throws SnapshotVersionError, SnapshotTruncatedError, SnapshotChecksumError or IoError.
/// The returned state has fresh caches.
SimState read_snapshot(const std::filesystem::path& path);

std::uint64_t fnv1a(const unsigned char* data, std::size_t size);

}  // namespace ionspec
