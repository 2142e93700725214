#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "rwre/environment.hpp"

namespace rwre {

/// Binary layout: the 8 magic bytes "RWREOBS1" followed by one little-endian
/// IEEE-754 double per observation.
inline constexpr std::string_view kObservationMagic = "RWREOBS1";

void write_observations(std::ostream& out, const ObservationSeq& xs);
ObservationSeq read_observations(std::istream& in);

void write_observations(const std::filesystem::path& path, const ObservationSeq& xs);
ObservationSeq read_observations(const std::filesystem::path& path);

/// One value per line, printed with round-trip precision.
void write_observations_text(std::ostream& out, const ObservationSeq& xs);
ObservationSeq read_observations_text(std::istream& in);

/// Ground-truth files. Trajectory: "RWRETRJ1" then little-endian int64 sites.
/// Environment: "RWREENV1", the int64 first site, then little-endian doubles.
inline constexpr std::string_view kTrajectoryMagic = "RWRETRJ1";
inline constexpr std::string_view kEnvironmentMagic = "RWREENV1";

void write_trajectory(const std::filesystem::path& path, const Trajectory& x);
Trajectory read_trajectory(const std::filesystem::path& path);
void write_environment(const std::filesystem::path& path, const EnvironmentWindow& window);
EnvironmentWindow read_environment(const std::filesystem::path& path);

} // namespace rwre
