#pragma once

#include "ballvault/rankspace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace ballvault {

enum class PointFormat { Text, Binary };

/// Text: one "x y" pair of unsigned decimals per line; blank lines and lines
/// starting with '#' are skipped. Binary: "PTS1" followed by little-endian
/// u64 (x, y) pairs up to end of file.
void write_points(std::ostream& out, const std::vector<Point>& points, PointFormat format);
std::vector<Point> read_points(std::istream& in);  // format detected from the magic

void save_points(const std::filesystem::path& path, const std::vector<Point>& points, PointFormat format);
std::vector<Point> load_points(const std::filesystem::path& path);

enum class Distribution { Uniform, GridDiagonal, Clustered };

Distribution parse_distribution(std::string_view name);

/// Deterministic point set for a seed. Coordinates lie in [0, universe).
/// Uniform draws n distinct x and n distinct y values; GridDiagonal places
/// points evenly on the main diagonal in seeded order; Clustered scatters
/// points around n/64 centres. Throws validation_error when n < 1 or
/// universe < n.
std::vector<Point> generate_points(std::size_t n, std::uint64_t universe, std::uint64_t seed, Distribution dist);

} // namespace ballvault
