#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "heurlab/domain.hpp"
#include "heurlab/metrics.hpp"

namespace heurlab {

/// An instance directory holds one `<id>.txt` board per instance, a
/// `manifest.jsonl` (header record, then one record per instance with its
/// file name, seed, provenance and content hash) and, separately, a
/// `timing.jsonl` so that the manifest itself stays reproducible.
struct InstanceSet {
  Domain domain = Domain::Maze;
  std::string split;
  std::vector<PuzzleInstance> instances;
};

/// Writes the set. Refuses to touch an existing manifest unless `force`.
/// `header_extra` is merged into the header record as JSON text (may be empty).
void write_instance_set(const std::filesystem::path& dir, const InstanceSet& set, bool force,
                        const std::string& header_extra = {});

/// Reads a directory written by write_instance_set; instances come back in
/// manifest order with their ids, seeds and provenance. Content hashes are
/// verified.
[[nodiscard]] InstanceSet read_instance_set(const std::filesystem::path& dir);

void write_timing(const std::filesystem::path& path, const std::vector<std::pair<std::string, double>>& rows);

void write_references(const std::filesystem::path& path, std::span<const ReferenceSolution> refs);
[[nodiscard]] std::vector<ReferenceSolution> read_references(const std::filesystem::path& path);

/// Whole-file helpers used across the CLI.
[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace heurlab
