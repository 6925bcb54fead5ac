#pragma once

#include <filesystem>
#include <iosfwd>

#include "spancorr/transformer.hpp"

namespace spancorr {

/// Checkpoint layout: a magic line, one line of JSON (format version, model
/// config, vocabulary, tensor names and shapes), then every tensor as raw
/// little-endian float64 in column-major order.
inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const SpanModel& model, std::ostream& out);
void save_checkpoint(const SpanModel& model, const std::filesystem::path& path);

/// Throws DataError on malformed or version-mismatched files.
SpanModel load_checkpoint(std::istream& in);
SpanModel load_checkpoint(const std::filesystem::path& path);

}  // namespace spancorr
