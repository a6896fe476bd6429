#pragma once

#include <cstdint>
#include <string>

namespace sfwm {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content hash (provenance tagging, not security).
std::uint64_t fnv1a64(const std::string& bytes);

std::string fnv1a64_hex(const std::string& bytes);

/// File contents, or throws std::invalid_argument.
std::string slurp_file(const std::string& path);

/// ISO-8601 UTC timestamp.
std::string iso8601_now();

/// Write `<artifact_path>.meta.json` carrying the timestamp, so the artifact
/// itself stays byte-identical across reruns.
void write_timestamp_sidecar(const std::string& artifact_path);

}  // namespace sfwm
