#pragma once

#include <cstdint>
#include <string>

namespace htqc {

// FNV-1a over the canonicalized text, rendered as 16 hex digits. Used to
// stamp artifacts with the scenario/manifest they came from.
std::string fingerprint(const std::string& canonical_text);

// Writes atomically enough for batch use; throws IoError on failure.
void write_file(const std::string& path, const std::string& body);

// Prepends a comment line carrying fingerprint and seed, then the CSV body.
std::string stamp_csv(const std::string& body, const std::string& fp, std::uint64_t seed);

} // namespace htqc
