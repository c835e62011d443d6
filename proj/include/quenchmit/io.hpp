#ifndef QUENCHMIT_IO_HPP
#define QUENCHMIT_IO_HPP

#include <cstdint>
#include <string>

#include "quenchmit/errors.hpp"

namespace quenchmit {

// Shortest round-trippable decimal form of an IEEE double (%.17g trimmed).
// Every emitted number goes through this so reruns are byte-identical.
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over bytes; used for config hashes in emitted manifests.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace quenchmit

#endif
