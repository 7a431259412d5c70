#pragma once

#include <string>

#include "vibro/types.hpp"

namespace vibro {

/// Strict reader for the recording CSV format:
///   # sample_rate_hz=<positive real>
///   # label=<string>            (optional)
///   t,ax,ay,az,tacho            (t and tacho optional)
///   <decimal rows>
/// Malformed content raises InputError with the offending line number; a `t`
/// column must advance by 1/sample_rate within 0.1%.
Recording parse_recording(const std::string& path);

/// Writes the same format back, numbers in shortest round-trip form, so a
/// write/read cycle is bit-exact and one recording always serializes to the
/// same bytes.
void write_recording(const Recording& recording, const std::string& path);

/// FNV-1a 64-bit digest, lowercase hex.
std::string fnv1a64_hex(const void* data, std::size_t size);

} // namespace vibro
