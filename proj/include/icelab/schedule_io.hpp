#pragma once

#include <string>

#include "icelab/words.hpp"

namespace icelab {

/// Canonical JSON document for a schedule. Field order is fixed; the seed
/// word is a list of alphabet indices.
std::string schedule_to_json(const Schedule& schedule);

/// Parse and validate a schedule document. Malformed input raises a
/// configuration error.
Schedule schedule_from_json(const std::string& text);

Schedule load_schedule(const std::string& path);
void save_schedule(const Schedule& schedule, const std::string& path);

/// FNV-1a 64 of `text` as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// fnv1a_hex of the compact canonical document, as 16 lowercase hex digits.
std::string schedule_hash(const Schedule& schedule);

/// The CAT example: seed "CAT", q = 6 with rotations (0,1,2,2,0,1), then
/// q = 3 with rotations (7,4,11).
Schedule cat_schedule();

}  // namespace icelab
