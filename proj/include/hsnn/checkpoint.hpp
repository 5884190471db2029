#pragma once

#include <string>

#include "hsnn/es.hpp"

namespace hsnn {

// Binary checkpoint of an ES optimizer state. Fixed layout, explicitly
// little-endian so files move between machines:
//   bytes 0..7   magic "HSNNCKPT"
//   u32          format version (currently 1)
//   u32          reserved, zero
//   u64          seed
//   u64          generation
//   u64          dimension d
//   f64 * d      center
//   f64 * d      sigma
// Exact size is enforced on load; version mismatches and trailing bytes are
// errors, not warnings.

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const EsState& state);
EsState load_checkpoint(const std::string& path);

}  // namespace hsnn
