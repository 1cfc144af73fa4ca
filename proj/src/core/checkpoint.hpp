#pragma once

#include <string>

#include "core/trainer.hpp"

namespace regenid {

// Binary checkpoint container: a text header with the config snapshot and a
// manifest of (parameter name, shape, byte offset), followed by raw 64-bit
// little-endian floats, row-major. Round trips bit-exactly.
void save_checkpoint(TrainedPair& pair, const std::string& path);
TrainedPair load_checkpoint(const std::string& path);

}  // namespace regenid
