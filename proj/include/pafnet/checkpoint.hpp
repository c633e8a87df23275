#pragma once

#include <string>

#include "pafnet/network.hpp"

namespace pafnet {

/// Binary checkpoint: magic, spec hash, segment lengths, then the flat
/// little-endian 64-bit parameter vector. Round-trips bit-exactly.
void save_checkpoint(const ParamStore& store, const NetworkSpec& spec,
                     const std::string& path);

/// Throws SpecHashMismatch when the file was written for a different spec,
/// IoError on short/corrupt files.
ParamStore load_checkpoint(const NetworkSpec& spec, const std::string& path);

}  // namespace pafnet
