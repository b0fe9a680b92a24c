#pragma once

#include <string>

#include "micromorph/config.hpp"

namespace micromorph {

/// Execute the configured command, writing all artifacts under out_dir
/// (created if missing). Throws on any failure; identical config and seed
/// produce byte-identical text outputs.
void run(const RunConfig& config, const std::string& out_dir);

}  // namespace micromorph
