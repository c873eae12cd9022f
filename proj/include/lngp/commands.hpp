#pragma once

#include <string>

#include "lngp/config.hpp"

namespace lngp {

// Commands write their artifacts into cfg.out (created if necessary).
// A primary output that already exists aborts with ValidationError unless
// force is set; cmd_summarize is read-only and prints to stdout.
void cmd_simulate(const RunConfig& cfg, bool force = false);
void cmd_fit(const RunConfig& cfg, bool force = false);
void cmd_select(const RunConfig& cfg, bool force = false);
void cmd_summarize(const RunConfig& cfg);

// Building blocks, exposed for direct testing. ------------------------

// Assemble model inputs from the configured data source and design.
ModelData load_model_data(const RunConfig& cfg);

// Covariate design at the given increment times (columns defined by the
// configured design type; "csv" reads path, keyed by a leading index
// column).
Matrix build_design(const DesignSpec& design, const Vector& times);

// 64-bit FNV-1a over a file's bytes, as a hex string (manifest checksums).
std::string file_checksum(const std::string& path);

}  // namespace lngp
