#pragma once

#include <string>

#include "crom/config.hpp"

namespace crom::repro {

// Canned end-to-end experiments. Each writes its artifacts, a resolved
// config.cfg, a summary.txt of key = value results, and hashes.txt listing
// the FNV-1a hash of every other output file.
//
// reuse_dir, when non-empty, must point at a previous pod-hierarchy output
// directory; da-partial then reads the POD basis, training series, causation
// matrix, and handoff state from it instead of recomputing them.
void fourier_recovery(const RunConfig& cfg);
void pod_hierarchy(const RunConfig& cfg);
void da_partial(const RunConfig& cfg, const std::string& reuse_dir);

// Desk/full profiles: desk shortens the training window to [1e4, 1.4e4] and
// the assimilation to p = 100 over [0, 500]; full keeps the published scale
// ([1e4, 5e4], p = 500 over [0, 2000]).
RunConfig profile(const std::string& experiment, bool desk, std::uint64_t seed,
                  const std::string& out_dir, bool csv);

}  // namespace crom::repro
