#pragma once

// Versioned JSON weights file: backend kind, the phase training reached and
// every synapse as a gain (ideal) or device state (memristive).

#include "nnadc/training.hpp"

#include <filesystem>
#include <string>

namespace nnadc {

inline constexpr int kWeightsFormatVersion = 1;

std::string dump_weights(const PipelineAdc& p, Phase phase);

/// Overwrites the synapses of `p`, which must already have the file's depth
/// and backend. Returns the stored phase. Throws std::invalid_argument on any
/// mismatch or malformed document.
Phase load_weights(PipelineAdc& p, const std::string& text);

void save_weights_file(const std::filesystem::path& path, const PipelineAdc& p, Phase phase);
Phase load_weights_file(const std::filesystem::path& path, PipelineAdc& p);

} // namespace nnadc
