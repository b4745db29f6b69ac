#pragma once

#include "swapsim/inference.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace swapsim {

struct ExperimentConfig {
    double chi = std::nan("");
    DetectorBank bell_bank{};
    DetectorBank analysis_bank{};
    double alpha_real = M_PI / 4.0;
    bool bell_threshold = true; // false: photon-number resolving Bell detectors
    TruncationControls truncation{};
    int threads = 0; // 0 = hardware concurrency

    // Throws ConfigError naming the offending field.
    void validate() const;
    double tail_eps() const { return truncation.eps; }
};

// Parses flat key=value text. Angles are in degrees; '#' starts a comment.
// Unknown keys, malformed lines and out-of-range values are ConfigErrors
// carrying the line number. `require_chi` is checked after all lines.
ExperimentConfig parse_config_text(const std::string& text, bool require_chi = true);
ExperimentConfig parse_config_file(const std::string& path, bool require_chi = true);

// Applies a single key=value override to an existing config.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0);
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Fully resolved key = value lines, in a stable order.
std::vector<std::pair<std::string, std::string>> describe_config(const ExperimentConfig& cfg);

std::string format_number(double x, int digits = 12);

} // namespace swapsim
