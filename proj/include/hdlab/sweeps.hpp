#pragma once

#include <optional>
#include <vector>

#include "hdlab/analysis.hpp"
#include "hdlab/synth.hpp"

namespace hdlab::analysis {

struct LinearityResult {
    std::vector<double> power_w;
    std::vector<double> noise_dbm;       // band mean at the analysis frequency
    std::vector<std::size_t> clipped;    // clipped samples per point
    double slope_mw_per_mw = 0.0;        // fit over the unsaturated points
    double intercept_mw = 0.0;
    double r_squared = 0.0;
    std::vector<double> residual_db;     // |measured - fit| per point
    std::optional<double> knee_w;        // first point deviating by > 1 dB
    bool all_saturated = false;
};

// Saturation sweep: band noise power versus LO average power with a
// linear fit in the mW domain.
LinearityResult linearity_sweep(const synth::SourceConfig& source,
                                const circuit::DetectorConfig& detector,
                                const synth::ImperfectionConfig& imperfections,
                                const std::vector<double>& power_grid_w,
                                double analysis_freq_hz, double span_hz,
                                const synth::SynthOptions& opts,
                                std::size_t segment_len = 1u << 14);

}  // namespace hdlab::analysis
