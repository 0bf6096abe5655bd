#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdlab/config.hpp"
#include "hdlab/synth.hpp"

namespace hdlab::cli {

struct DesignReport {
    std::string text;
    nlohmann::json summary;
};

// TIA numbers, compensation recommendation, Bode table, catalog comparison.
DesignReport cmd_design(const config::ExperimentConfig& cfg);

struct SimulateResult {
    std::string out_path;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::vector<std::string> channels;
    std::string payload_sha256;
    bool saturated = false;
    double calibrated_noise_rms_v = 0.0;  // 0 when no calibration ran
    nlohmann::json summary;
};

// Channel tokens: pd1, pd2, diff_ac, diff_dc, cm, cm_ac, cm_dc, dark_ac,
// shot_ac, and "modes" (expands to m<i>_ac for every spectrum mode).
SimulateResult cmd_simulate(const config::ExperimentConfig& cfg, const std::string& out_path,
                            std::optional<std::uint64_t> seed_override = {},
                            std::optional<std::vector<std::string>> channels_override = {},
                            synth::CommonModeDiode cm_diode = synth::CommonModeDiode::pd2);

enum class AnalyzeMode { psd, snc, cmrr, squeezing };

AnalyzeMode parse_analyze_mode(const std::string& name);

struct AnalyzeResult {
    std::string csv;
    nlohmann::json summary;
};

AnalyzeResult cmd_analyze(const std::string& trace_path, const config::ExperimentConfig& cfg,
                          AnalyzeMode mode,
                          std::optional<std::vector<std::string>> channels_override = {});

enum class SweepAxis { power, cf, rf };

SweepAxis parse_sweep_axis(const std::string& name);

struct SweepResult {
    std::string csv;
    nlohmann::json summary;
};

SweepResult cmd_sweep(const config::ExperimentConfig& cfg, SweepAxis axis,
                      const std::vector<double>& grid);

// Writes CSV (and a JSON summary next to it when json_sidecar) via temp+rename.
void write_text_atomic(const std::string& path, const std::string& content);
std::string json_sidecar_path(const std::string& csv_path);

}  // namespace hdlab::cli
