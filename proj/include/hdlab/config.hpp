#pragma once

#include <string>

#include <json.hpp>

#include "hdlab/circuit.hpp"
#include "hdlab/components.hpp"
#include "hdlab/synth.hpp"

namespace hdlab::config {

struct AnalysisConfig {
    double sample_rate_hz = 1e10;
    double duration_s = 1e-3;
    std::size_t segment_len = 16384;
    double overlap = 0.5;
    double reference_freq_hz = 50e6;
    double span_hz = 5e6;
    double slot_window = 1.0;
    double slot_offset_s = 0.0;
    int phase_bins = 64;

    void validate() const;
};

// Detector section as configured; resolved against the component catalog.
struct DetectorSettings {
    std::string opamp = "OPA856";
    std::string photodiode = "FGA015";
    double feedback_resistance_ohm = 1200.0;
    std::string feedback_capacitance_mode = "manual";  // "manual" | "designed"
    double feedback_capacitance_f = 0.0;
    double rail_voltage_v = 3.3;
    double lpf_cutoff_hz = 60e3;
    int lpf_order = 1;
    double lpf_post_gain = 1.0;
    double hpf_cutoff_hz = 100e3;
    int hpf_order = 1;
    double hpf_post_gain = 1.0;
    std::string catalog_path;  // empty = built-in catalog
};

struct ExperimentConfig {
    synth::SourceConfig source;
    DetectorSettings detector;
    synth::ImperfectionConfig imperfections;
    AnalysisConfig analysis;

    // Default-constructed config reproduces the telecom bench: 1560 nm LO,
    // 100 MHz repetition rate, 10 GS/s, 1 ms records.
    static ExperimentConfig defaults() { return {}; }

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    nlohmann::json to_json() const;
    std::string sha256() const;  // hash of the canonical JSON form

    components::Catalog catalog() const;
    circuit::DetectorConfig resolve_detector() const;
    circuit::DetectorConfig resolve_detector(const components::Catalog& cat) const;

    void validate() const;
};

}  // namespace hdlab::config
