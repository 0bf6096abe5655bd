#include "hdlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hdlab/errors.hpp"
#include "hdlab/trace_io.hpp"

namespace hdlab::config {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& section) {
    if (!j.is_object()) throw ConfigError("section '" + section + "' must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

double num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError("'" + key + "' must be a number");
    return j[key].get<double>();
}

std::string str(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ConfigError("'" + key + "' must be a string");
    return j[key].get<std::string>();
}

synth::PhaseScan parse_phase_scan(const json& j) {
    check_keys(j, {"mode", "start_rad", "rate_rad_per_s"}, "source.phase_scan");
    synth::PhaseScan ps;
    const std::string mode = str(j, "mode", "static");
    if (mode == "static") {
        ps.mode = synth::PhaseScanMode::static_phase;
    } else if (mode == "ramp") {
        ps.mode = synth::PhaseScanMode::ramp;
    } else {
        throw ConfigError("phase_scan.mode must be 'static' or 'ramp'");
    }
    ps.start_rad = num(j, "start_rad", 0.0);
    ps.rate_rad_per_s = num(j, "rate_rad_per_s", 0.0);
    return ps;
}

synth::SqueezingSpectrum parse_spectrum(const json& j) {
    if (!j.is_array()) throw ConfigError("source.spectrum must be an array of modes");
    synth::SqueezingSpectrum sp;
    sp.modes.clear();
    for (const auto& e : j) {
        check_keys(e, {"mode_index", "squeezing_db", "antisqueezing_db"},
                   "source.spectrum[]");
        synth::SpectrumMode m;
        if (!e.contains("mode_index") || !e["mode_index"].is_number_integer()) {
            throw ConfigError("spectrum entries need an integer 'mode_index'");
        }
        m.index = e["mode_index"].get<int>();
        m.squeezing_db = num(e, "squeezing_db", 0.0);
        m.antisqueezing_db = num(e, "antisqueezing_db", 0.0);
        sp.modes.push_back(m);
    }
    return sp;
}

}  // namespace

void AnalysisConfig::validate() const {
    if (!(sample_rate_hz > 0.0)) throw ConfigError("analysis.sample_rate_hz must be > 0");
    if (!(duration_s > 0.0)) throw ConfigError("analysis.duration_s must be > 0");
    if (segment_len < 16) throw ConfigError("analysis.segment_len must be >= 16");
    if (!(overlap >= 0.0 && overlap <= 0.9)) {
        throw ConfigError("analysis.overlap must be in [0, 0.9]");
    }
    if (!(reference_freq_hz > 0.0)) throw ConfigError("analysis.reference_freq_hz must be > 0");
    if (!(span_hz > 0.0)) throw ConfigError("analysis.span_hz must be > 0");
    if (!(slot_window > 0.0 && slot_window <= 1.0)) {
        throw ConfigError("analysis.slot_window must be in (0, 1]");
    }
    if (!(slot_offset_s >= 0.0)) throw ConfigError("analysis.slot_offset_s must be >= 0");
    if (phase_bins < 1) throw ConfigError("analysis.phase_bins must be >= 1");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j, {"source", "detector", "imperfections", "analysis"}, "<root>");
    ExperimentConfig cfg;

    if (j.contains("source")) {
        const auto& s = j["source"];
        check_keys(s,
                   {"rep_rate_hz", "pulse_fwhm_s", "lo_pulse_energy_j", "lo_wavelength_m",
                    "phase_scan", "spectrum", "selected_mode", "eta_mod"},
                   "source");
        cfg.source.rep_rate_hz = num(s, "rep_rate_hz", cfg.source.rep_rate_hz);
        cfg.source.pulse_fwhm_s = num(s, "pulse_fwhm_s", cfg.source.pulse_fwhm_s);
        cfg.source.lo_pulse_energy_j = num(s, "lo_pulse_energy_j", cfg.source.lo_pulse_energy_j);
        cfg.source.lo_wavelength_m = num(s, "lo_wavelength_m", cfg.source.lo_wavelength_m);
        if (s.contains("phase_scan")) cfg.source.phase_scan = parse_phase_scan(s["phase_scan"]);
        if (s.contains("spectrum")) cfg.source.spectrum = parse_spectrum(s["spectrum"]);
        if (s.contains("selected_mode")) {
            if (!s["selected_mode"].is_number_integer()) {
                throw ConfigError("source.selected_mode must be an integer");
            }
            cfg.source.selected_mode = s["selected_mode"].get<int>();
        }
        cfg.source.eta_mod = num(s, "eta_mod", cfg.source.eta_mod);
    }

    if (j.contains("detector")) {
        const auto& d = j["detector"];
        check_keys(d,
                   {"opamp", "photodiode", "feedback_resistance_ohm",
                    "feedback_capacitance_mode", "feedback_capacitance_f", "rail_voltage_v",
                    "lpf_cutoff_hz", "lpf_order", "lpf_post_gain", "hpf_cutoff_hz", "hpf_order",
                    "hpf_post_gain", "catalog_path"},
                   "detector");
        auto& dd = cfg.detector;
        dd.opamp = str(d, "opamp", dd.opamp);
        dd.photodiode = str(d, "photodiode", dd.photodiode);
        dd.feedback_resistance_ohm = num(d, "feedback_resistance_ohm", dd.feedback_resistance_ohm);
        dd.feedback_capacitance_mode =
            str(d, "feedback_capacitance_mode", dd.feedback_capacitance_mode);
        if (dd.feedback_capacitance_mode != "manual" &&
            dd.feedback_capacitance_mode != "designed") {
            throw ConfigError("detector.feedback_capacitance_mode must be 'manual' or 'designed'");
        }
        dd.feedback_capacitance_f = num(d, "feedback_capacitance_f", dd.feedback_capacitance_f);
        dd.rail_voltage_v = num(d, "rail_voltage_v", dd.rail_voltage_v);
        dd.lpf_cutoff_hz = num(d, "lpf_cutoff_hz", dd.lpf_cutoff_hz);
        dd.lpf_order = static_cast<int>(num(d, "lpf_order", dd.lpf_order));
        dd.lpf_post_gain = num(d, "lpf_post_gain", dd.lpf_post_gain);
        dd.hpf_cutoff_hz = num(d, "hpf_cutoff_hz", dd.hpf_cutoff_hz);
        dd.hpf_order = static_cast<int>(num(d, "hpf_order", dd.hpf_order));
        dd.hpf_post_gain = num(d, "hpf_post_gain", dd.hpf_post_gain);
        dd.catalog_path = str(d, "catalog_path", dd.catalog_path);
    }

    if (j.contains("imperfections")) {
        const auto& i = j["imperfections"];
        check_keys(i, {"pd_gain_mismatch", "electronic_noise_rms_v", "target_snc_db", "rng_seed"},
                   "imperfections");
        cfg.imperfections.pd_gain_mismatch =
            num(i, "pd_gain_mismatch", cfg.imperfections.pd_gain_mismatch);
        cfg.imperfections.electronic_noise_rms_v =
            num(i, "electronic_noise_rms_v", cfg.imperfections.electronic_noise_rms_v);
        if (i.contains("target_snc_db") && !i["target_snc_db"].is_null()) {
            if (!i["target_snc_db"].is_number()) {
                throw ConfigError("imperfections.target_snc_db must be a number or null");
            }
            cfg.imperfections.target_snc_db = i["target_snc_db"].get<double>();
        }
        if (i.contains("rng_seed")) {
            if (!i["rng_seed"].is_number_unsigned() && !i["rng_seed"].is_number_integer()) {
                throw ConfigError("imperfections.rng_seed must be an integer");
            }
            cfg.imperfections.rng_seed = i["rng_seed"].get<std::uint64_t>();
        }
    }

    if (j.contains("analysis")) {
        const auto& a = j["analysis"];
        check_keys(a,
                   {"sample_rate_hz", "duration_s", "segment_len", "overlap",
                    "reference_freq_hz", "span_hz", "slot_window", "slot_offset_s", "phase_bins"},
                   "analysis");
        auto& aa = cfg.analysis;
        aa.sample_rate_hz = num(a, "sample_rate_hz", aa.sample_rate_hz);
        aa.duration_s = num(a, "duration_s", aa.duration_s);
        aa.segment_len = static_cast<std::size_t>(num(a, "segment_len",
                                                      static_cast<double>(aa.segment_len)));
        aa.overlap = num(a, "overlap", aa.overlap);
        aa.reference_freq_hz = num(a, "reference_freq_hz", aa.reference_freq_hz);
        aa.span_hz = num(a, "span_hz", aa.span_hz);
        aa.slot_window = num(a, "slot_window", aa.slot_window);
        aa.slot_offset_s = num(a, "slot_offset_s", aa.slot_offset_s);
        aa.phase_bins = static_cast<int>(num(a, "phase_bins", aa.phase_bins));
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    j["source"] = {
        {"rep_rate_hz", source.rep_rate_hz},
        {"pulse_fwhm_s", source.pulse_fwhm_s},
        {"lo_pulse_energy_j", source.lo_pulse_energy_j},
        {"lo_wavelength_m", source.lo_wavelength_m},
        {"phase_scan",
         {{"mode", source.phase_scan.mode == synth::PhaseScanMode::ramp ? "ramp" : "static"},
          {"start_rad", source.phase_scan.start_rad},
          {"rate_rad_per_s", source.phase_scan.rate_rad_per_s}}},
        {"selected_mode", source.selected_mode},
        {"eta_mod", source.eta_mod},
    };
    json spectrum = json::array();
    for (const auto& m : source.spectrum.modes) {
        spectrum.push_back({{"mode_index", m.index},
                            {"squeezing_db", m.squeezing_db},
                            {"antisqueezing_db", m.antisqueezing_db}});
    }
    j["source"]["spectrum"] = spectrum;
    j["detector"] = {
        {"opamp", detector.opamp},
        {"photodiode", detector.photodiode},
        {"feedback_resistance_ohm", detector.feedback_resistance_ohm},
        {"feedback_capacitance_mode", detector.feedback_capacitance_mode},
        {"feedback_capacitance_f", detector.feedback_capacitance_f},
        {"rail_voltage_v", detector.rail_voltage_v},
        {"lpf_cutoff_hz", detector.lpf_cutoff_hz},
        {"lpf_order", detector.lpf_order},
        {"lpf_post_gain", detector.lpf_post_gain},
        {"hpf_cutoff_hz", detector.hpf_cutoff_hz},
        {"hpf_order", detector.hpf_order},
        {"hpf_post_gain", detector.hpf_post_gain},
        {"catalog_path", detector.catalog_path},
    };
    j["imperfections"] = {
        {"pd_gain_mismatch", imperfections.pd_gain_mismatch},
        {"electronic_noise_rms_v", imperfections.electronic_noise_rms_v},
        {"rng_seed", imperfections.rng_seed},
    };
    j["imperfections"]["target_snc_db"] =
        imperfections.target_snc_db ? json(*imperfections.target_snc_db) : json(nullptr);
    j["analysis"] = {
        {"sample_rate_hz", analysis.sample_rate_hz},
        {"duration_s", analysis.duration_s},
        {"segment_len", analysis.segment_len},
        {"overlap", analysis.overlap},
        {"reference_freq_hz", analysis.reference_freq_hz},
        {"span_hz", analysis.span_hz},
        {"slot_window", analysis.slot_window},
        {"slot_offset_s", analysis.slot_offset_s},
        {"phase_bins", analysis.phase_bins},
    };
    return j;
}

std::string ExperimentConfig::sha256() const {
    const std::string canon = to_json().dump();
    return trace_io::sha256_hex(reinterpret_cast<const unsigned char*>(canon.data()),
                                canon.size());
}

components::Catalog ExperimentConfig::catalog() const {
    return detector.catalog_path.empty() ? components::Catalog::builtin()
                                         : components::Catalog::load(detector.catalog_path);
}

circuit::DetectorConfig ExperimentConfig::resolve_detector() const {
    return resolve_detector(catalog());
}

circuit::DetectorConfig ExperimentConfig::resolve_detector(const components::Catalog& cat) const {
    circuit::DetectorConfig dc;
    dc.tia.opamp = cat.opamp(detector.opamp);
    dc.tia.photodiode = cat.photodiode(detector.photodiode);
    dc.tia.feedback_resistance_ohm = detector.feedback_resistance_ohm;
    if (detector.feedback_capacitance_mode == "designed") {
        dc.tia.feedback_capacitance_f = circuit::design_feedback_capacitance(
            dc.tia.opamp, dc.tia.photodiode, detector.feedback_resistance_ohm);
    } else {
        dc.tia.feedback_capacitance_f = detector.feedback_capacitance_f;
    }
    dc.tia.rail_voltage_v = detector.rail_voltage_v;
    dc.lpf = {circuit::FilterKind::lowpass, detector.lpf_cutoff_hz, detector.lpf_order,
              detector.lpf_post_gain};
    dc.hpf = {circuit::FilterKind::highpass, detector.hpf_cutoff_hz, detector.hpf_order,
              detector.hpf_post_gain};
    dc.validate();
    return dc;
}

void ExperimentConfig::validate() const {
    source.validate();
    imperfections.validate();
    analysis.validate();
    resolve_detector();

    // acquisition geometry must be pulse-synchronous before any synthesis
    const double spp = analysis.sample_rate_hz / source.rep_rate_hz;
    if (std::abs(spp - std::round(spp)) > 1e-9 * std::max(1.0, std::round(spp))) {
        throw ConfigError("analysis.sample_rate_hz must be an integer multiple of rep_rate_hz");
    }
    const double spp_count = std::round(spp);
    const double window_samples = analysis.slot_window * spp_count;
    if (window_samples < 1.0) {
        throw ConfigError("analysis.slot_window is shorter than one sample per slot");
    }
    if (analysis.slot_offset_s * analysis.sample_rate_hz +
            std::round(window_samples) > spp_count + 1e-9) {
        throw ConfigError("analysis slot window/offset does not fit inside one pulse slot");
    }
}

}  // namespace hdlab::config
