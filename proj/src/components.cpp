#include "hdlab/components.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdlab/errors.hpp"
#include "hdlab/quantum.hpp"

namespace hdlab::components {

void OpAmpSpec::validate() const {
    if (name.empty()) throw ConfigError("op-amp name empty");
    if (!(gbp_hz > 0.0 && input_capacitance_f > 0.0 && min_noise_gain > 0.0 &&
          max_bandwidth_hz > 0.0)) {
        throw ConfigError("op-amp '" + name + "' has a non-positive parameter");
    }
}

void PhotodiodeSpec::validate() const {
    if (name.empty()) throw ConfigError("photodiode name empty");
    if (!(capacitance_f > 0.0)) throw ConfigError("photodiode '" + name + "' capacitance <= 0");
    if (!(bandwidth_hz > 0.0 && saturation_current_a > 0.0)) {
        throw ConfigError("photodiode '" + name + "' has a non-positive parameter");
    }
    quantum_efficiency();  // throws if the datasheet numbers are inconsistent
}

double PhotodiodeSpec::quantum_efficiency() const {
    return quantum::pd_quantum_efficiency(responsivity_a_per_w, wavelength_m);
}

const OpAmpSpec& Catalog::opamp(const std::string& name) const {
    for (const auto& oa : opamps) {
        if (oa.name == name) return oa;
    }
    throw ConfigError("op-amp '" + name + "' not in catalog (available: " + opamp_names() + ")");
}

const PhotodiodeSpec& Catalog::photodiode(const std::string& name) const {
    for (const auto& pd : photodiodes) {
        if (pd.name == name) return pd;
    }
    throw ConfigError("photodiode '" + name + "' not in catalog (available: " +
                      photodiode_names() + ")");
}

std::string Catalog::opamp_names() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < opamps.size(); ++i) os << (i ? ", " : "") << opamps[i].name;
    return os.str();
}

std::string Catalog::photodiode_names() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < photodiodes.size(); ++i)
        os << (i ? ", " : "") << photodiodes[i].name;
    return os.str();
}

Catalog Catalog::builtin() {
    Catalog c;
    c.version = 1;
    c.opamps = {
        {"OPA847", 3.9e9, 3.7e-12, 12.0, 325e6},
        {"OPA855", 8.0e9, 0.8e-12, 7.0, 1.1e9},
        {"OPA856", 1.1e9, 1.1e-12, 1.0, 1.1e9},
    };
    // Diode capacitances are not on the abbreviated datasheets; these defaults
    // are editable through a user catalog file.
    c.photodiodes = {
        {"s3883", 0.58, 795e-9, 6.0e-12, 300e6, 10e-3},
        {"FGA015", 0.95, 1550e-9, 1.5e-12, 3.0e9, 2e-3},
    };
    for (const auto& oa : c.opamps) oa.validate();
    for (const auto& pd : c.photodiodes) pd.validate();
    return c;
}

namespace {

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigError("catalog entry missing numeric field '" + key + "'");
    }
    return j[key].get<double>();
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw ConfigError("catalog entry missing string field '" + key + "'");
    }
    return j[key].get<std::string>();
}

}  // namespace

Catalog Catalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalog file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("catalog parse error in " + path + ": " + e.what());
    }

    Catalog c;
    c.version = j.value("version", 1);
    if (!j.contains("opamps") || !j["opamps"].is_array() || !j.contains("photodiodes") ||
        !j["photodiodes"].is_array()) {
        throw ConfigError("catalog must contain 'opamps' and 'photodiodes' arrays");
    }
    for (const auto& e : j["opamps"]) {
        OpAmpSpec oa;
        oa.name = require_string(e, "name");
        oa.gbp_hz = require_number(e, "gbp_hz");
        oa.input_capacitance_f = require_number(e, "input_capacitance_f");
        oa.min_noise_gain = require_number(e, "min_noise_gain");
        oa.max_bandwidth_hz = require_number(e, "max_bandwidth_hz");
        oa.validate();
        c.opamps.push_back(oa);
    }
    for (const auto& e : j["photodiodes"]) {
        PhotodiodeSpec pd;
        pd.name = require_string(e, "name");
        pd.responsivity_a_per_w = require_number(e, "responsivity_a_per_w");
        pd.wavelength_m = require_number(e, "wavelength_m");
        pd.capacitance_f = require_number(e, "capacitance_f");
        pd.bandwidth_hz = require_number(e, "bandwidth_hz");
        pd.saturation_current_a = require_number(e, "saturation_current_a");
        pd.validate();
        c.photodiodes.push_back(pd);
    }
    return c;
}

}  // namespace hdlab::components
