#pragma once

#include <string>
#include <vector>

namespace hdlab::components {

struct OpAmpSpec {
    std::string name;
    double gbp_hz = 0.0;            // gain-bandwidth product
    double input_capacitance_f = 0.0;
    double min_noise_gain = 0.0;    // V/V
    double max_bandwidth_hz = 0.0;

    void validate() const;
};

struct PhotodiodeSpec {
    std::string name;
    double responsivity_a_per_w = 0.0;
    double wavelength_m = 0.0;      // reference wavelength of the responsivity value
    double capacitance_f = 0.0;
    double bandwidth_hz = 0.0;
    double saturation_current_a = 0.0;

    void validate() const;
    double quantum_efficiency() const;  // at the reference wavelength
};

// Component catalog: the three wideband op-amps plus the Si and InGaAs diodes.
struct Catalog {
    int version = 1;
    std::vector<OpAmpSpec> opamps;
    std::vector<PhotodiodeSpec> photodiodes;

    const OpAmpSpec& opamp(const std::string& name) const;
    const PhotodiodeSpec& photodiode(const std::string& name) const;
    std::string opamp_names() const;
    std::string photodiode_names() const;

    static Catalog builtin();
    static Catalog load(const std::string& path);  // JSON, same schema as data/components.json
};

}  // namespace hdlab::components
