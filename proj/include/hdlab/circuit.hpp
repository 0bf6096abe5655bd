#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "hdlab/components.hpp"

namespace hdlab::circuit {

struct TiaConfig {
    components::OpAmpSpec opamp;
    components::PhotodiodeSpec photodiode;
    double feedback_resistance_ohm = 0.0;
    double feedback_capacitance_f = 0.0;  // 0 = no compensation capacitor
    double rail_voltage_v = 3.3;          // hard clip at +/- this level

    void validate() const;
    // C_F + 2 C_PD + C_A1, the capacitance seen by the feedback network
    double total_capacitance_f() const;
};

enum class FilterKind { lowpass, highpass };

struct FilterSpec {
    FilterKind kind = FilterKind::lowpass;
    double cutoff_hz = 0.0;
    int order = 1;
    double post_gain = 1.0;

    void validate() const;
};

// Detector electronics: subtraction node + TIA + demultiplexing filters.
struct DetectorConfig {
    TiaConfig tia;
    FilterSpec lpf{FilterKind::lowpass, 60e3, 1, 1.0};
    FilterSpec hpf{FilterKind::highpass, 100e3, 1, 1.0};

    void validate() const;
};

// Signal cutoff estimate: sqrt(GBP / (2 pi R_F (C_F + 2 C_PD + C_A1))).
double tia_cutoff(const TiaConfig& cfg);

// Compensation value C_F = sqrt((2 C_PD + C_A1) / (pi GBP R_F)).
double design_feedback_capacitance(const components::OpAmpSpec& opamp,
                                   const components::PhotodiodeSpec& pd, double r_f_ohm);

// Closed-loop transimpedance of the single-pole op-amp model,
//   Z(f) = R_F / (1 + s (R_F C_F + 1/w_G) + s^2 R_F C_tot / w_G),  s = j 2 pi f,
// whose natural frequency equals tia_cutoff(cfg).
std::complex<double> tia_transfer(const TiaConfig& cfg, double f_hz);

struct BodeResult {
    std::vector<double> magnitude_db;    // re DC gain
    std::optional<double> f_3db_hz;      // empty when the grid never brackets -3 dB
    double peaking_db = 0.0;             // max(0, max magnitude above DC)
};

// f_grid must be ascending with at least 16 points.
BodeResult bode_analysis(const TiaConfig& cfg, const std::vector<double>& f_grid);

// --- discrete-time realization -------------------------------------------

// Direct form II transposed second-order section.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;  // denominator, a0 = 1
    double s1 = 0.0, s2 = 0.0;

    double step(double x) {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }
    void reset() { s1 = s2 = 0.0; }
    std::complex<double> response(double f_hz, double sample_rate_hz) const;
    void apply(std::vector<double>& x);  // in place, zero initial state
};

// Bilinear mapping of the TIA second-order section, prewarped at the cutoff.
Biquad tia_digital(const TiaConfig& cfg, double sample_rate_hz);
// First-order low/high-pass sections, prewarped at the cutoff.
Biquad first_order_digital(FilterKind kind, double cutoff_hz, double sample_rate_hz);

// Cascade of `spec.order` identical first-order sections times post_gain.
struct FilterChain {
    std::vector<Biquad> sections;
    double gain = 1.0;

    static FilterChain design(const FilterSpec& spec, double sample_rate_hz);
    void apply(std::vector<double>& x);
    std::complex<double> response(double f_hz, double sample_rate_hz) const;
};

struct ClippedTrace {
    std::vector<double> samples;  // volts
    std::size_t clipped = 0;      // samples held at a rail
};

// Difference current through the TIA with hard clipping at the rails.
ClippedTrace tia_convert(std::vector<double> i_diff_a, const TiaConfig& cfg,
                         double sample_rate_hz);

// v(t) = clip(Z * (i2 - i1)); traces must have equal length.
ClippedTrace subtract_and_convert(const std::vector<double>& i1_a,
                                  const std::vector<double>& i2_a, const TiaConfig& cfg,
                                  double sample_rate_hz);

struct DemuxResult {
    std::vector<double> dc;
    std::vector<double> ac;
};

DemuxResult demux(const std::vector<double>& v, const FilterSpec& lpf, const FilterSpec& hpf,
                  double sample_rate_hz);

}  // namespace hdlab::circuit
