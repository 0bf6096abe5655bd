#include "hdlab/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "hdlab/constants.hpp"
#include "hdlab/errors.hpp"

namespace hdlab::circuit {

using constants::pi;

void TiaConfig::validate() const {
    opamp.validate();
    photodiode.validate();
    if (!(feedback_resistance_ohm > 0.0)) throw DomainError("feedback resistance must be > 0");
    if (!(feedback_capacitance_f >= 0.0)) throw DomainError("feedback capacitance must be >= 0");
    if (!(rail_voltage_v > 0.0)) throw DomainError("rail voltage must be > 0");
}

double TiaConfig::total_capacitance_f() const {
    return feedback_capacitance_f + 2.0 * photodiode.capacitance_f +
           opamp.input_capacitance_f;
}

void FilterSpec::validate() const {
    if (!(cutoff_hz > 0.0)) throw DomainError("filter cutoff must be > 0");
    if (order < 1) throw DomainError("filter order must be >= 1");
    if (!(post_gain > 0.0)) throw DomainError("filter post gain must be > 0");
}

void DetectorConfig::validate() const {
    tia.validate();
    lpf.validate();
    hpf.validate();
    if (lpf.kind != FilterKind::lowpass) throw ConfigError("demux dc branch must be low-pass");
    if (hpf.kind != FilterKind::highpass) throw ConfigError("demux ac branch must be high-pass");
}

double tia_cutoff(const TiaConfig& cfg) {
    cfg.validate();
    const double c_tot = cfg.total_capacitance_f();
    if (!(c_tot > 0.0)) throw DomainError("total capacitance must be > 0");
    return std::sqrt(cfg.opamp.gbp_hz /
                     (2.0 * pi * cfg.feedback_resistance_ohm * c_tot));
}

double design_feedback_capacitance(const components::OpAmpSpec& opamp,
                                   const components::PhotodiodeSpec& pd, double r_f_ohm) {
    opamp.validate();
    pd.validate();
    if (!(r_f_ohm > 0.0)) throw DomainError("feedback resistance must be > 0");
    return std::sqrt((2.0 * pd.capacitance_f + opamp.input_capacitance_f) /
                     (pi * opamp.gbp_hz * r_f_ohm));
}

namespace {

// Denominator 1 + a s + b s^2 of the closed-loop transimpedance.
void tia_poly(const TiaConfig& cfg, double& a, double& b) {
    const double w_g = 2.0 * pi * cfg.opamp.gbp_hz;
    a = cfg.feedback_resistance_ohm * cfg.feedback_capacitance_f + 1.0 / w_g;
    b = cfg.feedback_resistance_ohm * cfg.total_capacitance_f() / w_g;
}

}  // namespace

std::complex<double> tia_transfer(const TiaConfig& cfg, double f_hz) {
    if (!(f_hz >= 0.0)) throw DomainError("frequency must be >= 0");
    double a, b;
    tia_poly(cfg, a, b);
    const std::complex<double> s(0.0, 2.0 * pi * f_hz);
    return cfg.feedback_resistance_ohm / (1.0 + a * s + b * s * s);
}

BodeResult bode_analysis(const TiaConfig& cfg, const std::vector<double>& f_grid) {
    if (f_grid.size() < 16) throw DomainError("bode grid needs at least 16 points");
    if (!std::is_sorted(f_grid.begin(), f_grid.end())) {
        throw DomainError("bode grid must be ascending");
    }
    BodeResult out;
    out.magnitude_db.reserve(f_grid.size());
    const double dc = std::abs(tia_transfer(cfg, 0.0));
    for (double f : f_grid) {
        out.magnitude_db.push_back(20.0 * std::log10(std::abs(tia_transfer(cfg, f)) / dc));
    }
    double peak = 0.0;
    for (double m : out.magnitude_db) peak = std::max(peak, m);
    out.peaking_db = peak;
    // first -3 dB crossing, linearly interpolated
    for (std::size_t i = 1; i < f_grid.size(); ++i) {
        const double m0 = out.magnitude_db[i - 1];
        const double m1 = out.magnitude_db[i];
        if (m0 >= -3.0 && m1 < -3.0) {
            const double t = (-3.0 - m0) / (m1 - m0);
            out.f_3db_hz = f_grid[i - 1] + t * (f_grid[i] - f_grid[i - 1]);
            break;
        }
    }
    return out;
}

std::complex<double> Biquad::response(double f_hz, double sample_rate_hz) const {
    const double w = 2.0 * pi * f_hz / sample_rate_hz;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

void Biquad::apply(std::vector<double>& x) {
    reset();
    for (double& v : x) v = step(v);
}

namespace {

double prewarp_gain(double f_c_hz, double fs_hz) {
    if (!(f_c_hz > 0.0) || f_c_hz >= 0.49 * fs_hz) {
        throw ConfigError("filter cutoff must sit below half the sample rate");
    }
    const double w = 2.0 * pi * f_c_hz;
    return w / std::tan(w / (2.0 * fs_hz));
}

}  // namespace

Biquad tia_digital(const TiaConfig& cfg, double sample_rate_hz) {
    double a, b;
    tia_poly(cfg, a, b);
    const double k = prewarp_gain(tia_cutoff(cfg), sample_rate_hz);
    // 1/(1 + a s + b s^2) with s = k (1 - z^-1)/(1 + z^-1)
    const double d0 = 1.0 + a * k + b * k * k;
    Biquad q;
    q.b0 = cfg.feedback_resistance_ohm / d0;
    q.b1 = 2.0 * q.b0;
    q.b2 = q.b0;
    q.a1 = (2.0 - 2.0 * b * k * k) / d0;
    q.a2 = (1.0 - a * k + b * k * k) / d0;
    return q;
}

Biquad first_order_digital(FilterKind kind, double cutoff_hz, double sample_rate_hz) {
    const double k = prewarp_gain(cutoff_hz, sample_rate_hz);
    const double wc = 2.0 * pi * cutoff_hz;
    const double d0 = k + wc;
    Biquad q;
    if (kind == FilterKind::lowpass) {
        q.b0 = wc / d0;
        q.b1 = wc / d0;
    } else {
        q.b0 = k / d0;
        q.b1 = -k / d0;
    }
    q.b2 = 0.0;
    q.a1 = (wc - k) / d0;
    q.a2 = 0.0;
    return q;
}

FilterChain FilterChain::design(const FilterSpec& spec, double sample_rate_hz) {
    spec.validate();
    FilterChain chain;
    chain.gain = spec.post_gain;
    for (int i = 0; i < spec.order; ++i) {
        chain.sections.push_back(first_order_digital(spec.kind, spec.cutoff_hz, sample_rate_hz));
    }
    return chain;
}

void FilterChain::apply(std::vector<double>& x) {
    for (auto& s : sections) s.apply(x);
    if (gain != 1.0) {
        for (double& v : x) v *= gain;
    }
}

std::complex<double> FilterChain::response(double f_hz, double sample_rate_hz) const {
    std::complex<double> h = gain;
    for (const auto& s : sections) h *= s.response(f_hz, sample_rate_hz);
    return h;
}

ClippedTrace tia_convert(std::vector<double> i_diff_a, const TiaConfig& cfg,
                         double sample_rate_hz) {
    cfg.validate();
    Biquad z = tia_digital(cfg, sample_rate_hz);
    ClippedTrace out;
    out.samples = std::move(i_diff_a);
    z.apply(out.samples);
    const double rail = cfg.rail_voltage_v;
    for (double& v : out.samples) {
        if (v > rail) {
            v = rail;
            ++out.clipped;
        } else if (v < -rail) {
            v = -rail;
            ++out.clipped;
        }
    }
    return out;
}

ClippedTrace subtract_and_convert(const std::vector<double>& i1_a,
                                  const std::vector<double>& i2_a, const TiaConfig& cfg,
                                  double sample_rate_hz) {
    if (i1_a.size() != i2_a.size()) {
        throw ShapeError("photocurrent traces differ in length");
    }
    std::vector<double> diff(i1_a.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = i2_a[i] - i1_a[i];
    return tia_convert(std::move(diff), cfg, sample_rate_hz);
}

DemuxResult demux(const std::vector<double>& v, const FilterSpec& lpf, const FilterSpec& hpf,
                  double sample_rate_hz) {
    if (lpf.kind != FilterKind::lowpass) throw ConfigError("demux dc branch must be low-pass");
    if (hpf.kind != FilterKind::highpass) throw ConfigError("demux ac branch must be high-pass");
    DemuxResult out;
    out.dc = v;
    out.ac = v;
    FilterChain::design(lpf, sample_rate_hz).apply(out.dc);
    FilterChain::design(hpf, sample_rate_hz).apply(out.ac);
    return out;
}

}  // namespace hdlab::circuit
