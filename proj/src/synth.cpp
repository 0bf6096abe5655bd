#include "hdlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "hdlab/analysis.hpp"
#include "hdlab/constants.hpp"
#include "hdlab/errors.hpp"
#include "hdlab/quantum.hpp"

namespace hdlab::synth {

using constants::pi;

namespace stream_id {
// Substream bases; opts.stream_salt shifts all of them so separate runs
// (shot reference, per-mode channels) stay statistically independent.
constexpr std::uint64_t quad = 0x51;
constexpr std::uint64_t noise_diff = 0x100;
constexpr std::uint64_t noise_cm = 0x103;
}  // namespace stream_id

std::vector<std::string> SqueezingSpectrum::validate() const {
    if (modes.empty()) throw ConfigError("squeezing spectrum must contain at least one mode");
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (i > 0 && modes[i].index <= modes[i - 1].index) {
            throw ConfigError("spectrum mode indices must be unique and ascending");
        }
        quantum::QuadratureState st{modes[i].squeezing_db, modes[i].antisqueezing_db, 0.0, 0.0,
                                    0.0};
        st.validate();
        if (i > 0 && (std::abs(modes[i].squeezing_db) > std::abs(modes[i - 1].squeezing_db) ||
                      std::abs(modes[i].antisqueezing_db) >
                          std::abs(modes[i - 1].antisqueezing_db))) {
            warnings.push_back("spectrum magnitude grows from mode " +
                               std::to_string(modes[i - 1].index) + " to mode " +
                               std::to_string(modes[i].index));
        }
    }
    return warnings;
}

const SpectrumMode& SqueezingSpectrum::mode(int index) const {
    for (const auto& m : modes) {
        if (m.index == index) return m;
    }
    throw ConfigError("selected mode " + std::to_string(index) + " not present in spectrum");
}

void SourceConfig::validate() const {
    if (!(rep_rate_hz > 0.0)) throw ConfigError("rep_rate_hz must be > 0");
    if (!(pulse_fwhm_s > 0.0 && pulse_fwhm_s < 1.0 / rep_rate_hz)) {
        throw ConfigError("pulse_fwhm_s must lie in (0, 1/rep_rate)");
    }
    if (!(lo_pulse_energy_j >= 0.0)) throw ConfigError("lo_pulse_energy_j must be >= 0");
    if (!(lo_wavelength_m > 0.0)) throw ConfigError("lo_wavelength_m must be > 0");
    if (!(eta_mod >= 0.0 && eta_mod <= 1.0)) throw ConfigError("eta_mod must be in [0,1]");
    spectrum.validate();
    spectrum.mode(selected_mode);  // throws when out of bounds
    if (phase_scan.mode == PhaseScanMode::ramp && !std::isfinite(phase_scan.rate_rad_per_s)) {
        throw ConfigError("phase ramp rate must be finite");
    }
}

double SourceConfig::lo_photon_number() const {
    return lo_pulse_energy_j * lo_wavelength_m / (constants::planck * constants::light_speed);
}

void ImperfectionConfig::validate() const {
    if (!(pd_gain_mismatch >= 0.0)) throw ConfigError("pd_gain_mismatch must be >= 0");
    if (!(electronic_noise_rms_v >= 0.0)) {
        throw ConfigError("electronic_noise_rms_v must be >= 0");
    }
    if (target_snc_db.has_value()) {
        if (electronic_noise_rms_v != 0.0) {
            throw ConfigError("set either electronic_noise_rms_v or target_snc_db, not both");
        }
        if (!(*target_snc_db > 0.0)) throw ConfigError("target_snc_db must be > 0");
    }
}

ShotModel shot_model(const SourceConfig& source, const circuit::DetectorConfig& detector) {
    ShotModel m;
    m.eta_pd = quantum::pd_quantum_efficiency(detector.tia.photodiode.responsivity_a_per_w,
                                              source.lo_wavelength_m);
    m.eta_quantum = source.eta_mod * m.eta_pd * m.eta_pd;
    m.photon_number = source.lo_photon_number();
    m.gain_c = constants::elementary_charge * std::sqrt(m.eta_pd * m.photon_number);
    m.diode_charge_c = constants::elementary_charge * m.eta_pd * m.photon_number / 2.0;
    return m;
}

double phase_at_slot(const SourceConfig& source, std::size_t k) {
    if (source.phase_scan.mode == PhaseScanMode::static_phase) {
        return source.phase_scan.start_rad;
    }
    const double t = (static_cast<double>(k) + 0.5) / source.rep_rate_hz;
    return source.phase_scan.start_rad + source.phase_scan.rate_rad_per_s * t;
}

std::vector<double> pulse_envelope(double fwhm_s, double sample_rate_hz,
                                   std::size_t samples_per_slot) {
    const double dt = 1.0 / sample_rate_hz;
    const double sigma = fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double center = 0.5 * static_cast<double>(samples_per_slot) * dt;
    std::vector<double> env(samples_per_slot);
    double sum = 0.0;
    for (std::size_t n = 0; n < samples_per_slot; ++n) {
        const double t = (static_cast<double>(n) + 0.5) * dt;
        env[n] = std::exp(-0.5 * (t - center) * (t - center) / (sigma * sigma));
        sum += env[n];
    }
    // unit time integral within the slot, so slot sums recover charge exactly
    const double norm = 1.0 / (sum * dt);
    for (double& v : env) v *= norm;
    return env;
}

double envelope_transfer(const std::vector<double>& envelope, double sample_rate_hz,
                         double f_hz) {
    const double dt = 1.0 / sample_rate_hz;
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < envelope.size(); ++n) {
        acc += envelope[n] * std::polar(dt, -2.0 * pi * f_hz * static_cast<double>(n) * dt);
    }
    return std::abs(acc);
}

namespace {

struct SlotGeometry {
    std::size_t spp = 0;
    std::size_t n_slots = 0;
};

SlotGeometry slot_geometry(const SourceConfig& source, const SynthOptions& opts) {
    if (!(opts.sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
    if (!(opts.duration_s * source.rep_rate_hz >= 10.0 - 1e-9)) {
        throw ConfigError("duration must cover at least 10 pulse slots");
    }
    const double spp_f = opts.sample_rate_hz / source.rep_rate_hz;
    const double spp_r = std::round(spp_f);
    if (spp_r < 2.0 || std::abs(spp_f - spp_r) > 1e-9 * spp_r) {
        throw ConfigError("sample rate must be an integer multiple (>= 2) of the rep rate");
    }
    const double slots_f = opts.duration_s * source.rep_rate_hz;
    const double slots_r = std::round(slots_f);
    if (std::abs(slots_f - slots_r) > 1e-6 * std::max(1.0, slots_r)) {
        throw ConfigError("duration must span an integer number of pulse slots");
    }
    return {static_cast<std::size_t>(spp_r), static_cast<std::size_t>(slots_r)};
}

const std::vector<std::string> kBalancedChannels{"pd1", "pd2", "diff_ac", "diff_dc"};
const std::vector<std::string> kCommonModeChannels{"cm", "cm_ac", "cm_dc"};

void check_channels(const std::vector<std::string>& requested,
                    const std::vector<std::string>& valid) {
    if (requested.empty()) throw ConfigError("at least one channel must be requested");
    for (const auto& ch : requested) {
        if (std::find(valid.begin(), valid.end(), ch) == valid.end()) {
            std::string names;
            for (const auto& v : valid) names += (names.empty() ? "" : ", ") + v;
            throw ConfigError("unknown channel '" + ch + "' (valid: " + names + ")");
        }
    }
}

bool wants(const std::vector<std::string>& requested, const std::string& name) {
    return std::find(requested.begin(), requested.end(), name) != requested.end();
}

// Per-slot quadrature outcomes in charge units.
std::vector<double> draw_difference_charge(const SourceConfig& source, const ShotModel& model,
                                           const rng::CounterStream& quad_stream,
                                           std::size_t n_slots, kernels::Exec exec) {
    const SpectrumMode& md = source.spectrum.mode(source.selected_mode);
    const quantum::QuadratureState state{md.squeezing_db, md.antisqueezing_db, 0.0, 0.0, 0.0};
    std::vector<double> dq(n_slots);
    const bool is_static = source.phase_scan.mode == PhaseScanMode::static_phase;
    const double static_sd =
        std::sqrt(quantum::apply_loss(quantum::quadrature_variance(state, phase_at_slot(source, 0)),
                                      model.eta_quantum));
    auto body = [&](std::size_t k) {
        double sd = static_sd;
        if (!is_static) {
            const double v = quantum::quadrature_variance(state, phase_at_slot(source, k));
            sd = std::sqrt(quantum::apply_loss(v, model.eta_quantum));
        }
        dq[k] = model.gain_c * sd * quad_stream.normal(k);
    };
    if (exec == kernels::Exec::serial) {
        for (std::size_t k = 0; k < n_slots; ++k) body(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_slots); ++k) {
            body(static_cast<std::size_t>(k));
        }
    }
    return dq;
}

void emit_tia_channels(TraceBuffer& tb, std::vector<double> current,
                       const circuit::DetectorConfig& detector, double fs,
                       const std::string& raw_name, const std::string& ac_name,
                       const std::string& dc_name, const std::vector<std::string>& requested) {
    auto conv = circuit::tia_convert(std::move(current), detector.tia, fs);
    if (!dc_name.empty() && wants(requested, dc_name)) {
        std::vector<double> dc = conv.samples;
        circuit::FilterChain::design(detector.lpf, fs).apply(dc);
        tb.add_channel(dc_name, std::move(dc), conv.clipped);
    }
    const bool want_raw = !raw_name.empty() && wants(requested, raw_name);
    const bool want_ac = !ac_name.empty() && wants(requested, ac_name);
    if (want_ac) {
        std::vector<double> ac = want_raw ? conv.samples : std::move(conv.samples);
        circuit::FilterChain::design(detector.hpf, fs).apply(ac);
        tb.add_channel(ac_name, std::move(ac), conv.clipped);
    }
    if (want_raw) {
        tb.add_channel(raw_name, std::move(conv.samples), conv.clipped);
    }
}

}  // namespace

TraceBuffer synthesize(const SourceConfig& source, const circuit::DetectorConfig& detector,
                       const ImperfectionConfig& imperfections, const SynthOptions& opts) {
    source.validate();
    detector.validate();
    imperfections.validate();
    if (imperfections.target_snc_db.has_value()) {
        throw ConfigError("target_snc_db must be resolved by noise calibration before synthesis");
    }
    check_channels(opts.channels, kBalancedChannels);

    const auto geom = slot_geometry(source, opts);
    const double fs = opts.sample_rate_hz;
    const std::size_t n = geom.n_slots * geom.spp;
    const ShotModel model = shot_model(source, detector);
    const auto env = pulse_envelope(source.pulse_fwhm_s, fs, geom.spp);
    const double eps = imperfections.pd_gain_mismatch;
    const double sigma_i = imperfections.electronic_noise_rms_v /
                           detector.tia.feedback_resistance_ohm;

    const rng::CounterStream quad_stream(imperfections.rng_seed,
                                         stream_id::quad + opts.stream_salt);
    const auto dq = draw_difference_charge(source, model, quad_stream, geom.n_slots, opts.exec);

    TraceBuffer tb;
    tb.sample_rate_hz = fs;

    // channels are emitted in the requested order
    for (const auto& name : opts.channels) {
        if (tb.has_channel(name)) continue;
        if (name == "diff_ac" || name == "diff_dc") {
            std::vector<double> amp(geom.n_slots);
            for (std::size_t k = 0; k < geom.n_slots; ++k) {
                amp[k] = eps * model.diode_charge_c + (1.0 + eps / 2.0) * dq[k];
            }
            std::vector<double> cur(n, 0.0);
            kernels::add_pulse_train(amp, env, geom.spp, 0, cur, opts.exec);
            if (sigma_i > 0.0) {
                kernels::add_white_noise(
                    rng::CounterStream(imperfections.rng_seed,
                                       stream_id::noise_diff + opts.stream_salt),
                    sigma_i, cur, opts.exec);
            }
            emit_tia_channels(tb, std::move(cur), detector, fs, "", "diff_ac", "diff_dc",
                              opts.channels);
        } else if (name == "pd1" || name == "pd2") {
            const bool is_pd2 = name == "pd2";
            std::vector<double> amp(geom.n_slots);
            for (std::size_t k = 0; k < geom.n_slots; ++k) {
                const double q = model.diode_charge_c + (is_pd2 ? 0.5 : -0.5) * dq[k];
                amp[k] = is_pd2 ? (1.0 + eps) * q : -q;
            }
            std::vector<double> cur(n, 0.0);
            kernels::add_pulse_train(amp, env, geom.spp, 0, cur, opts.exec);
            auto conv = circuit::tia_convert(std::move(cur), detector.tia, fs);
            tb.add_channel(name, std::move(conv.samples), conv.clipped);
        }
    }
    tb.validate();
    return tb;
}

TraceBuffer synthesize_common_mode(const SourceConfig& source,
                                   const circuit::DetectorConfig& detector,
                                   const ImperfectionConfig& imperfections,
                                   const SynthOptions& opts, CommonModeDiode which) {
    source.validate();
    detector.validate();
    imperfections.validate();
    if (imperfections.target_snc_db.has_value()) {
        throw ConfigError("target_snc_db must be resolved by noise calibration before synthesis");
    }
    check_channels(opts.channels, kCommonModeChannels);

    const auto geom = slot_geometry(source, opts);
    const double fs = opts.sample_rate_hz;
    const std::size_t n = geom.n_slots * geom.spp;
    const ShotModel model = shot_model(source, detector);
    const auto env = pulse_envelope(source.pulse_fwhm_s, fs, geom.spp);
    const double sigma_i = imperfections.electronic_noise_rms_v /
                           detector.tia.feedback_resistance_ohm;

    // Full LO on the chosen diode: the subtraction node sees the entire
    // common-mode pulse train, signed by which input it enters.
    const double scale = which == CommonModeDiode::pd2
                             ? (1.0 + imperfections.pd_gain_mismatch)
                             : -1.0;
    const double q_cm = 2.0 * model.diode_charge_c;

    const rng::CounterStream quad_stream(imperfections.rng_seed,
                                         stream_id::quad + opts.stream_salt);
    std::vector<double> amp(geom.n_slots);
    for (std::size_t k = 0; k < geom.n_slots; ++k) {
        amp[k] = scale * (q_cm + model.gain_c * quad_stream.normal(k));
    }
    std::vector<double> cur(n, 0.0);
    kernels::add_pulse_train(amp, env, geom.spp, 0, cur, opts.exec);
    if (sigma_i > 0.0) {
        kernels::add_white_noise(rng::CounterStream(imperfections.rng_seed,
                                                    stream_id::noise_cm + opts.stream_salt),
                                 sigma_i, cur, opts.exec);
    }

    TraceBuffer tb;
    tb.sample_rate_hz = fs;
    emit_tia_channels(tb, std::move(cur), detector, fs, "cm", "cm_ac", "cm_dc", opts.channels);
    tb.validate();
    return tb;
}

NoiseCalibration calibrate_noise_to_snc(const SourceConfig& source,
                                        const circuit::DetectorConfig& detector,
                                        double target_snc_db, std::uint64_t rng_seed,
                                        double reference_freq_hz, double span_hz,
                                        double sample_rate_hz) {
    if (!(target_snc_db > 0.0)) throw DomainError("target SNC must be > 0 dB");
    source.validate();
    detector.validate();

    SourceConfig vac = source;
    vac.spectrum = SqueezingSpectrum::vacuum();
    vac.selected_mode = 0;
    vac.phase_scan = {};

    const ShotModel model = shot_model(vac, detector);
    if (!(model.photon_number > 0.0)) {
        return {false, 0.0, 0.0, "LO energy is zero; there is no shot noise to clear"};
    }

    SynthOptions opts;
    opts.sample_rate_hz = sample_rate_hz;
    const std::size_t cal_slots = std::max<std::size_t>(20000, 10);
    opts.duration_s = static_cast<double>(cal_slots) / vac.rep_rate_hz;
    opts.channels = {"diff_ac"};
    const auto geom = slot_geometry(vac, opts);

    const auto env = pulse_envelope(vac.pulse_fwhm_s, sample_rate_hz, geom.spp);
    const double g_ref = envelope_transfer(env, sample_rate_hz, reference_freq_hz);
    const double denom = std::pow(10.0, target_snc_db / 10.0) - 1.0;
    const double psd_shot_a2 =
        2.0 * model.gain_c * model.gain_c * vac.rep_rate_hz * g_ref * g_ref;
    double sigma_i = std::sqrt(psd_shot_a2 * (sample_rate_hz / 2.0) / denom);

    const std::size_t nseg = 1u << 14;
    const double f_lo = reference_freq_hz - span_hz / 2.0;
    const double f_hi = reference_freq_hz + span_hz / 2.0;

    SourceConfig dark = vac;
    dark.lo_pulse_energy_j = 0.0;

    double achieved = 0.0;
    for (int iter = 0; iter < 3; ++iter) {
        ImperfectionConfig imp;
        imp.electronic_noise_rms_v = sigma_i * detector.tia.feedback_resistance_ohm;
        imp.rng_seed = rng_seed + static_cast<std::uint64_t>(iter);

        const auto light = synthesize(vac, detector, imp, opts);
        if (light.saturated()) {
            return {false, imp.electronic_noise_rms_v, 0.0,
                    "LO power drives the TIA into the rails before the target is reached"};
        }
        const auto dark_tb = synthesize(dark, detector, imp, opts);

        const auto psd_l = analysis::welch_psd(light.channel("diff_ac"), light.sample_rate_hz,
                                               nseg, 0.5, opts.exec);
        const auto psd_d = analysis::welch_psd(dark_tb.channel("diff_ac"),
                                               dark_tb.sample_rate_hz, nseg, 0.5, opts.exec);
        achieved = analysis::band_mean_dbm(psd_l, f_lo, f_hi) -
                   analysis::band_mean_dbm(psd_d, f_lo, f_hi);
        if (std::abs(achieved - target_snc_db) <= 0.25) {
            return {true, imp.electronic_noise_rms_v, achieved, ""};
        }
        const double measured_denom = std::pow(10.0, achieved / 10.0) - 1.0;
        if (!(measured_denom > 0.0)) {
            return {false, imp.electronic_noise_rms_v, achieved,
                    "measured clearance is non-positive; target unreachable"};
        }
        sigma_i *= std::sqrt(measured_denom / denom);
    }
    return {true, sigma_i * detector.tia.feedback_resistance_ohm, achieved, ""};
}

}  // namespace hdlab::synth
