#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdlab/circuit.hpp"
#include "hdlab/kernels.hpp"
#include "hdlab/trace.hpp"

namespace hdlab::synth {

enum class PhaseScanMode { static_phase, ramp };

struct PhaseScan {
    PhaseScanMode mode = PhaseScanMode::static_phase;
    double start_rad = 0.0;
    double rate_rad_per_s = 0.0;  // ramp mode only
};

struct SpectrumMode {
    int index = 0;
    double squeezing_db = 0.0;
    double antisqueezing_db = 0.0;
};

// Per-mode squeezing levels of the source, ordered by mode index.
struct SqueezingSpectrum {
    std::vector<SpectrumMode> modes{{0, 0.0, 0.0}};

    // Throws on duplicate/descending indices; returns soft warnings
    // (e.g. magnitudes that grow with mode order).
    std::vector<std::string> validate() const;
    const SpectrumMode& mode(int index) const;

    static SqueezingSpectrum vacuum() { return {}; }
};

struct SourceConfig {
    double rep_rate_hz = 1e8;
    double pulse_fwhm_s = 1e-9;      // electrical width after the photodiode
    double lo_pulse_energy_j = 4e-11;
    double lo_wavelength_m = 1.560e-6;
    PhaseScan phase_scan;
    SqueezingSpectrum spectrum;
    int selected_mode = 0;
    double eta_mod = 1.0;

    void validate() const;
    double lo_photon_number() const;  // per pulse
};

struct ImperfectionConfig {
    double pd_gain_mismatch = 0.0;        // relative responsivity imbalance epsilon
    double electronic_noise_rms_v = 0.0;  // white level referred to the TIA output
    std::optional<double> target_snc_db;  // exclusive with electronic_noise_rms_v
    std::uint64_t rng_seed = 1;

    void validate() const;
};

struct SynthOptions {
    double sample_rate_hz = 1e10;
    double duration_s = 1e-3;
    std::vector<std::string> channels{"diff_ac", "diff_dc"};
    kernels::Exec exec = kernels::Exec::parallel;
    std::uint64_t stream_salt = 0;  // decorrelates otherwise-identical runs
};

// Derived quantities of the shot-noise model, all per pulse.
struct ShotModel {
    double eta_pd = 1.0;        // photodiode quantum efficiency at the LO wavelength
    double eta_quantum = 1.0;   // eta_mod * eta_pd^2
    double photon_number = 0.0;
    double gain_c = 0.0;        // e sqrt(eta_pd N), charge per unit quadrature
    double diode_charge_c = 0.0;  // mean charge per diode per pulse, balanced
};

ShotModel shot_model(const SourceConfig& source, const circuit::DetectorConfig& detector);

// LO phase at the center of slot k.
double phase_at_slot(const SourceConfig& source, std::size_t k);

// Gaussian electrical pulse envelope, normalized to unit time integral over
// one slot (so a slot integral recovers injected charge exactly).
std::vector<double> pulse_envelope(double fwhm_s, double sample_rate_hz,
                                   std::size_t samples_per_slot);

// |DTFT| of the discrete envelope at frequency f (1 at f = 0).
double envelope_transfer(const std::vector<double>& envelope, double sample_rate_hz,
                         double f_hz);

// Balanced run. Channels on request: pd1, pd2 (single-diode TIA outputs,
// noiseless), diff_ac, diff_dc (difference output with electronic noise).
TraceBuffer synthesize(const SourceConfig& source, const circuit::DetectorConfig& detector,
                       const ImperfectionConfig& imperfections, const SynthOptions& opts);

enum class CommonModeDiode { pd1, pd2 };

// Subtraction test: the full LO pulse train on one diode only. Channels:
// cm (raw TIA output), cm_ac, cm_dc.
TraceBuffer synthesize_common_mode(const SourceConfig& source,
                                   const circuit::DetectorConfig& detector,
                                   const ImperfectionConfig& imperfections,
                                   const SynthOptions& opts, CommonModeDiode which);

struct NoiseCalibration {
    bool feasible = false;
    double noise_rms_v = 0.0;
    double achieved_snc_db = 0.0;
    std::string message;
};

// Electronic-noise level that puts the vacuum-run clearance at target_snc_db
// when measured at reference_freq_hz (band mean over span_hz).
NoiseCalibration calibrate_noise_to_snc(const SourceConfig& source,
                                        const circuit::DetectorConfig& detector,
                                        double target_snc_db, std::uint64_t rng_seed = 1,
                                        double reference_freq_hz = 50e6,
                                        double span_hz = 10e6, double sample_rate_hz = 1e10);

}  // namespace hdlab::synth
