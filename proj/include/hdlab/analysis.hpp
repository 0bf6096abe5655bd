#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hdlab/kernels.hpp"

namespace hdlab::analysis {

// One-sided Welch estimate; power is per resolution bandwidth into 50 ohm.
struct PsdEstimate {
    std::vector<double> freqs_hz;
    std::vector<double> power_dbm;
    std::vector<double> psd_v2_hz;
    double rbw_hz = 0.0;
    std::size_t segment_count = 0;
};

// Hann-windowed Welch periodogram average. overlap in [0, 0.9].
PsdEstimate welch_psd(const std::vector<double>& x, double sample_rate_hz,
                      std::size_t segment_len, double overlap,
                      kernels::Exec exec = kernels::Exec::parallel);

// Bin-wise clearance light - dark in dB; grids must match.
std::vector<double> snc_spectrum(const PsdEstimate& light, const PsdEstimate& dark);

// Peak power near f_rep (+/- 2 rbw) of the common-mode spectrum minus the
// same for the difference spectrum, in dB.
double cmrr(const PsdEstimate& cm, const PsdEstimate& diff, double f_rep_hz);

double band_mean_dbm(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz);
double band_power_v2(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz);
double peak_dbm_near(const PsdEstimate& psd, double f0_hz, double half_window_hz);

// Per-pulse integrals; values in volt seconds until calibrated.
struct QuadratureSeries {
    std::vector<double> values;
    std::vector<double> phases_rad;   // empty when the LO phase is unknown
    double slot_period_s = 0.0;
    double calibration_v2s2 = 0.0;    // shot-noise variance reference, 0 = unset
};

QuadratureSeries slot_integrate(const std::vector<double>& x, double sample_rate_hz,
                                double f_rep_hz, double window_fraction = 1.0,
                                double offset_s = 0.0,
                                kernels::Exec exec = kernels::Exec::parallel);

struct SqueezingResult {
    int mode_index = 0;
    double squeezing_db = 0.0;
    double antisqueezing_db = 0.0;
    std::size_t n_slots = 0;
    double statistical_uncertainty_db = 0.0;
};

// Min/max-phase-bin variance against a vacuum shot reference taken under
// identical LO settings. Without phases a sliding-window variance track is
// used instead of phase bins.
SqueezingResult squeezing_from_series(const QuadratureSeries& series,
                                      const QuadratureSeries& shot_ref, int mode_index,
                                      int phase_bins = 64);

struct EfficiencyEstimate {
    double eta_elec = 0.0;
    bool noise_dominated = false;  // output variance fell below the dark variance
};

EfficiencyEstimate electronic_efficiency_from_variances(double dark_var, double output_var);
EfficiencyEstimate electronic_efficiency_from_psd(const PsdEstimate& dark,
                                                  const PsdEstimate& light, double f_lo_hz,
                                                  double f_hi_hz);

double sample_variance(const std::vector<double>& x);  // unbiased, mean removed

}  // namespace hdlab::analysis
