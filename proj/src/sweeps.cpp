#include "hdlab/sweeps.hpp"

#include <algorithm>
#include <cmath>

#include "hdlab/errors.hpp"

namespace hdlab::analysis {

LinearityResult linearity_sweep(const synth::SourceConfig& source,
                                const circuit::DetectorConfig& detector,
                                const synth::ImperfectionConfig& imperfections,
                                const std::vector<double>& power_grid_w,
                                double analysis_freq_hz, double span_hz,
                                const synth::SynthOptions& opts, std::size_t segment_len) {
    if (power_grid_w.size() < 4) throw DomainError("power sweep needs at least 4 points");
    if (!std::is_sorted(power_grid_w.begin(), power_grid_w.end())) {
        throw DomainError("power grid must be ascending");
    }

    LinearityResult out;
    out.power_w = power_grid_w;
    synth::SynthOptions run_opts = opts;
    run_opts.channels = {"diff_ac"};

    for (double p_w : power_grid_w) {
        if (!(p_w >= 0.0)) throw DomainError("optical power must be >= 0");
        synth::SourceConfig src = source;
        src.lo_pulse_energy_j = p_w / source.rep_rate_hz;
        const auto tb = synth::synthesize(src, detector, imperfections, run_opts);
        const auto psd = welch_psd(tb.channel("diff_ac"), tb.sample_rate_hz, segment_len, 0.5,
                                   run_opts.exec);
        out.noise_dbm.push_back(
            band_mean_dbm(psd, analysis_freq_hz - span_hz / 2.0, analysis_freq_hz + span_hz / 2.0));
        out.clipped.push_back(tb.clipped_count("diff_ac"));
    }

    std::vector<std::size_t> unsat;
    for (std::size_t i = 0; i < out.power_w.size(); ++i) {
        if (out.clipped[i] == 0) unsat.push_back(i);
    }
    if (unsat.size() < 2) {
        out.all_saturated = true;
        return out;
    }

    // least squares in the linearized (mW) domain over the unsaturated points
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(unsat.size());
    auto to_mw = [](double dbm) { return std::pow(10.0, dbm / 10.0); };
    for (std::size_t i : unsat) {
        const double x = out.power_w[i] * 1e3;
        const double y = to_mw(out.noise_dbm[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw DomainError("degenerate power grid");
    out.slope_mw_per_mw = (n * sxy - sx * sy) / denom;
    out.intercept_mw = (sy - out.slope_mw_per_mw * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i : unsat) {
        const double y = to_mw(out.noise_dbm[i]);
        const double f = out.slope_mw_per_mw * out.power_w[i] * 1e3 + out.intercept_mw;
        ss_res += (y - f) * (y - f);
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    out.residual_db.resize(out.power_w.size());
    for (std::size_t i = 0; i < out.power_w.size(); ++i) {
        const double f = out.slope_mw_per_mw * out.power_w[i] * 1e3 + out.intercept_mw;
        out.residual_db[i] = f > 0.0
                                 ? std::abs(out.noise_dbm[i] - 10.0 * std::log10(f))
                                 : std::numeric_limits<double>::infinity();
        if (!out.knee_w && out.residual_db[i] > 1.0) out.knee_w = out.power_w[i];
    }
    return out;
}

}  // namespace hdlab::analysis
