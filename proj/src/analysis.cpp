#include "hdlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdlab/constants.hpp"
#include "hdlab/errors.hpp"

namespace hdlab::analysis {

using constants::pi;

namespace {

constexpr double kDbmFloor = -400.0;
constexpr double kLoadOhm = 50.0;

double to_dbm(double psd_v2_hz, double rbw_hz) {
    const double watts = psd_v2_hz * rbw_hz / kLoadOhm;
    if (!(watts > 1e-43)) return kDbmFloor;
    return 10.0 * std::log10(watts / 1e-3);
}

struct BinRange {
    std::size_t lo;
    std::size_t hi;  // inclusive
};

BinRange bins_in(const PsdEstimate& psd, double f_lo, double f_hi) {
    if (psd.freqs_hz.empty()) throw ShapeError("empty spectrum");
    if (f_lo > f_hi) std::swap(f_lo, f_hi);
    if (f_hi < psd.freqs_hz.front() || f_lo > psd.freqs_hz.back()) {
        throw DomainError("requested band lies outside the spectrum grid");
    }
    auto lo_it = std::lower_bound(psd.freqs_hz.begin(), psd.freqs_hz.end(), f_lo);
    auto hi_it = std::upper_bound(psd.freqs_hz.begin(), psd.freqs_hz.end(), f_hi);
    std::size_t lo = static_cast<std::size_t>(lo_it - psd.freqs_hz.begin());
    std::size_t hi = hi_it == psd.freqs_hz.begin()
                         ? 0
                         : static_cast<std::size_t>(hi_it - psd.freqs_hz.begin()) - 1;
    if (lo >= psd.freqs_hz.size() || hi < lo) {
        // band narrower than one bin: take the nearest bin
        const double fc = 0.5 * (f_lo + f_hi);
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
            const double d = std::abs(psd.freqs_hz[i] - fc);
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        return {best, best};
    }
    return {lo, hi};
}

}  // namespace

PsdEstimate welch_psd(const std::vector<double>& x, double sample_rate_hz,
                      std::size_t segment_len, double overlap, kernels::Exec exec) {
    if (x.empty()) throw ShapeError("cannot estimate a spectrum from an empty trace");
    if (segment_len < 16 || segment_len > x.size()) {
        throw ShapeError("welch segment length must be in [16, trace length]");
    }
    if (!(overlap >= 0.0 && overlap <= 0.9)) {
        throw DomainError("welch overlap must be in [0, 0.9]");
    }
    if (!(sample_rate_hz > 0.0)) throw ShapeError("sample rate must be > 0");

    const std::size_t nfft = segment_len;
    std::vector<double> window(nfft);
    double wsum = 0.0, w2sum = 0.0;
    for (std::size_t n = 0; n < nfft; ++n) {
        window[n] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(n) /
                                          static_cast<double>(nfft)));
        wsum += window[n];
        w2sum += window[n] * window[n];
    }
    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::lround(static_cast<double>(nfft) * (1.0 - overlap))));
    const std::size_t n_segments = (x.size() - nfft) / hop + 1;

    const auto acc = kernels::welch_accumulate(x, window, hop, n_segments, exec);

    PsdEstimate out;
    out.segment_count = n_segments;
    out.rbw_hz = sample_rate_hz * w2sum / (wsum * wsum);  // Hann ENBW
    const std::size_t bins = nfft / 2 + 1;
    out.freqs_hz.resize(bins);
    out.psd_v2_hz.resize(bins);
    out.power_dbm.resize(bins);
    const double df = sample_rate_hz / static_cast<double>(nfft);
    const double scale = 1.0 / (sample_rate_hz * w2sum * static_cast<double>(n_segments));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = (k == 0) || (nfft % 2 == 0 && k == bins - 1);
        out.freqs_hz[k] = df * static_cast<double>(k);
        out.psd_v2_hz[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
        out.power_dbm[k] = to_dbm(out.psd_v2_hz[k], out.rbw_hz);
    }
    return out;
}

std::vector<double> snc_spectrum(const PsdEstimate& light, const PsdEstimate& dark) {
    if (light.freqs_hz.size() != dark.freqs_hz.size()) {
        throw ShapeError("light and dark spectra have different grids");
    }
    for (std::size_t i = 0; i < light.freqs_hz.size(); ++i) {
        if (light.freqs_hz[i] != dark.freqs_hz[i]) {
            throw ShapeError("light and dark spectra have different grids");
        }
    }
    std::vector<double> snc(light.freqs_hz.size());
    for (std::size_t i = 0; i < snc.size(); ++i) {
        snc[i] = light.power_dbm[i] - dark.power_dbm[i];
    }
    return snc;
}

double peak_dbm_near(const PsdEstimate& psd, double f0_hz, double half_window_hz) {
    const auto r = bins_in(psd, f0_hz - half_window_hz, f0_hz + half_window_hz);
    double peak = kDbmFloor;
    for (std::size_t i = r.lo; i <= r.hi; ++i) peak = std::max(peak, psd.power_dbm[i]);
    return peak;
}

double cmrr(const PsdEstimate& cm, const PsdEstimate& diff, double f_rep_hz) {
    if (cm.freqs_hz.empty() || diff.freqs_hz.empty()) throw ShapeError("empty spectrum");
    if (f_rep_hz < cm.freqs_hz.front() || f_rep_hz > cm.freqs_hz.back() ||
        f_rep_hz < diff.freqs_hz.front() || f_rep_hz > diff.freqs_hz.back()) {
        throw DomainError("repetition rate lies outside the spectrum grid");
    }
    const double p_cm = peak_dbm_near(cm, f_rep_hz, 2.0 * cm.rbw_hz);
    const double p_diff = peak_dbm_near(diff, f_rep_hz, 2.0 * diff.rbw_hz);
    return p_cm - p_diff;
}

double band_mean_dbm(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz) {
    const auto r = bins_in(psd, f_lo_hz, f_hi_hz);
    double acc = 0.0;
    for (std::size_t i = r.lo; i <= r.hi; ++i) acc += psd.psd_v2_hz[i];
    const double mean = acc / static_cast<double>(r.hi - r.lo + 1);
    return to_dbm(mean, psd.rbw_hz);
}

double band_power_v2(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz) {
    const auto r = bins_in(psd, f_lo_hz, f_hi_hz);
    const double df = psd.freqs_hz.size() > 1 ? psd.freqs_hz[1] - psd.freqs_hz[0] : psd.rbw_hz;
    double acc = 0.0;
    for (std::size_t i = r.lo; i <= r.hi; ++i) acc += psd.psd_v2_hz[i];
    return acc * df;
}

QuadratureSeries slot_integrate(const std::vector<double>& x, double sample_rate_hz,
                                double f_rep_hz, double window_fraction, double offset_s,
                                kernels::Exec exec) {
    if (x.empty()) throw ShapeError("cannot integrate an empty trace");
    if (!(sample_rate_hz > 0.0 && f_rep_hz > 0.0)) {
        throw DomainError("sample rate and repetition rate must be > 0");
    }
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw DomainError("integration window must be a fraction in (0, 1]");
    }
    const double spp_f = sample_rate_hz / f_rep_hz;
    const double spp_r = std::round(spp_f);
    if (spp_r < 1.0 || std::abs(spp_f - spp_r) > 1e-9 * spp_r) {
        throw ShapeError(
            "sample rate is not an integer multiple of the repetition rate; resample required");
    }
    const std::size_t spp = static_cast<std::size_t>(spp_r);
    const std::size_t window = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(window_fraction * static_cast<double>(spp))), 1,
        spp);
    const auto offset = static_cast<std::size_t>(std::lround(offset_s * sample_rate_hz));
    if (offset + window > spp) {
        throw ShapeError("window offset pushes the integration outside the pulse slot");
    }
    const std::size_t n_slots = x.size() / spp;
    if (n_slots == 0) throw ShapeError("trace shorter than one pulse slot");

    QuadratureSeries out;
    out.slot_period_s = static_cast<double>(spp) / sample_rate_hz;
    out.values.resize(n_slots);
    kernels::slot_sums(x, spp, offset, window, out.values, exec);
    const double dt = 1.0 / sample_rate_hz;
    for (double& v : out.values) v *= dt;
    return out;
}

double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw DomainError("variance needs at least two samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(x.size() - 1);
}

namespace {

struct VarTrack {
    double min_var = std::numeric_limits<double>::infinity();
    double max_var = 0.0;
    std::size_t n_eff = 0;  // population of the minimum-variance bin
};

VarTrack phase_binned_track(const QuadratureSeries& s, int bins) {
    std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> sum2(static_cast<std::size_t>(bins), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
    const double two_pi = 2.0 * pi;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double ph = std::fmod(s.phases_rad[i], two_pi);
        if (ph < 0.0) ph += two_pi;
        auto b = static_cast<std::size_t>(ph / two_pi * bins);
        if (b >= static_cast<std::size_t>(bins)) b = static_cast<std::size_t>(bins) - 1;
        sum[b] += s.values[i];
        sum2[b] += s.values[i] * s.values[i];
        ++count[b];
    }
    VarTrack t;
    for (std::size_t b = 0; b < static_cast<std::size_t>(bins); ++b) {
        if (count[b] < 2) continue;
        const double n = static_cast<double>(count[b]);
        const double var = (sum2[b] - sum[b] * sum[b] / n) / (n - 1.0);
        if (var < t.min_var) {
            t.min_var = var;
            t.n_eff = count[b];
        }
        t.max_var = std::max(t.max_var, var);
    }
    if (t.n_eff == 0) throw DomainError("no phase bin holds enough slots for a variance");
    return t;
}

VarTrack sliding_track(const QuadratureSeries& s) {
    const std::size_t n = s.values.size();
    const std::size_t window = std::max<std::size_t>(100, n / 64);
    const std::size_t stride = std::max<std::size_t>(1, window / 2);
    VarTrack t;
    for (std::size_t start = 0; start + window <= n; start += stride) {
        std::vector<double> chunk(s.values.begin() + static_cast<std::ptrdiff_t>(start),
                                  s.values.begin() + static_cast<std::ptrdiff_t>(start + window));
        const double var = sample_variance(chunk);
        if (var < t.min_var) {
            t.min_var = var;
            t.n_eff = window;
        }
        t.max_var = std::max(t.max_var, var);
    }
    if (t.n_eff == 0) throw DomainError("series shorter than one variance window");
    return t;
}

}  // namespace

SqueezingResult squeezing_from_series(const QuadratureSeries& series,
                                      const QuadratureSeries& shot_ref, int mode_index,
                                      int phase_bins) {
    if (series.values.size() < 1000 || shot_ref.values.size() < 1000) {
        throw DomainError("squeezing estimation needs at least 1000 slots per series");
    }
    if (!series.phases_rad.empty() && series.phases_rad.size() != series.values.size()) {
        throw ShapeError("phase annotation length differs from the series length");
    }
    if (phase_bins < 1) throw DomainError("phase bin count must be >= 1");

    const double shot_var = sample_variance(shot_ref.values);
    if (!(shot_var > 0.0)) throw DomainError("shot-noise reference variance is zero");

    const VarTrack t = series.phases_rad.empty() ? sliding_track(series)
                                                 : phase_binned_track(series, phase_bins);

    SqueezingResult r;
    r.mode_index = mode_index;
    r.squeezing_db = 10.0 * std::log10(t.min_var / shot_var);
    r.antisqueezing_db = 10.0 * std::log10(t.max_var / shot_var);
    r.n_slots = series.values.size();
    r.statistical_uncertainty_db =
        10.0 * std::log10(1.0 + std::sqrt(2.0 / static_cast<double>(t.n_eff)));
    return r;
}

EfficiencyEstimate electronic_efficiency_from_variances(double dark_var, double output_var) {
    if (!(dark_var >= 0.0) || !(output_var >= 0.0)) {
        throw DomainError("variances must be non-negative");
    }
    if (output_var <= dark_var || output_var == 0.0) {
        return {0.0, true};
    }
    return {1.0 - dark_var / output_var, false};
}

EfficiencyEstimate electronic_efficiency_from_psd(const PsdEstimate& dark,
                                                  const PsdEstimate& light, double f_lo_hz,
                                                  double f_hi_hz) {
    const double dark_var = band_power_v2(dark, f_lo_hz, f_hi_hz);
    const double output_var = band_power_v2(light, f_lo_hz, f_hi_hz);
    return electronic_efficiency_from_variances(dark_var, output_var);
}

}  // namespace hdlab::analysis
