#include "hdlab/cli_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hdlab/analysis.hpp"
#include "hdlab/errors.hpp"
#include "hdlab/quantum.hpp"
#include "hdlab/sweeps.hpp"
#include "hdlab/trace_io.hpp"

namespace hdlab::cli {

using nlohmann::json;

namespace {

// Stream salts keep the auxiliary acquisitions statistically independent of
// the main balanced run under one seed.
constexpr std::uint64_t kSaltCm = 0x10000;
constexpr std::uint64_t kSaltDark = 0x20000;
constexpr std::uint64_t kSaltShot = 0x30000;
constexpr std::uint64_t kSaltModeBase = 0x40000;

std::string num_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<double> log_grid(double f_lo, double f_hi, std::size_t n) {
    std::vector<double> g(n);
    const double r = std::log(f_hi / f_lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = f_lo * std::exp(r * static_cast<double>(i));
    return g;
}

struct TiaFigures {
    double c_f_designed = 0.0;
    double f_tia_hz = 0.0;
    double f_3db_hz = 0.0;
    double peaking_db = 0.0;
};

TiaFigures tia_figures(const circuit::TiaConfig& tia) {
    TiaFigures f;
    f.c_f_designed = circuit::design_feedback_capacitance(tia.opamp, tia.photodiode,
                                                          tia.feedback_resistance_ohm);
    f.f_tia_hz = circuit::tia_cutoff(tia);
    const auto bode = circuit::bode_analysis(tia, log_grid(1e6, 4e9, 768));
    f.f_3db_hz = bode.f_3db_hz.value_or(0.0);
    f.peaking_db = bode.peaking_db;
    return f;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        if (!fs::exists(target.parent_path(), ec)) {
            throw IoError("output directory does not exist: " + target.parent_path().string());
        }
    }
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path);
    }
}

std::string json_sidecar_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

DesignReport cmd_design(const config::ExperimentConfig& cfg) {
    cfg.validate();
    const auto cat = cfg.catalog();
    const auto det = cfg.resolve_detector(cat);
    const auto fig = tia_figures(det.tia);

    // peak LO power before the mean pulse current reaches the diode rating
    const double sigma = cfg.source.pulse_fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double envelope_peak = 1.0 / (sigma * std::sqrt(2.0 * constants::pi));
    const double max_lo_power_w = 2.0 * det.tia.photodiode.saturation_current_a *
                                  cfg.source.rep_rate_hz /
                                  (det.tia.photodiode.responsivity_a_per_w * envelope_peak);

    json j;
    j["config_sha256"] = cfg.sha256();
    j["tia"] = {
        {"opamp", det.tia.opamp.name},
        {"photodiode", det.tia.photodiode.name},
        {"feedback_resistance_ohm", det.tia.feedback_resistance_ohm},
        {"feedback_capacitance_f", det.tia.feedback_capacitance_f},
        {"feedback_capacitance_designed_f", fig.c_f_designed},
        {"f_tia_hz", fig.f_tia_hz},
        {"f_3db_hz", fig.f_3db_hz},
        {"peaking_db", fig.peaking_db},
        {"peaking_warning", fig.peaking_db > 0.5},
        {"max_lo_power_w", max_lo_power_w},
    };

    std::ostringstream text;
    text << "detector design: " << det.tia.opamp.name << " + " << det.tia.photodiode.name
         << ", R_F = " << num_str(det.tia.feedback_resistance_ohm) << " ohm\n";
    text << "  configured C_F : " << num_str(det.tia.feedback_capacitance_f * 1e12) << " pF\n";
    text << "  designed   C_F : " << num_str(fig.c_f_designed * 1e12) << " pF\n";
    text << "  cutoff estimate: " << num_str(fig.f_tia_hz / 1e6) << " MHz\n";
    text << "  model f_3dB    : " << num_str(fig.f_3db_hz / 1e6) << " MHz\n";
    text << "  peaking        : " << num_str(fig.peaking_db) << " dB"
         << (fig.peaking_db > 0.5 ? "  ** warning: response not flat; increase C_F **" : "")
         << "\n";
    text << "  max LO power   : " << num_str(max_lo_power_w * 1e3)
         << " mW (diode current rating)\n";
    text << "\nop-amp catalog comparison (designed C_F at this R_F):\n";

    json comparison = json::array();
    for (const auto& oa : cat.opamps) {
        circuit::TiaConfig alt = det.tia;
        alt.opamp = oa;
        alt.feedback_capacitance_f =
            circuit::design_feedback_capacitance(oa, det.tia.photodiode,
                                                 det.tia.feedback_resistance_ohm);
        const auto alt_fig = tia_figures(alt);
        comparison.push_back({{"opamp", oa.name},
                              {"gbp_hz", oa.gbp_hz},
                              {"feedback_capacitance_designed_f", alt.feedback_capacitance_f},
                              {"f_tia_hz", alt_fig.f_tia_hz},
                              {"f_3db_hz", alt_fig.f_3db_hz},
                              {"peaking_db", alt_fig.peaking_db}});
        text << "  " << oa.name << ": C_F = " << num_str(alt.feedback_capacitance_f * 1e12)
             << " pF, cutoff = " << num_str(alt_fig.f_tia_hz / 1e6)
             << " MHz, f_3dB = " << num_str(alt_fig.f_3db_hz / 1e6)
             << " MHz, peaking = " << num_str(alt_fig.peaking_db) << " dB\n";
    }
    j["catalog_comparison"] = comparison;

    // Bode table of the configured detector
    const auto grid = log_grid(1e6, 4e9, 96);
    const auto bode = circuit::bode_analysis(det.tia, grid);
    j["bode"] = {{"freq_hz", grid}, {"magnitude_db", bode.magnitude_db}};

    return {text.str(), j};
}

namespace {

const std::vector<std::string> kBalanced{"pd1", "pd2", "diff_ac", "diff_dc"};
const std::vector<std::string> kCommon{"cm", "cm_ac", "cm_dc"};

bool in(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

synth::ImperfectionConfig resolve_noise(const config::ExperimentConfig& cfg,
                                        const circuit::DetectorConfig& det,
                                        double* calibrated_rms) {
    synth::ImperfectionConfig imp = cfg.imperfections;
    if (imp.target_snc_db) {
        const auto cal = synth::calibrate_noise_to_snc(
            cfg.source, det, *imp.target_snc_db, imp.rng_seed, cfg.analysis.reference_freq_hz,
            cfg.analysis.span_hz, cfg.analysis.sample_rate_hz);
        if (!cal.feasible) {
            throw ConfigError("noise calibration infeasible: " + cal.message);
        }
        imp.electronic_noise_rms_v = cal.noise_rms_v;
        imp.target_snc_db.reset();
        if (calibrated_rms) *calibrated_rms = cal.noise_rms_v;
    }
    return imp;
}

}  // namespace

SimulateResult cmd_simulate(const config::ExperimentConfig& cfg, const std::string& out_path,
                            std::optional<std::uint64_t> seed_override,
                            std::optional<std::vector<std::string>> channels_override,
                            synth::CommonModeDiode cm_diode) {
    config::ExperimentConfig c = cfg;
    if (seed_override) c.imperfections.rng_seed = *seed_override;
    c.validate();  // rejects window/duration mismatches before any synthesis

    std::vector<std::string> requested =
        channels_override.value_or(std::vector<std::string>{"diff_ac", "diff_dc"});

    // expand the "modes" token in place
    std::vector<std::string> channels;
    for (const auto& ch : requested) {
        if (ch == "modes") {
            for (const auto& m : c.source.spectrum.modes) {
                channels.push_back("m" + std::to_string(m.index) + "_ac");
            }
        } else {
            channels.push_back(ch);
        }
    }

    const auto det = c.resolve_detector();
    SimulateResult res;
    res.out_path = out_path;
    res.seed = c.imperfections.rng_seed;
    const auto imp = resolve_noise(c, det, &res.calibrated_noise_rms_v);

    synth::SynthOptions base;
    base.sample_rate_hz = c.analysis.sample_rate_hz;
    base.duration_s = c.analysis.duration_s;

    std::map<std::string, std::pair<std::vector<double>, std::size_t>> produced;

    auto grab = [&](const TraceBuffer& tb, const std::string& from, const std::string& to) {
        produced[to] = {tb.channel(from), tb.clipped_count(from)};
    };

    std::vector<std::string> balanced;
    for (const auto& ch : channels) {
        if (in(kBalanced, ch)) balanced.push_back(ch);
    }
    if (!balanced.empty()) {
        synth::SynthOptions o = base;
        o.channels = balanced;
        const auto tb = synth::synthesize(c.source, det, imp, o);
        for (const auto& ch : balanced) grab(tb, ch, ch);
    }

    std::vector<std::string> common;
    for (const auto& ch : channels) {
        if (in(kCommon, ch)) common.push_back(ch);
    }
    if (!common.empty()) {
        synth::SynthOptions o = base;
        o.channels = common;
        o.stream_salt = kSaltCm;
        const auto tb = synth::synthesize_common_mode(c.source, det, imp, o, cm_diode);
        for (const auto& ch : common) grab(tb, ch, ch);
    }

    if (in(channels, "dark_ac")) {
        synth::SourceConfig dark = c.source;
        dark.lo_pulse_energy_j = 0.0;
        synth::SynthOptions o = base;
        o.channels = {"diff_ac"};
        o.stream_salt = kSaltDark;
        grab(synth::synthesize(dark, det, imp, o), "diff_ac", "dark_ac");
    }
    if (in(channels, "shot_ac")) {
        synth::SourceConfig shot = c.source;
        shot.spectrum = synth::SqueezingSpectrum::vacuum();
        shot.selected_mode = 0;
        synth::SynthOptions o = base;
        o.channels = {"diff_ac"};
        o.stream_salt = kSaltShot;
        grab(synth::synthesize(shot, det, imp, o), "diff_ac", "shot_ac");
    }
    for (const auto& m : c.source.spectrum.modes) {
        const std::string name = "m" + std::to_string(m.index) + "_ac";
        if (!in(channels, name)) continue;
        synth::SourceConfig src = c.source;
        src.selected_mode = m.index;
        synth::SynthOptions o = base;
        o.channels = {"diff_ac"};
        o.stream_salt = kSaltModeBase + 0x100u * static_cast<std::uint64_t>(m.index);
        grab(synth::synthesize(src, det, imp, o), "diff_ac", name);
    }

    TraceBuffer out;
    out.sample_rate_hz = base.sample_rate_hz;
    for (const auto& ch : channels) {
        auto it = produced.find(ch);
        if (it == produced.end()) {
            throw ConfigError("unknown channel '" + ch +
                              "' (valid: pd1, pd2, diff_ac, diff_dc, cm, cm_ac, cm_dc, "
                              "dark_ac, shot_ac, m<i>_ac, modes)");
        }
        out.add_channel(ch, std::move(it->second.first), it->second.second);
    }

    trace_io::write_trace(out, out_path);
    res.n_samples = out.n_samples();
    res.channels = channels;
    res.payload_sha256 = trace_io::payload_sha256(out);
    res.saturated = out.saturated();

    json clipped = json::object();
    for (const auto& ch : channels) clipped[ch] = out.clipped_count(ch);
    res.summary = {
        {"config_sha256", c.sha256()},         {"seed", res.seed},
        {"n_samples_per_channel", res.n_samples}, {"channels", channels},
        {"payload_sha256", res.payload_sha256},   {"saturated", res.saturated},
        {"clipped_samples", clipped},
        {"calibrated_noise_rms_v", res.calibrated_noise_rms_v},
    };
    return res;
}

AnalyzeMode parse_analyze_mode(const std::string& name) {
    if (name == "psd") return AnalyzeMode::psd;
    if (name == "snc") return AnalyzeMode::snc;
    if (name == "cmrr") return AnalyzeMode::cmrr;
    if (name == "squeezing") return AnalyzeMode::squeezing;
    throw ConfigError("unknown analyze mode '" + name + "' (psd, snc, cmrr, squeezing)");
}

namespace {

std::string csv_header(const std::string& mode, const std::string& config_sha,
                       const std::string& columns) {
    std::ostringstream os;
    os << "# hdlab analyze mode=" << mode << "\n";
    os << "# config_sha256=" << config_sha << "\n";
    os << columns << "\n";
    return os.str();
}

analysis::QuadratureSeries integrate_with_phases(const std::vector<double>& ch,
                                                 const config::ExperimentConfig& cfg) {
    auto series = analysis::slot_integrate(ch, cfg.analysis.sample_rate_hz,
                                           cfg.source.rep_rate_hz, cfg.analysis.slot_window,
                                           cfg.analysis.slot_offset_s);
    series.phases_rad.resize(series.values.size());
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        series.phases_rad[k] = synth::phase_at_slot(cfg.source, k);
    }
    return series;
}

}  // namespace

AnalyzeResult cmd_analyze(const std::string& trace_path, const config::ExperimentConfig& cfg,
                          AnalyzeMode mode,
                          std::optional<std::vector<std::string>> channels_override) {
    cfg.validate();
    const auto tb = trace_io::read_trace(trace_path);
    const std::string sha = cfg.sha256();
    AnalyzeResult res;
    res.summary["config_sha256"] = sha;
    res.summary["trace"] = trace_path;

    const double fs = tb.sample_rate_hz;
    const auto seg = cfg.analysis.segment_len;
    const auto ov = cfg.analysis.overlap;

    switch (mode) {
        case AnalyzeMode::psd: {
            std::string name;
            if (channels_override && !channels_override->empty()) {
                name = channels_override->front();
            } else if (tb.has_channel("diff_ac")) {
                name = "diff_ac";
            } else if (tb.n_channels() == 1) {
                name = tb.channel_names.front();
            } else {
                throw ChannelError("psd mode needs a diff_ac channel or --channels NAME");
            }
            const auto psd = analysis::welch_psd(tb.channel(name), fs, seg, ov);
            std::ostringstream csv;
            csv << csv_header("psd", sha, "freq_hz,power_dbm");
            for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
                csv << num_str(psd.freqs_hz[i]) << "," << num_str(psd.power_dbm[i]) << "\n";
            }
            res.csv = csv.str();
            res.summary["mode"] = "psd";
            res.summary["channel"] = name;
            res.summary["rbw_hz"] = psd.rbw_hz;
            res.summary["segment_count"] = psd.segment_count;
            res.summary["band_mean_dbm"] = analysis::band_mean_dbm(
                psd, cfg.analysis.reference_freq_hz - cfg.analysis.span_hz / 2.0,
                cfg.analysis.reference_freq_hz + cfg.analysis.span_hz / 2.0);
            break;
        }
        case AnalyzeMode::snc: {
            if (!tb.has_channel("diff_ac") || !tb.has_channel("dark_ac")) {
                throw ChannelError("snc mode needs diff_ac and dark_ac channels");
            }
            const auto light = analysis::welch_psd(tb.channel("diff_ac"), fs, seg, ov);
            const auto dark = analysis::welch_psd(tb.channel("dark_ac"), fs, seg, ov);
            const auto snc = analysis::snc_spectrum(light, dark);
            std::ostringstream csv;
            csv << csv_header("snc", sha, "freq_hz,light_dbm,dark_dbm,snc_db");
            for (std::size_t i = 0; i < snc.size(); ++i) {
                csv << num_str(light.freqs_hz[i]) << "," << num_str(light.power_dbm[i]) << ","
                    << num_str(dark.power_dbm[i]) << "," << num_str(snc[i]) << "\n";
            }
            res.csv = csv.str();
            const double f_lo = cfg.analysis.reference_freq_hz - cfg.analysis.span_hz / 2.0;
            const double f_hi = cfg.analysis.reference_freq_hz + cfg.analysis.span_hz / 2.0;
            const double snc_ref = analysis::band_mean_dbm(light, f_lo, f_hi) -
                                   analysis::band_mean_dbm(dark, f_lo, f_hi);
            res.summary["mode"] = "snc";
            res.summary["snc_db_at_reference"] = snc_ref;
            res.summary["eta_elec"] =
                snc_ref > 0.0 ? quantum::electronic_efficiency_from_snc(snc_ref) : 0.0;
            break;
        }
        case AnalyzeMode::cmrr: {
            if (!tb.has_channel("cm_ac")) {
                throw ChannelError("cmrr mode needs a common-mode channel (cm_ac)");
            }
            if (!tb.has_channel("diff_ac")) {
                throw ChannelError("cmrr mode needs a difference channel (diff_ac)");
            }
            const auto cm = analysis::welch_psd(tb.channel("cm_ac"), fs, seg, ov);
            const auto diff = analysis::welch_psd(tb.channel("diff_ac"), fs, seg, ov);
            const double f_rep = cfg.source.rep_rate_hz;
            const double value = analysis::cmrr(cm, diff, f_rep);
            std::ostringstream csv;
            csv << csv_header("cmrr", sha, "f_rep_hz,cm_peak_dbm,diff_peak_dbm,cmrr_db");
            csv << num_str(f_rep) << "," << num_str(analysis::peak_dbm_near(cm, f_rep, 2 * cm.rbw_hz))
                << "," << num_str(analysis::peak_dbm_near(diff, f_rep, 2 * diff.rbw_hz)) << ","
                << num_str(value) << "\n";
            res.csv = csv.str();
            res.summary["mode"] = "cmrr";
            res.summary["cmrr_db"] = value;
            break;
        }
        case AnalyzeMode::squeezing: {
            if (!tb.has_channel("shot_ac")) {
                throw ChannelError("squeezing mode needs a shot_ac vacuum reference channel");
            }
            const auto shot = analysis::slot_integrate(tb.channel("shot_ac"), fs,
                                                       cfg.source.rep_rate_hz,
                                                       cfg.analysis.slot_window,
                                                       cfg.analysis.slot_offset_s);
            std::vector<std::pair<int, std::string>> mode_channels;
            for (const auto& name : tb.channel_names) {
                if (name.size() > 4 && name.front() == 'm' &&
                    name.substr(name.size() - 3) == "_ac") {
                    const std::string digits = name.substr(1, name.size() - 4);
                    if (!digits.empty() &&
                        digits.find_first_not_of("0123456789") == std::string::npos) {
                        mode_channels.emplace_back(std::stoi(digits), name);
                    }
                }
            }
            std::sort(mode_channels.begin(), mode_channels.end());
            if (mode_channels.empty()) {
                if (!tb.has_channel("diff_ac")) {
                    throw ChannelError("squeezing mode needs m<i>_ac channels or diff_ac");
                }
                mode_channels.emplace_back(cfg.source.selected_mode, "diff_ac");
            }
            std::ostringstream csv;
            csv << csv_header("squeezing", sha,
                              "mode_index,squeezing_db,antisqueezing_db,uncertainty_db,n_slots");
            json rows = json::array();
            for (const auto& [idx, name] : mode_channels) {
                auto series = integrate_with_phases(tb.channel(name), cfg);
                series.calibration_v2s2 = analysis::sample_variance(shot.values);
                const auto r = analysis::squeezing_from_series(series, shot, idx,
                                                               cfg.analysis.phase_bins);
                csv << r.mode_index << "," << num_str(r.squeezing_db) << ","
                    << num_str(r.antisqueezing_db) << ","
                    << num_str(r.statistical_uncertainty_db) << "," << r.n_slots << "\n";
                rows.push_back({{"mode_index", r.mode_index},
                                {"squeezing_db", r.squeezing_db},
                                {"antisqueezing_db", r.antisqueezing_db},
                                {"uncertainty_db", r.statistical_uncertainty_db},
                                {"n_slots", r.n_slots}});
            }
            res.csv = csv.str();
            res.summary["mode"] = "squeezing";
            res.summary["results"] = rows;
            break;
        }
    }
    return res;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "power") return SweepAxis::power;
    if (name == "cf") return SweepAxis::cf;
    if (name == "rf") return SweepAxis::rf;
    throw ConfigError("unknown sweep axis '" + name + "' (power, cf, rf)");
}

SweepResult cmd_sweep(const config::ExperimentConfig& cfg, SweepAxis axis,
                      const std::vector<double>& grid) {
    cfg.validate();
    if (grid.size() < 3) throw DomainError("sweep grid needs at least 3 points");
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw DomainError("sweep grid must be ascending");
    }
    const auto det = cfg.resolve_detector();
    const std::string sha = cfg.sha256();
    SweepResult res;
    res.summary["config_sha256"] = sha;

    if (axis == SweepAxis::power) {
        const auto imp = resolve_noise(cfg, det, nullptr);
        synth::SynthOptions opts;
        opts.sample_rate_hz = cfg.analysis.sample_rate_hz;
        opts.duration_s = cfg.analysis.duration_s;
        const auto sweep = analysis::linearity_sweep(
            cfg.source, det, imp, grid, cfg.analysis.reference_freq_hz, cfg.analysis.span_hz,
            opts, cfg.analysis.segment_len);
        std::ostringstream csv;
        csv << "# hdlab sweep axis=power\n# config_sha256=" << sha << "\n";
        csv << "power_w,noise_dbm,residual_db,clipped_samples\n";
        for (std::size_t i = 0; i < sweep.power_w.size(); ++i) {
            csv << num_str(sweep.power_w[i]) << "," << num_str(sweep.noise_dbm[i]) << ","
                << (i < sweep.residual_db.size() ? num_str(sweep.residual_db[i]) : "nan") << ","
                << sweep.clipped[i] << "\n";
        }
        csv << "# slope_mw_per_mw=" << num_str(sweep.slope_mw_per_mw) << "\n";
        csv << "# intercept_mw=" << num_str(sweep.intercept_mw) << "\n";
        csv << "# r_squared=" << num_str(sweep.r_squared) << "\n";
        csv << "# knee_w=" << (sweep.knee_w ? num_str(*sweep.knee_w) : "none") << "\n";
        csv << "# all_saturated=" << (sweep.all_saturated ? "true" : "false") << "\n";
        res.csv = csv.str();
        res.summary["axis"] = "power";
        res.summary["slope_mw_per_mw"] = sweep.slope_mw_per_mw;
        res.summary["intercept_mw"] = sweep.intercept_mw;
        res.summary["r_squared"] = sweep.r_squared;
        res.summary["all_saturated"] = sweep.all_saturated;
        if (sweep.knee_w) {
            res.summary["knee_w"] = *sweep.knee_w;
        } else {
            res.summary["knee_w"] = nullptr;
        }
        return res;
    }

    if (axis == SweepAxis::cf) {
        std::ostringstream csv;
        csv << "# hdlab sweep axis=cf\n# config_sha256=" << sha << "\n";
        csv << "c_f_f,f_tia_hz,f_3db_hz,peaking_db\n";
        json rows = json::array();
        for (double c_f : grid) {
            if (!(c_f >= 0.0)) throw DomainError("feedback capacitance must be >= 0");
            circuit::TiaConfig tia = det.tia;
            tia.feedback_capacitance_f = c_f;
            const double f_tia = circuit::tia_cutoff(tia);
            const auto bode = circuit::bode_analysis(tia, log_grid(1e6, 4e9, 768));
            csv << num_str(c_f) << "," << num_str(f_tia) << ","
                << num_str(bode.f_3db_hz.value_or(0.0)) << "," << num_str(bode.peaking_db)
                << "\n";
            rows.push_back({{"c_f_f", c_f},
                            {"f_tia_hz", f_tia},
                            {"f_3db_hz", bode.f_3db_hz.value_or(0.0)},
                            {"peaking_db", bode.peaking_db}});
        }
        res.csv = csv.str();
        res.summary["axis"] = "cf";
        res.summary["rows"] = rows;
        return res;
    }

    // rf axis: gain/bandwidth trade-off at fixed output-referred noise
    if (!(cfg.imperfections.electronic_noise_rms_v > 0.0) &&
        !cfg.imperfections.target_snc_db.has_value()) {
        throw ConfigError("rf sweep needs electronic noise (rms or target SNC) configured");
    }
    synth::ImperfectionConfig imp = cfg.imperfections;
    {
        // resolve a target once, against the first grid point, then hold sigma fixed
        config::ExperimentConfig first = cfg;
        first.detector.feedback_resistance_ohm = grid.front();
        const auto first_det = first.resolve_detector();
        imp = resolve_noise(first, first_det, nullptr);
    }
    synth::SynthOptions opts;
    opts.sample_rate_hz = cfg.analysis.sample_rate_hz;
    opts.duration_s = std::min(cfg.analysis.duration_s, 2e-4);
    opts.channels = {"diff_ac"};

    std::ostringstream csv;
    csv << "# hdlab sweep axis=rf\n# config_sha256=" << sha << "\n";
    csv << "r_f_ohm,c_f_f,f_tia_hz,f_3db_hz,peaking_db,snc_db\n";
    json rows = json::array();
    for (double r_f : grid) {
        if (!(r_f > 0.0)) throw DomainError("feedback resistance must be > 0");
        config::ExperimentConfig point = cfg;
        point.detector.feedback_resistance_ohm = r_f;
        const auto point_det = point.resolve_detector();
        const double f_tia = circuit::tia_cutoff(point_det.tia);
        const auto bode = circuit::bode_analysis(point_det.tia, log_grid(1e6, 4e9, 768));

        const auto light = synth::synthesize(cfg.source, point_det, imp, opts);
        synth::SourceConfig dark_src = cfg.source;
        dark_src.lo_pulse_energy_j = 0.0;
        const auto dark = synth::synthesize(dark_src, point_det, imp, opts);
        const auto psd_l =
            analysis::welch_psd(light.channel("diff_ac"), light.sample_rate_hz, 16384, 0.5);
        const auto psd_d =
            analysis::welch_psd(dark.channel("diff_ac"), dark.sample_rate_hz, 16384, 0.5);
        const double f_lo = cfg.analysis.reference_freq_hz - cfg.analysis.span_hz / 2.0;
        const double f_hi = cfg.analysis.reference_freq_hz + cfg.analysis.span_hz / 2.0;
        const double snc = analysis::band_mean_dbm(psd_l, f_lo, f_hi) -
                           analysis::band_mean_dbm(psd_d, f_lo, f_hi);

        csv << num_str(r_f) << "," << num_str(point_det.tia.feedback_capacitance_f) << ","
            << num_str(f_tia) << "," << num_str(bode.f_3db_hz.value_or(0.0)) << ","
            << num_str(bode.peaking_db) << "," << num_str(snc) << "\n";
        rows.push_back({{"r_f_ohm", r_f},
                        {"c_f_f", point_det.tia.feedback_capacitance_f},
                        {"f_tia_hz", f_tia},
                        {"f_3db_hz", bode.f_3db_hz.value_or(0.0)},
                        {"peaking_db", bode.peaking_db},
                        {"snc_db", snc}});
    }
    res.csv = csv.str();
    res.summary["axis"] = "rf";
    res.summary["rows"] = rows;
    return res;
}

}  // namespace hdlab::cli
