#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdlab/cli_ops.hpp"
#include "hdlab/errors.hpp"

namespace {

hdlab::config::ExperimentConfig load_config(const std::string& path) {
    return path.empty() ? hdlab::config::ExperimentConfig::defaults()
                        : hdlab::config::ExperimentConfig::load(path);
}

std::vector<std::string> split_list(const std::string& list) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : list) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> split_grid(const std::string& list) {
    std::vector<double> out;
    for (const auto& tok : split_list(list)) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw hdlab::ConfigError("grid entry '" + tok + "' is not a number");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hdlab: pulsed balanced homodyne detection laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_path, channels, trace_path, mode, axis, grid, cm_diode = "pd2";
    std::optional<std::uint64_t> seed;

    auto* design = app.add_subcommand("design", "TIA design report for the configured detector");
    design->add_option("--config", config_path, "experiment config JSON");
    design->add_option("--out", out_path, "write the JSON report here");

    auto* simulate = app.add_subcommand("simulate", "synthesize an oscilloscope trace file");
    simulate->add_option("--config", config_path, "experiment config JSON");
    simulate->add_option("--out", out_path, "output trace path (.hdtr)")->required();
    simulate->add_option("--seed", seed, "override imperfections.rng_seed");
    simulate->add_option("--channels", channels,
                         "comma list: pd1,pd2,diff_ac,diff_dc,cm,cm_ac,cm_dc,dark_ac,shot_ac,"
                         "m<i>_ac,modes");
    simulate->add_option("--cm-diode", cm_diode, "illuminated diode for common-mode channels");

    auto* analyze = app.add_subcommand("analyze", "recover figures of merit from a trace");
    analyze->add_option("trace", trace_path, "input trace file")->required();
    analyze->add_option("--config", config_path, "experiment config JSON");
    analyze->add_option("--mode", mode, "psd | snc | cmrr | squeezing")->required();
    analyze->add_option("--out", out_path, "output CSV path (JSON summary written alongside)")
        ->required();
    analyze->add_option("--channels", channels, "channel selection for psd mode");

    auto* sweep = app.add_subcommand("sweep", "sweep power, C_F or R_F and tabulate metrics");
    sweep->add_option("--config", config_path, "experiment config JSON");
    sweep->add_option("--axis", axis, "power | cf | rf")->required();
    sweep->add_option("--grid", grid, "comma-separated ascending grid values")->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) {
            const auto cfg = load_config(config_path);
            const auto report = hdlab::cli::cmd_design(cfg);
            std::cout << report.text;
            if (!out_path.empty()) {
                hdlab::cli::write_text_atomic(out_path, report.summary.dump(2) + "\n");
                std::cout << "report written to " << out_path << "\n";
            }
        } else if (simulate->parsed()) {
            auto cfg = load_config(config_path);
            std::optional<std::vector<std::string>> ch;
            if (!channels.empty()) ch = split_list(channels);
            auto which = hdlab::synth::CommonModeDiode::pd2;
            if (cm_diode == "pd1") {
                which = hdlab::synth::CommonModeDiode::pd1;
            } else if (cm_diode != "pd2") {
                throw hdlab::ConfigError("--cm-diode must be pd1 or pd2");
            }
            const auto res = hdlab::cli::cmd_simulate(cfg, out_path, seed, ch, which);
            std::cout << "trace: " << res.out_path << "\n";
            std::cout << "seed: " << res.seed << "\n";
            std::cout << "payload sha256: " << res.payload_sha256 << "\n";
            if (res.calibrated_noise_rms_v > 0.0) {
                std::cout << "calibrated noise rms: " << res.calibrated_noise_rms_v << " V\n";
            }
            if (res.saturated) std::cout << "warning: trace saturated (rail clipping)\n";
        } else if (analyze->parsed()) {
            const auto cfg = load_config(config_path);
            std::optional<std::vector<std::string>> ch;
            if (!channels.empty()) ch = split_list(channels);
            const auto res = hdlab::cli::cmd_analyze(trace_path, cfg,
                                                     hdlab::cli::parse_analyze_mode(mode), ch);
            hdlab::cli::write_text_atomic(out_path, res.csv);
            hdlab::cli::write_text_atomic(hdlab::cli::json_sidecar_path(out_path),
                                          res.summary.dump(2) + "\n");
            std::cout << res.summary.dump(2) << "\n";
        } else if (sweep->parsed()) {
            const auto cfg = load_config(config_path);
            const auto res =
                hdlab::cli::cmd_sweep(cfg, hdlab::cli::parse_sweep_axis(axis), split_grid(grid));
            hdlab::cli::write_text_atomic(out_path, res.csv);
            hdlab::cli::write_text_atomic(hdlab::cli::json_sidecar_path(out_path),
                                          res.summary.dump(2) + "\n");
            std::cout << res.summary.dump(2) << "\n";
        }
    } catch (const hdlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
