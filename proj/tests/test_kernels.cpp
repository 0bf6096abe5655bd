#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <vector>

#include "hdlab/circuit.hpp"
#include "hdlab/config.hpp"
#include "hdlab/kernels.hpp"
#include "hdlab/rng.hpp"
#include "hdlab/synth.hpp"
#include "hdlab/trace_io.hpp"

using namespace hdlab;
using kernels::Exec;

TEST_CASE("counter rng: order and thread independence by construction") {
    const rng::CounterStream s(123, 7);
    // same counter, same value, any call order
    const double a = s.normal(41);
    const double b = s.normal(40);
    double z0, z1;
    s.normal_pair(20, z0, z1);
    CHECK(a == z1);
    CHECK(b == z0);

    // distinct streams decorrelate
    const rng::CounterStream t(123, 8);
    CHECK(s.bits(0) != t.bits(0));

    // uniform range
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = s.uniform(i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("counter rng: normal moments") {
    const rng::CounterStream s(2024, 1);
    const std::size_t n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = s.normal(i);
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / double(n);
    const double var = sum2 / double(n) - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("kernels: serial and parallel paths are bit-identical") {
    const std::size_t n_slots = 3000;
    const std::size_t spp = 100;
    const std::size_t n = n_slots * spp;
    const rng::CounterStream amps(9, 3);
    std::vector<double> amplitudes(n_slots);
    for (std::size_t k = 0; k < n_slots; ++k) amplitudes[k] = amps.normal(k);
    const auto env = synth::pulse_envelope(1e-9, 1e10, spp);

    std::vector<double> a(n, 0.0), b(n, 0.0);
    kernels::add_pulse_train(amplitudes, env, spp, 0, a, Exec::serial);
    kernels::add_pulse_train(amplitudes, env, spp, 0, b, Exec::parallel);
    CHECK(a == b);

    const rng::CounterStream noise(9, 4);
    kernels::add_white_noise(noise, 1e-3, a, Exec::serial);
    kernels::add_white_noise(noise, 1e-3, b, Exec::parallel);
    CHECK(a == b);

    std::vector<double> sa(n_slots), sb(n_slots);
    kernels::slot_sums(a, spp, 10, 80, sa, Exec::serial);
    kernels::slot_sums(b, spp, 10, 80, sb, Exec::parallel);
    CHECK(sa == sb);

    std::vector<double> window(4096);
    for (std::size_t i = 0; i < window.size(); ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * constants::pi * double(i) / 4096.0));
    }
    const std::size_t hop = 2048;
    const std::size_t n_segments = (n - window.size()) / hop + 1;
    const auto wa = kernels::welch_accumulate(a, window, hop, n_segments, Exec::serial);
    const auto wb = kernels::welch_accumulate(b, window, hop, n_segments, Exec::parallel);
    CHECK(wa == wb);
}

TEST_CASE("synthesis is identical for any thread count") {
    auto cfg = config::ExperimentConfig::defaults();
    cfg.analysis.duration_s = 2e-5;
    cfg.source.spectrum.modes = {{0, -3.0, 3.0}};
    cfg.imperfections.electronic_noise_rms_v = 1e-4;
    cfg.imperfections.pd_gain_mismatch = 1e-3;

    const auto det = cfg.resolve_detector();
    synth::SynthOptions opts;
    opts.sample_rate_hz = cfg.analysis.sample_rate_hz;
    opts.duration_s = cfg.analysis.duration_s;
    opts.channels = {"pd1", "pd2", "diff_ac", "diff_dc"};

    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = synth::synthesize(cfg.source, det, cfg.imperfections, opts);
    omp_set_num_threads(max_threads);
    const auto many = synth::synthesize(cfg.source, det, cfg.imperfections, opts);

    CHECK(trace_io::payload_sha256(one) == trace_io::payload_sha256(many));
    for (std::size_t c = 0; c < one.samples.size(); ++c) {
        CHECK(one.samples[c] == many.samples[c]);
    }

    // serial execution flag must agree with the parallel default too
    synth::SynthOptions serial_opts = opts;
    serial_opts.exec = Exec::serial;
    const auto ser = synth::synthesize(cfg.source, det, cfg.imperfections, serial_opts);
    CHECK(trace_io::payload_sha256(ser) == trace_io::payload_sha256(many));
}

TEST_CASE("kernel shape validation") {
    std::vector<double> out(100, 0.0);
    std::vector<double> amp(2, 1.0);
    std::vector<double> env(60, 1.0);
    CHECK_THROWS_AS(kernels::add_pulse_train(amp, env, 50, 0, out, Exec::serial), ShapeError);
    std::vector<double> sums(3);
    CHECK_THROWS_AS(kernels::slot_sums(out, 50, 0, 50, sums, Exec::serial), ShapeError);
}
