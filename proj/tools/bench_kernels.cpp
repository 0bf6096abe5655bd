// Timing comparison of the serial reference kernels against the OpenMP
// variants, on workloads shaped like a 1 ms, 10 GS/s acquisition.

#include <omp.h>

#include <cstdio>
#include <vector>

#include "hdlab/kernels.hpp"
#include "hdlab/rng.hpp"

using hdlab::kernels::Exec;

namespace {

struct Timing {
    double serial_s;
    double parallel_s;
};

template <typename F>
double time_best_of(F&& fn, int reps = 3) {
    double best = 1e99;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const char* name, const Timing& t) {
    std::printf("%-18s serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n", name,
                t.serial_s * 1e3, t.parallel_s * 1e3, t.serial_s / t.parallel_s);
}

}  // namespace

int main() {
    constexpr std::size_t n_slots = 100000;
    constexpr std::size_t spp = 100;
    constexpr std::size_t n = n_slots * spp;

    std::printf("threads: %d, samples: %zu (%zu slots x %zu)\n\n", omp_get_max_threads(), n,
                n_slots, spp);

    const hdlab::rng::CounterStream amp_stream(42, 1);
    std::vector<double> amplitudes(n_slots);
    for (std::size_t k = 0; k < n_slots; ++k) amplitudes[k] = amp_stream.normal(k);
    std::vector<double> envelope(spp, 0.01);

    std::vector<double> buf(n, 0.0);
    Timing pulse{};
    pulse.serial_s = time_best_of([&] {
        std::fill(buf.begin(), buf.end(), 0.0);
        hdlab::kernels::add_pulse_train(amplitudes, envelope, spp, 0, buf, Exec::serial);
    });
    pulse.parallel_s = time_best_of([&] {
        std::fill(buf.begin(), buf.end(), 0.0);
        hdlab::kernels::add_pulse_train(amplitudes, envelope, spp, 0, buf, Exec::parallel);
    });
    report("pulse train", pulse);

    const hdlab::rng::CounterStream noise_stream(42, 2);
    Timing noise{};
    noise.serial_s = time_best_of([&] {
        std::fill(buf.begin(), buf.end(), 0.0);
        hdlab::kernels::add_white_noise(noise_stream, 1e-4, buf, Exec::serial);
    });
    noise.parallel_s = time_best_of([&] {
        std::fill(buf.begin(), buf.end(), 0.0);
        hdlab::kernels::add_white_noise(noise_stream, 1e-4, buf, Exec::parallel);
    });
    report("white noise", noise);

    std::vector<double> sums(n_slots);
    Timing slots{};
    slots.serial_s = time_best_of(
        [&] { hdlab::kernels::slot_sums(buf, spp, 0, spp, sums, Exec::serial); });
    slots.parallel_s = time_best_of(
        [&] { hdlab::kernels::slot_sums(buf, spp, 0, spp, sums, Exec::parallel); });
    report("slot integrate", slots);

    const std::size_t nfft = 16384;
    std::vector<double> window(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * 3.14159265358979 * double(i) / double(nfft)));
    }
    const std::size_t hop = nfft / 2;
    const std::size_t n_segments = (n - nfft) / hop + 1;
    Timing welch{};
    welch.serial_s = time_best_of(
        [&] { hdlab::kernels::welch_accumulate(buf, window, hop, n_segments, Exec::serial); });
    welch.parallel_s = time_best_of(
        [&] { hdlab::kernels::welch_accumulate(buf, window, hop, n_segments, Exec::parallel); });
    report("welch psd", welch);

    return 0;
}
