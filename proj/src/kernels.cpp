#include "hdlab/kernels.hpp"

#include <fftw3.h>

#include <cstring>

#include "hdlab/errors.hpp"

namespace hdlab::kernels {

void add_pulse_train(std::span<const double> slot_amplitudes,
                     std::span<const double> envelope, std::size_t samples_per_slot,
                     std::size_t offset, std::span<double> out, Exec exec) {
    const std::size_t n_slots = slot_amplitudes.size();
    if (envelope.size() + offset > samples_per_slot) {
        throw ShapeError("pulse envelope does not fit inside a slot");
    }
    if (n_slots * samples_per_slot > out.size()) {
        throw ShapeError("output buffer shorter than the pulse train");
    }
    const std::size_t ne = envelope.size();
    if (exec == Exec::serial) {
        for (std::size_t k = 0; k < n_slots; ++k) {
            double* dst = out.data() + k * samples_per_slot + offset;
            const double a = slot_amplitudes[k];
            for (std::size_t n = 0; n < ne; ++n) dst[n] += a * envelope[n];
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_slots); ++k) {
        double* dst = out.data() + static_cast<std::size_t>(k) * samples_per_slot + offset;
        const double a = slot_amplitudes[static_cast<std::size_t>(k)];
        for (std::size_t n = 0; n < ne; ++n) dst[n] += a * envelope[n];
    }
}

void add_white_noise(const rng::CounterStream& stream, double sigma, std::span<double> out,
                     Exec exec) {
    const std::size_t n = out.size();
    const std::size_t pairs = n / 2;
    auto body = [&](std::size_t p) {
        double z0, z1;
        stream.normal_pair(p, z0, z1);
        out[2 * p] += sigma * z0;
        out[2 * p + 1] += sigma * z1;
    };
    if (exec == Exec::serial) {
        for (std::size_t p = 0; p < pairs; ++p) body(p);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs); ++p) {
            body(static_cast<std::size_t>(p));
        }
    }
    if (n % 2 == 1) {
        double z0, z1;
        stream.normal_pair(pairs, z0, z1);
        out[n - 1] += sigma * z0;
    }
}

void slot_sums(std::span<const double> x, std::size_t samples_per_slot, std::size_t offset,
               std::size_t window, std::span<double> sums, Exec exec) {
    if (offset + window > samples_per_slot) {
        throw ShapeError("integration window does not fit inside a slot");
    }
    const std::size_t n_slots = sums.size();
    if (n_slots * samples_per_slot > x.size()) {
        throw ShapeError("trace shorter than the requested slot count");
    }
    auto body = [&](std::size_t k) {
        const double* src = x.data() + k * samples_per_slot + offset;
        double acc = 0.0;
        for (std::size_t n = 0; n < window; ++n) acc += src[n];
        sums[k] = acc;
    };
    if (exec == Exec::serial) {
        for (std::size_t k = 0; k < n_slots; ++k) body(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_slots); ++k) {
            body(static_cast<std::size_t>(k));
        }
    }
}

namespace {

// One shared r2c plan; fftw_execute_dft_r2c on fresh fftw_malloc'd buffers is
// thread-safe and pins every thread to the same algorithm, which keeps the
// parallel path bit-identical to the serial one.
struct R2cPlan {
    std::size_t n;
    double* in;
    fftw_complex* out;
    fftw_plan plan;

    explicit R2cPlan(std::size_t nfft) : n(nfft) {
        in = fftw_alloc_real(n);
        out = fftw_alloc_complex(n / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    ~R2cPlan() {
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    R2cPlan(const R2cPlan&) = delete;
    R2cPlan& operator=(const R2cPlan&) = delete;
};

struct SegmentBuffers {
    double* in;
    fftw_complex* out;
    explicit SegmentBuffers(std::size_t n) {
        in = fftw_alloc_real(n);
        out = fftw_alloc_complex(n / 2 + 1);
    }
    ~SegmentBuffers() {
        fftw_free(in);
        fftw_free(out);
    }
    SegmentBuffers(const SegmentBuffers&) = delete;
    SegmentBuffers& operator=(const SegmentBuffers&) = delete;
};

void periodogram(const R2cPlan& plan, SegmentBuffers& buf, const double* seg,
                 const std::vector<double>& window, double* row) {
    const std::size_t n = window.size();
    for (std::size_t i = 0; i < n; ++i) buf.in[i] = seg[i] * window[i];
    fftw_execute_dft_r2c(plan.plan, buf.in, buf.out);
    const std::size_t bins = n / 2 + 1;
    for (std::size_t k = 0; k < bins; ++k) {
        row[k] = buf.out[k][0] * buf.out[k][0] + buf.out[k][1] * buf.out[k][1];
    }
}

}  // namespace

std::vector<double> welch_accumulate(std::span<const double> x,
                                     const std::vector<double>& window, std::size_t hop,
                                     std::size_t n_segments, Exec exec) {
    const std::size_t nfft = window.size();
    if (nfft == 0 || hop == 0 || n_segments == 0) {
        throw ShapeError("welch segmentation is empty");
    }
    if ((n_segments - 1) * hop + nfft > x.size()) {
        throw ShapeError("welch segments run past the end of the trace");
    }
    const std::size_t bins = nfft / 2 + 1;
    std::vector<double> acc(bins, 0.0);
    R2cPlan plan(nfft);

    if (exec == Exec::serial) {
        SegmentBuffers buf(nfft);
        std::vector<double> row(bins);
        for (std::size_t s = 0; s < n_segments; ++s) {
            periodogram(plan, buf, x.data() + s * hop, window, row.data());
            for (std::size_t k = 0; k < bins; ++k) acc[k] += row[k];
        }
        return acc;
    }

    // Blocks of segments: rows computed in parallel, then added in segment
    // order so the reduction matches the serial path exactly.
    constexpr std::size_t block = 16;
    std::vector<std::vector<double>> rows(block, std::vector<double>(bins));
    for (std::size_t start = 0; start < n_segments; start += block) {
        const std::size_t count = std::min(block, n_segments - start);
#pragma omp parallel
        {
            SegmentBuffers buf(nfft);
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
                periodogram(plan, buf, x.data() + (start + static_cast<std::size_t>(i)) * hop,
                            window, rows[static_cast<std::size_t>(i)].data());
            }
        }
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t k = 0; k < bins; ++k) acc[k] += rows[i][k];
        }
    }
    return acc;
}

}  // namespace hdlab::kernels
