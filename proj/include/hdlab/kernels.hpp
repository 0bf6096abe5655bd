#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdlab/rng.hpp"

namespace hdlab::kernels {

// Every kernel has a plain serial reference and an OpenMP variant that must
// produce bit-identical output (disjoint writes or fixed-order reductions).
enum class Exec { serial, parallel };

// out[k*spp + offset + n] += amplitude[k] * envelope[n] for every slot k.
// envelope.size() + offset must not exceed spp.
void add_pulse_train(std::span<const double> slot_amplitudes,
                     std::span<const double> envelope, std::size_t samples_per_slot,
                     std::size_t offset, std::span<double> out, Exec exec);

// out[i] += sigma * N(0,1) with counter-based draws: out is reproducible for a
// given stream regardless of thread count.
void add_white_noise(const rng::CounterStream& stream, double sigma, std::span<double> out,
                     Exec exec);

// sums[k] = sum of x[k*spp + offset .. k*spp + offset + window) in index order.
void slot_sums(std::span<const double> x, std::size_t samples_per_slot, std::size_t offset,
               std::size_t window, std::span<double> sums, Exec exec);

// Sum of windowed segment periodograms |FFT(w * x_seg)|^2, accumulated in
// segment order. Result has nfft/2 + 1 bins, nfft = window.size().
std::vector<double> welch_accumulate(std::span<const double> x,
                                     const std::vector<double>& window, std::size_t hop,
                                     std::size_t n_segments, Exec exec);

}  // namespace hdlab::kernels
