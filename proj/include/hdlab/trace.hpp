#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hdlab/errors.hpp"

namespace hdlab {

// Uniformly sampled multi-channel voltage record. Samples are kept as doubles
// in memory; the file format stores float32 (see trace_io).
struct TraceBuffer {
    double sample_rate_hz = 0.0;
    double t0_s = 0.0;
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> samples;  // volts, one vector per channel
    std::vector<std::size_t> clipped;          // per-channel clipped-sample counts (not persisted)

    std::size_t n_channels() const { return channel_names.size(); }
    std::size_t n_samples() const { return samples.empty() ? 0 : samples.front().size(); }

    bool has_channel(const std::string& name) const {
        for (const auto& n : channel_names) {
            if (n == name) return true;
        }
        return false;
    }

    const std::vector<double>& channel(const std::string& name) const {
        for (std::size_t i = 0; i < channel_names.size(); ++i) {
            if (channel_names[i] == name) return samples[i];
        }
        throw ChannelError("trace has no channel '" + name + "'");
    }

    std::size_t clipped_count(const std::string& name) const {
        for (std::size_t i = 0; i < channel_names.size(); ++i) {
            if (channel_names[i] == name) return i < clipped.size() ? clipped[i] : 0;
        }
        throw ChannelError("trace has no channel '" + name + "'");
    }

    void add_channel(const std::string& name, std::vector<double> data, std::size_t clip = 0) {
        if (!samples.empty() && data.size() != n_samples()) {
            throw ShapeError("channel '" + name + "' length differs from existing channels");
        }
        channel_names.push_back(name);
        samples.push_back(std::move(data));
        clipped.push_back(clip);
    }

    bool saturated() const {
        for (std::size_t c : clipped) {
            if (c > 0) return true;
        }
        return false;
    }

    void validate() const {
        if (channel_names.size() != samples.size()) {
            throw ShapeError("channel name/sample table mismatch");
        }
        for (const auto& ch : samples) {
            if (ch.size() != n_samples()) throw ShapeError("channels differ in length");
        }
        if (!(sample_rate_hz > 0.0)) throw ShapeError("trace sample rate must be > 0");
    }
};

}  // namespace hdlab
