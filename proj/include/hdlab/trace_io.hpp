#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdlab/trace.hpp"

namespace hdlab::trace_io {

// HDTR trace container, little-endian throughout:
//   magic "HDTR" | u32 version | f64 sample_rate_hz | u64 n_samples |
//   u8 n_channels | per channel { u16 name_len, UTF-8 name } |
//   payload: channel-major float32 volts | u32 CRC-32 (IEEE) of the payload
inline constexpr std::uint32_t kTraceVersion = 1;

std::uint32_t crc32_ieee(const unsigned char* data, std::size_t len);
std::string sha256_hex(const unsigned char* data, std::size_t len);

// float32 payload exactly as stored on disk
std::vector<float> payload_floats(const TraceBuffer& tb);
std::string payload_sha256(const TraceBuffer& tb);

// Atomic: written to a temp file in the target directory, then renamed.
void write_trace(const TraceBuffer& tb, const std::string& path);
TraceBuffer read_trace(const std::string& path);

}  // namespace hdlab::trace_io
