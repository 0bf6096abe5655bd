#include "hdlab/trace_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "hdlab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "trace files are little-endian; big-endian hosts are unsupported");

namespace hdlab::trace_io {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'T', 'R'};

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

template <typename T>
void put(std::string& buf, const T& value) {
    const char* p = reinterpret_cast<const char*>(&value);
    buf.append(p, sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const char* what) {
    T value;
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw FormatError(std::string("trace file truncated while reading ") + what);
    }
    return value;
}

}  // namespace

std::uint32_t crc32_ieee(const unsigned char* data, std::size_t len) {
    static const auto table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

std::string sha256_hex(const unsigned char* data, std::size_t len) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(data, len, digest, &digest_len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * digest_len);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::vector<float> payload_floats(const TraceBuffer& tb) {
    std::vector<float> payload;
    payload.reserve(tb.n_channels() * tb.n_samples());
    for (const auto& ch : tb.samples) {
        for (double v : ch) payload.push_back(static_cast<float>(v));
    }
    return payload;
}

std::string payload_sha256(const TraceBuffer& tb) {
    const auto payload = payload_floats(tb);
    return sha256_hex(reinterpret_cast<const unsigned char*>(payload.data()),
                      payload.size() * sizeof(float));
}

void write_trace(const TraceBuffer& tb, const std::string& path) {
    tb.validate();
    if (tb.n_channels() == 0 || tb.n_channels() > 255) {
        throw ShapeError("trace files support 1..255 channels");
    }

    std::string header;
    header.append(kMagic, 4);
    put(header, kTraceVersion);
    put(header, tb.sample_rate_hz);
    put(header, static_cast<std::uint64_t>(tb.n_samples()));
    put(header, static_cast<std::uint8_t>(tb.n_channels()));
    for (const auto& name : tb.channel_names) {
        if (name.size() > 0xFFFF) throw ShapeError("channel name too long");
        put(header, static_cast<std::uint16_t>(name.size()));
        header.append(name);
    }

    const auto payload = payload_floats(tb);
    const auto* payload_bytes = reinterpret_cast<const unsigned char*>(payload.data());
    const std::size_t payload_len = payload.size() * sizeof(float);
    const std::uint32_t crc = crc32_ieee(payload_bytes, payload_len);

    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        out.write(reinterpret_cast<const char*>(payload_bytes),
                  static_cast<std::streamsize>(payload_len));
        out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
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
        throw IoError("cannot move trace into place: " + path);
    }
}

TraceBuffer read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trace file: " + path);

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("not an HDTR trace file: " + path);
    }
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kTraceVersion) {
        throw FormatError("unsupported trace version " + std::to_string(version));
    }

    TraceBuffer tb;
    tb.sample_rate_hz = get<double>(in, "sample rate");
    const auto n_samples = get<std::uint64_t>(in, "sample count");
    const auto n_channels = get<std::uint8_t>(in, "channel count");
    if (n_channels == 0) throw FormatError("trace declares zero channels");

    for (unsigned c = 0; c < n_channels; ++c) {
        const auto len = get<std::uint16_t>(in, "channel name length");
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) {
            throw FormatError("trace file truncated in the channel name table");
        }
        tb.channel_names.push_back(std::move(name));
    }

    const std::size_t count = static_cast<std::size_t>(n_samples) * n_channels;
    std::vector<float> payload(count);
    if (!in.read(reinterpret_cast<char*>(payload.data()),
                 static_cast<std::streamsize>(count * sizeof(float)))) {
        throw FormatError("payload shorter than the declared channel sizes");
    }
    const auto stored_crc = get<std::uint32_t>(in, "payload CRC");
    const std::uint32_t crc = crc32_ieee(
        reinterpret_cast<const unsigned char*>(payload.data()), count * sizeof(float));
    if (crc != stored_crc) {
        throw FormatError("payload CRC mismatch; trace file is corrupt: " + path);
    }

    tb.samples.resize(n_channels);
    tb.clipped.assign(n_channels, 0);
    for (unsigned c = 0; c < n_channels; ++c) {
        auto& ch = tb.samples[c];
        ch.resize(n_samples);
        const float* src = payload.data() + static_cast<std::size_t>(c) * n_samples;
        for (std::uint64_t i = 0; i < n_samples; ++i) ch[i] = static_cast<double>(src[i]);
    }
    tb.validate();
    return tb;
}

}  // namespace hdlab::trace_io
