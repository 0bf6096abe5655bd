#pragma once

#include <stdexcept>
#include <string>

namespace hdlab {

// Error categories map 1:1 onto CLI exit codes (see tools/hdlab_main.cpp).
enum class ErrorKind {
    domain = 2,    // parameter outside its physical range
    config = 3,    // malformed or inconsistent configuration
    shape = 4,     // mismatched buffer lengths / rates / grids
    format = 5,    // trace file parse or CRC failure
    io = 6,        // filesystem problems
    channel = 7,   // requested channel absent from a trace
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::config, msg) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(ErrorKind::shape, msg) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(ErrorKind::format, msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};
struct ChannelError : Error {
    explicit ChannelError(const std::string& msg) : Error(ErrorKind::channel, msg) {}
};

}  // namespace hdlab
