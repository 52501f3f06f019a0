#pragma once

#include <cstdarg>
#include <stdexcept>
#include <string>

namespace nvs {

// Error categories. Mirrors the status codes of the C surface one-to-one.
enum class Status {
    ok = 0,
    invalid_argument = 1,
    io_error = 2,
    parse_error = 3,
    degenerate = 4,
    numeric_error = 5,
    unsupported = 6,
};

class Error : public std::runtime_error {
public:
    Error(Status status, std::string message)
        : std::runtime_error(std::move(message)), status_(status) {}

    Status status() const { return status_; }

private:
    Status status_;
};

[[noreturn]] void fail(Status status, const std::string& message);

const char* version_string();

// Minimal stderr logger. Level comes from the NVSGEOM_LOG environment
// variable: debug | info | warn | error | off (default warn).
enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

LogLevel log_level();
void log_message(LogLevel level, const char* fmt, ...);

#define NVS_LOG_DEBUG(...) ::nvs::log_message(::nvs::LogLevel::debug, __VA_ARGS__)
#define NVS_LOG_INFO(...) ::nvs::log_message(::nvs::LogLevel::info, __VA_ARGS__)
#define NVS_LOG_WARN(...) ::nvs::log_message(::nvs::LogLevel::warn, __VA_ARGS__)
#define NVS_LOG_ERROR(...) ::nvs::log_message(::nvs::LogLevel::error, __VA_ARGS__)

}  // namespace nvs
