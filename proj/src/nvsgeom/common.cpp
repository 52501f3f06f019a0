#include "nvsgeom/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifndef NVSGEOM_VERSION_STRING
#define NVSGEOM_VERSION_STRING "0.0.0"
#endif

namespace nvs {

void fail(Status status, const std::string& message) {
    throw Error(status, message);
}

const char* version_string() {
    return NVSGEOM_VERSION_STRING;
}

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("NVSGEOM_LOG");
        if (!env) return LogLevel::warn;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::error;
        if (std::strcmp(env, "off") == 0) return LogLevel::off;
        return LogLevel::warn;
    }();
    return level;
}

void log_message(LogLevel level, const char* fmt, ...) {
    if (level < log_level()) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::fprintf(stderr, "[nvsgeom %s] ", names[static_cast<int>(level)]);
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

}  // namespace nvs
