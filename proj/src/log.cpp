#include "hornopt/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace hornopt {

LogLevel log_threshold() {
    static const LogLevel threshold = [] {
        const char* env = std::getenv("HORNOPT_LOG");
        if (env == nullptr) return LogLevel::warn;
        const std::string value(env);
        if (value == "error") return LogLevel::error;
        if (value == "warn") return LogLevel::warn;
        if (value == "info") return LogLevel::info;
        if (value == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return threshold;
}

void log(LogLevel level, std::string_view message) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
    std::cerr << "[hornopt:" << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace hornopt
