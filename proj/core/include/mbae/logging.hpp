#pragma once

#include <string>

namespace mbae {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from MBAE_LOG (error|info|debug), read once; defaults to info.
LogLevel log_level();

void log_error(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace mbae
