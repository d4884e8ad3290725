#include "mbae/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace mbae {

namespace {

LogLevel read_level() {
  const char* env = std::getenv("MBAE_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  const std::string value(env);
  if (value == "error") return LogLevel::kError;
  if (value == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void emit(const char* tag, const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[mbae " << tag << "] " << message << "\n";
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = read_level();
  return level;
}

void log_error(const std::string& message) { emit("error", message); }

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::kInfo) emit("info", message);
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::kDebug) emit("debug", message);
}

}  // namespace mbae
