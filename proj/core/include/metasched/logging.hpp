#pragma once

#include <string>
#include <string_view>

#include <fmt/format.h>

namespace metasched {

enum class LogLevel { Trace, Debug, Info, Warn, Error, Off };

/// Reads METASCHED_LOG (trace|debug|info|warn|error|off; default warn) once.
void init_logging();
void set_log_level(LogLevel level);
void log_message(LogLevel level, std::string_view message);

template <typename... Args>
void log_info(fmt::format_string<Args...> f, Args&&... args) {
  log_message(LogLevel::Info, fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void log_debug(fmt::format_string<Args...> f, Args&&... args) {
  log_message(LogLevel::Debug, fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void log_warn(fmt::format_string<Args...> f, Args&&... args) {
  log_message(LogLevel::Warn, fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace metasched
