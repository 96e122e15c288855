#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace aid::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Parsed once from AID_LOG (debug|info|warn|error|off); defaults to warn.
inline Level threshold() {
  static const Level cached = [] {
    const char* raw = std::getenv("AID_LOG");
    if (raw == nullptr) return Level::warn;
    std::string v(raw);
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "warn") return Level::warn;
    if (v == "error") return Level::error;
    if (v == "off") return Level::off;
    return Level::warn;
  }();
  return cached;
}

inline void write(Level level, const std::string& message) {
  if (level < threshold()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::cerr << "aid [" << names[static_cast<int>(level)] << "] " << message << "\n";
}

inline void debug(const std::string& m) { write(Level::debug, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void error(const std::string& m) { write(Level::error, m); }

}  // namespace aid::log
