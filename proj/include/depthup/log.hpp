#pragma once

#include <atomic>
#include <iostream>
#include <string_view>

namespace depthup::log {

enum class Level { quiet, normal };

inline std::atomic<Level>& level() {
  static std::atomic<Level> l{Level::normal};
  return l;
}

inline void info(std::string_view msg) {
  if (level().load() != Level::quiet) std::cout << msg << '\n';
}

inline void warn(std::string_view msg) { std::cerr << "warning: " << msg << '\n'; }

}  // namespace depthup::log
