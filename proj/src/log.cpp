#include "holo/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace holo {
namespace {

std::atomic<LogLevel> g_level{LogLevel::warn};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::clog << tag << ": " << message << '\n';
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_warning(std::string_view message) {
  if (log_level() >= LogLevel::warn) emit("warning", message);
}

void log_info(std::string_view message) {
  if (log_level() >= LogLevel::info) emit("info", message);
}

}  // namespace holo
