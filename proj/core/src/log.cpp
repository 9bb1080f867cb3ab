#include "posh/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include "posh/parallel.hpp"

namespace posh {
namespace {

std::atomic<bool> warnings_enabled{true};
std::mutex log_mutex;

}  // namespace

void log_warning(std::string_view message) {
  if (!warnings_enabled.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(log_mutex);
  std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { warnings_enabled.store(enabled); }

std::size_t default_thread_count() {
  if (const char* env = std::getenv("POSH_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace posh
