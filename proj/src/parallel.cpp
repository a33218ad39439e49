#include "mac/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "mac/errors.hpp"

namespace mac {

namespace {
std::atomic<int> g_override{0};
}

int thread_count() {
  if (const int o = g_override.load(std::memory_order_relaxed); o > 0) return o;
  const char* env = std::getenv("MAC_ETD_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(env, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(env).size() || value < 1) {
    throw ConfigError("MAC_ETD_THREADS", fmt::format("MAC_ETD_THREADS must be an integer >= 1, got '{}'", env));
  }
  return value;
}

void set_thread_count(int n) { g_override.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

}  // namespace mac
