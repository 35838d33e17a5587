#include "affectcl/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace affectcl::log {
namespace {
std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;
constexpr const char* kTags[] = {"debug", "info", "warn", "error"};
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level lvl, std::string_view message) {
  if (lvl < g_level.load() || lvl == Level::off) return;
  std::lock_guard lock(g_mutex);
  std::fprintf(stderr, "[%s] %.*s\n", kTags[static_cast<int>(lvl)],
               static_cast<int>(message.size()), message.data());
}

}  // namespace affectcl::log
