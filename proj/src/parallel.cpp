#include "ergm_varest/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ergm {
namespace {

std::atomic<unsigned> g_threads{0};

unsigned default_threads() {
  if (const char *env = std::getenv("ERGM_VAREST_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0)
        return static_cast<unsigned>(v);
    } catch (const std::exception &) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

void set_max_threads(unsigned threads) { g_threads = threads; }

unsigned max_threads() {
  const unsigned t = g_threads.load();
  return t > 0 ? t : default_threads();
}

} // namespace ergm
