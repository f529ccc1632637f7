#include "resacc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace resacc {

unsigned configured_threads() noexcept {
  unsigned n = 0;
  if (const char* env = std::getenv("RESACC_THREADS")) {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace resacc
