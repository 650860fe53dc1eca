#include "l1adapt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace l1adapt {

int sweep_threads() {
  if (const char* env = std::getenv("L1ADAPT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace l1adapt
