#include "nuelab/core.hpp"

#include <cstdlib>
#include <thread>

namespace nue {

unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("NUE_LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return hw;
}

}  // namespace nue
