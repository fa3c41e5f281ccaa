#include <pred/word_ops.hpp>

#include <cstdlib>
#include <cstring>

namespace pred::bits {

namespace {

bool detect_hw() {
#ifdef PRED_X86_64
    __builtin_cpu_init();
    return __builtin_cpu_supports("bmi2") && __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool initial_dispatch() {
    const char* env = std::getenv("PREDBENCH_NO_INTRINSICS");
    if(env != nullptr && std::strcmp(env, "1") == 0) return false;
    return detect_hw();
}

} // namespace

namespace detail {
bool g_use_hw = initial_dispatch();
}

bool hw_supported() {
    static const bool supported = detect_hw();
    return supported;
}

bool intrinsics_enabled() { return detail::g_use_hw; }

void set_intrinsics_enabled(bool enabled) { detail::g_use_hw = enabled && hw_supported(); }

} // namespace pred::bits
