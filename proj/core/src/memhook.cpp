// Process-wide operator new/delete replacements feeding pred::memory.
// Linked as an object library so only executables that want metering get it.

#include <pred/memory_meter.hpp>

#include <cstdlib>
#include <malloc.h>
#include <new>

namespace {

void* counted_alloc(size_t n) {
    void* p = std::malloc(n == 0 ? 1 : n);
    if(p == nullptr) throw std::bad_alloc();
    pred::memory::detail::on_alloc(malloc_usable_size(p));
    return p;
}

void* counted_alloc_aligned(size_t n, std::align_val_t al) {
    void* p = std::aligned_alloc(size_t(al), (n + size_t(al) - 1) / size_t(al) * size_t(al));
    if(p == nullptr) throw std::bad_alloc();
    pred::memory::detail::on_alloc(malloc_usable_size(p));
    return p;
}

void counted_free(void* p) noexcept {
    if(p == nullptr) return;
    pred::memory::detail::on_free(malloc_usable_size(p));
    std::free(p);
}

struct Install {
    Install() { pred::memory::detail::mark_available(); }
} g_install;

} // namespace

void* operator new(size_t n) { return counted_alloc(n); }
void* operator new[](size_t n) { return counted_alloc(n); }
void* operator new(size_t n, const std::nothrow_t&) noexcept {
    try {
        return counted_alloc(n);
    } catch(...) {
        return nullptr;
    }
}
void* operator new[](size_t n, const std::nothrow_t&) noexcept {
    try {
        return counted_alloc(n);
    } catch(...) {
        return nullptr;
    }
}
void* operator new(size_t n, std::align_val_t al) { return counted_alloc_aligned(n, al); }
void* operator new[](size_t n, std::align_val_t al) { return counted_alloc_aligned(n, al); }

void operator delete(void* p) noexcept { counted_free(p); }
void operator delete[](void* p) noexcept { counted_free(p); }
void operator delete(void* p, size_t) noexcept { counted_free(p); }
void operator delete[](void* p, size_t) noexcept { counted_free(p); }
void operator delete(void* p, std::align_val_t) noexcept { counted_free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { counted_free(p); }
void operator delete(void* p, size_t, std::align_val_t) noexcept { counted_free(p); }
void operator delete[](void* p, size_t, std::align_val_t) noexcept { counted_free(p); }
