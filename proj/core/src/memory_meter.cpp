#include <pred/memory_meter.hpp>

#include <atomic>

namespace pred::memory {

namespace {

std::atomic<size_t> g_current{0};
std::atomic<size_t> g_peak{0};
std::atomic<bool> g_available{false};

} // namespace

bool available() { return g_available.load(std::memory_order_relaxed); }
size_t current() { return g_current.load(std::memory_order_relaxed); }
size_t peak() { return g_peak.load(std::memory_order_relaxed); }
void reset_peak() { g_peak.store(current(), std::memory_order_relaxed); }

Scope::Scope() : m_base(current()) { reset_peak(); }

size_t Scope::live() const {
    const size_t c = current();
    return c > m_base ? c - m_base : 0;
}

size_t Scope::peak() const {
    const size_t p = memory::peak();
    return p > m_base ? p - m_base : 0;
}

namespace detail {

void on_alloc(size_t bytes) {
    const size_t now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    size_t p = g_peak.load(std::memory_order_relaxed);
    while(now > p && !g_peak.compare_exchange_weak(p, now, std::memory_order_relaxed)) {
    }
}

void on_free(size_t bytes) { g_current.fetch_sub(bytes, std::memory_order_relaxed); }

void mark_available() { g_available.store(true, std::memory_order_relaxed); }

} // namespace detail

} // namespace pred::memory
