#pragma once

#include <cstddef>

namespace pred::memory {

/// True if the process links the allocation hook (target pred::memhook).
bool available();

/// Live heap bytes allocated through operator new.
size_t current();

/// Highest value of current() since the last reset_peak().
size_t peak();

/// Sets peak() to current().
void reset_peak();

/// \brief Measures heap usage relative to the moment of construction.
class Scope {
public:
    Scope();

    /// Live bytes allocated since construction (clamped at 0).
    size_t live() const;

    /// Peak live bytes since construction.
    size_t peak() const;

private:
    size_t m_base;
};

namespace detail {

// hooks called by the allocation overrides
void on_alloc(size_t bytes);
void on_free(size_t bytes);
void mark_available();

} // namespace detail

} // namespace pred::memory
