#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace pred {

/// A key of a w-bit universe, stored in a 64-bit word.
using Key = uint64_t;

/// The predecessor of a query, or nullopt if the query is smaller than every key.
using PredResult = std::optional<Key>;

/// \brief The universe [0, 2^bits) keys are drawn from.
class Universe {
public:
    constexpr explicit Universe(unsigned bits) : m_bits(bits) {
        if(bits == 0 || bits > 64) throw std::invalid_argument("universe width must be in [1, 64], got " + std::to_string(bits));
    }

    constexpr unsigned bits() const { return m_bits; }
    constexpr Key max_key() const { return m_bits == 64 ? ~Key(0) : (Key(1) << m_bits) - 1; }
    constexpr bool contains(Key x) const { return x <= max_key(); }

private:
    unsigned m_bits;
};

/// The contract shared by all dynamic predecessor structures and the oracle.
///
/// Set semantics: insert returns false for a key already present and erase
/// returns false for an absent key; neither changes the structure then.
template<typename T>
concept PredecessorSet = requires(T& s, const T& cs, Key x) {
    { s.insert(x) } -> std::same_as<bool>;
    { s.erase(x) } -> std::same_as<bool>;
    { cs.predecessor(x) } -> std::same_as<PredResult>;
    { cs.size() } -> std::convertible_to<size_t>;
};

} // namespace pred
