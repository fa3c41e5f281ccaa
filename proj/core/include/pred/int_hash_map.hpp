#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>

namespace pred {

/// \brief Open-addressing hash map from 64-bit integers to values, using
/// Robin Hood probing with backward-shift deletion.
///
/// The load factor never exceeds 0.8. Pointers to values are invalidated by
/// any insertion or erasure.
template<typename V>
class IntHashMap {
private:
    static constexpr size_t MIN_CAPACITY = 8;

    struct Slot {
        uint64_t key;
        V value;
    };

    std::unique_ptr<Slot[]> m_slots;
    std::unique_ptr<uint8_t[]> m_dist; // 0 = empty, otherwise probe distance + 1
    size_t m_capacity = 0;
    size_t m_size = 0;

    static uint64_t hash(uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    }

    size_t mask() const { return m_capacity - 1; }

    void rehash(size_t new_capacity) {
        auto old_slots = std::move(m_slots);
        auto old_dist = std::move(m_dist);
        const size_t old_capacity = m_capacity;

        m_capacity = new_capacity;
        m_slots = std::make_unique<Slot[]>(new_capacity);
        m_dist = std::make_unique<uint8_t[]>(new_capacity);
        m_size = 0;
        for(size_t i = 0; i < old_capacity; ++i) {
            if(old_dist[i]) place(old_slots[i].key, std::move(old_slots[i].value));
        }
    }

    bool over_load(size_t n) const { return n * 5 > m_capacity * 4; }

    // inserts a key known to be absent
    void place(uint64_t key, V&& value) {
        size_t pos = hash(key) & mask();
        uint8_t d = 1;
        Slot carry{key, std::move(value)};
        for(;;) {
            if(m_dist[pos] == 0) {
                m_slots[pos] = std::move(carry);
                m_dist[pos] = d;
                ++m_size;
                return;
            }
            if(m_dist[pos] < d) {
                std::swap(carry, m_slots[pos]);
                std::swap(d, m_dist[pos]);
            }
            pos = (pos + 1) & mask();
            if(d == 255) {
                // probe distance no longer representable: grow, then re-place the carried entry
                rehash(m_capacity * 2);
                place(carry.key, std::move(carry.value));
                return;
            }
            ++d;
        }
    }

    size_t find_index(uint64_t key) const {
        if(m_capacity == 0) return SIZE_MAX;
        size_t pos = hash(key) & mask();
        for(uint8_t d = 1;; ++d) {
            if(m_dist[pos] < d) return SIZE_MAX;
            if(m_slots[pos].key == key) return pos;
            pos = (pos + 1) & mask();
            if(d == 255) return SIZE_MAX;
        }
    }

public:
    IntHashMap() = default;
    IntHashMap(IntHashMap&&) noexcept = default;
    IntHashMap& operator=(IntHashMap&&) noexcept = default;

    size_t size() const { return m_size; }
    bool empty() const { return m_size == 0; }
    size_t capacity() const { return m_capacity; }

    V* find(uint64_t key) {
        const size_t i = find_index(key);
        return i == SIZE_MAX ? nullptr : &m_slots[i].value;
    }

    const V* find(uint64_t key) const {
        const size_t i = find_index(key);
        return i == SIZE_MAX ? nullptr : &m_slots[i].value;
    }

    bool contains(uint64_t key) const { return find_index(key) != SIZE_MAX; }

    /// Inserts (key, value) if key is absent. Returns the stored value and whether it was inserted.
    std::pair<V*, bool> try_emplace(uint64_t key, V value = V()) {
        if(V* v = find(key)) return {v, false};
        if(m_capacity == 0) rehash(MIN_CAPACITY);
        else if(over_load(m_size + 1)) rehash(m_capacity * 2);
        place(key, std::move(value));
        return {find(key), true};
    }

    bool erase(uint64_t key) {
        size_t pos = find_index(key);
        if(pos == SIZE_MAX) return false;
        // backward shift
        for(;;) {
            const size_t next = (pos + 1) & mask();
            if(m_dist[next] <= 1) {
                m_dist[pos] = 0;
                m_slots[pos] = Slot{};
                break;
            }
            m_slots[pos] = std::move(m_slots[next]);
            m_dist[pos] = m_dist[next] - 1;
            pos = next;
        }
        --m_size;
        if(m_size == 0) {
            clear();
        } else if(m_capacity > MIN_CAPACITY && m_size * 8 < m_capacity) {
            rehash(m_capacity / 2);
        }
        return true;
    }

    void clear() {
        m_slots.reset();
        m_dist.reset();
        m_capacity = 0;
        m_size = 0;
    }

    template<typename F>
    void for_each(F&& f) const {
        for(size_t i = 0; i < m_capacity; ++i) {
            if(m_dist[i]) f(m_slots[i].key, m_slots[i].value);
        }
    }

    /// Bytes held by the slot arrays.
    size_t heap_bytes() const { return m_capacity * (sizeof(Slot) + 1); }
};

} // namespace pred
