#include <pred/universe_sampling.hpp>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

#include <pred/int_hash_map.hpp>
#include <pred/word_ops.hpp>

namespace pred {

namespace {

// unsorted list of truncated keys stored in 1, 2, 4 or 8 bytes each
class TruncList {
public:
    explicit TruncList(unsigned width = 8) : m_width(uint8_t(width)) {}

    size_t size() const { return m_size; }
    size_t capacity() const { return m_cap; }
    size_t heap_bytes() const { return size_t(m_cap) * m_width; }

    template<typename F>
    decltype(auto) visit(F&& f) const {
        switch(m_width) {
        case 1: return f(reinterpret_cast<const uint8_t*>(m_data.get()));
        case 2: return f(reinterpret_cast<const uint16_t*>(m_data.get()));
        case 4: return f(reinterpret_cast<const uint32_t*>(m_data.get()));
        default: return f(reinterpret_cast<const uint64_t*>(m_data.get()));
        }
    }

    Key get(size_t i) const {
        return visit([&](const auto* p) { return Key(p[i]); });
    }

    void set(size_t i, Key v) {
        visit([&](const auto* p) {
            using T = std::remove_cv_t<std::remove_pointer_t<decltype(p)>>;
            const_cast<T*>(p)[i] = T(v);
        });
    }

    long find(Key v) const {
        return visit([&](const auto* p) {
            for(size_t i = 0; i < m_size; ++i) {
                if(p[i] == v) return long(i);
            }
            return -1L;
        });
    }

    PredResult pred(Key v) const {
        return visit([&](const auto* p) -> PredResult {
            bool found = false;
            Key best = 0;
            for(size_t i = 0; i < m_size; ++i) {
                const Key k = p[i];
                if(k <= v && (!found || k > best)) {
                    best = k;
                    found = true;
                }
            }
            if(!found) return std::nullopt;
            return best;
        });
    }

    void push(Key v, size_t limit) {
        if(m_size == m_cap) reserve(std::min(std::max<size_t>(4, size_t(m_cap) * 2), limit));
        set(m_size++, v);
    }

    void remove_at(size_t i) {
        set(i, get(m_size - 1));
        --m_size;
    }

    void reserve(size_t cap) {
        if(cap <= m_cap) return;
        auto data = std::make_unique<uint8_t[]>(cap * m_width);
        if(m_size) std::memcpy(data.get(), m_data.get(), size_t(m_size) * m_width);
        m_data = std::move(data);
        m_cap = uint32_t(cap);
    }

    void release() {
        m_data.reset();
        m_size = 0;
        m_cap = 0;
    }

private:
    std::unique_ptr<uint8_t[]> m_data;
    uint32_t m_size = 0;
    uint32_t m_cap = 0;
    uint8_t m_width;
};

class BitVec {
public:
    size_t words() const { return m_words; }
    size_t heap_bytes() const { return m_words * sizeof(uint64_t); }
    bool allocated() const { return m_bits != nullptr; }

    void allocate(size_t bits) {
        m_words = std::max<size_t>(1, bits / 64);
        m_bits = std::make_unique<uint64_t[]>(m_words);
    }

    void release() {
        m_bits.reset();
        m_words = 0;
    }

    bool test(Key j) const { return (m_bits[j >> 6] >> (j & 63)) & 1; }
    void set(Key j) { m_bits[j >> 6] |= uint64_t(1) << (j & 63); }
    void clear(Key j) { m_bits[j >> 6] &= ~(uint64_t(1) << (j & 63)); }
    uint64_t word(size_t i) const { return m_bits[i]; }

    // largest set position <= j
    PredResult pred(Key j) const {
        size_t wi = j >> 6;
        const unsigned off = unsigned(j & 63);
        uint64_t word = m_bits[wi] & (off == 63 ? ~uint64_t(0) : (uint64_t(2) << off) - 1);
        for(;;) {
            if(word != 0) return Key(wi) * 64 + Key(bits::msb0(word));
            if(wi == 0) return std::nullopt;
            word = m_bits[--wi];
        }
    }

    Key min() const {
        size_t wi = 0;
        while(m_bits[wi] == 0) ++wi;
        return Key(wi) * 64 + Key(bits::tzcnt(m_bits[wi]));
    }

    Key max() const {
        size_t wi = m_words - 1;
        while(m_bits[wi] == 0) --wi;
        return Key(wi) * 64 + Key(bits::msb0(m_bits[wi]));
    }

private:
    std::unique_ptr<uint64_t[]> m_bits;
    size_t m_words = 0;
};

unsigned list_width(unsigned k_b) {
    if(k_b <= 8) return 1;
    if(k_b <= 16) return 2;
    if(k_b <= 32) return 4;
    return 8;
}

} // namespace

struct UniverseSampling::Impl {
    struct Bucket {
        uint64_t index;
        size_t count = 0;
        Key min_t = 0;
        Key max_t = 0;
        bool bv = false;
        BitVec bits;
        TruncList list;

        Bucket(uint64_t i, unsigned width) : index(i), list(width) {}

        size_t storage_bytes() const { return bv ? bits.heap_bytes() : list.heap_bytes(); }
    };

    unsigned k;
    size_t b;
    uint64_t nbuckets;
    TopKind top;
    BucketKind kind;
    size_t theta_min;
    size_t theta_max;
    unsigned width;

    size_t n = 0;
    size_t active = 0;
    bool any = false;
    uint64_t imin = 0;
    uint64_t imax = 0;

    // array top level: entries[j - base] for bucket numbers j in [base, base + entries.size())
    std::vector<Bucket*> entries;
    uint64_t base = 0;
    // hash top level
    IntHashMap<Bucket*> table;

    Impl(const Universe& u, const USConfig& c)
        : k(c.k_b), b(size_t(1) << c.k_b), nbuckets(uint64_t(1) << (u.bits() - c.k_b)), top(c.top), kind(c.bucket),
          theta_min(c.theta_min), theta_max(c.theta_max), width(list_width(c.k_b)) {}

    ~Impl() {
        std::vector<Bucket*> owned;
        for_each_bucket([&](Bucket* B) { owned.push_back(B); });
        for(Bucket* B : owned) delete B;
    }

    template<typename F>
    void for_each_bucket(F&& f) const {
        if(!any) return;
        if(top == TopKind::hash) {
            table.for_each([&](uint64_t, Bucket* B) { f(B); });
            return;
        }
        for(uint64_t j = imin; j <= imax; ++j) {
            Bucket* B = entry(j);
            if(B->index == j) f(B);
        }
    }

    // ---- top level

    Bucket*& entry(uint64_t j) { return entries[j - base]; }
    Bucket* entry(uint64_t j) const { return entries[j - base]; }

    // makes room for bucket number i, growing geometrically towards it
    void reserve_entry(uint64_t i) {
        if(entries.empty()) {
            base = i;
            entries.assign(1, nullptr);
            return;
        }
        const uint64_t lo = base;
        const uint64_t hi = base + entries.size() - 1;
        if(i >= lo && i <= hi) return;
        const uint64_t span = hi - lo + 1;
        uint64_t nlo = lo, nhi = hi;
        if(i < lo) {
            const uint64_t grow = std::max(span, lo - i);
            nlo = lo > grow ? lo - grow : 0;
        } else {
            const uint64_t grow = std::max(span, i - hi);
            nhi = std::min(hi + grow, nbuckets - 1);
        }
        std::vector<Bucket*> grown(nhi - nlo + 1, nullptr);
        std::copy(entries.begin(), entries.end(), grown.begin() + (lo - nlo));
        entries = std::move(grown);
        base = nlo;
    }

    Bucket* exact(uint64_t i) const {
        if(!any || i < imin || i > imax) return nullptr;
        if(top == TopKind::hash) {
            Bucket* const* p = table.find(i);
            return p ? *p : nullptr;
        }
        Bucket* B = entry(i);
        return B->index == i ? B : nullptr;
    }

    Bucket* locate(uint64_t i) const {
        if(!any || i < imin) return nullptr;
        uint64_t j = std::min(i, imax);
        if(top == TopKind::array) return entry(j);
        for(;; --j) {
            if(Bucket* const* p = table.find(j)) return *p;
        }
    }

    void activate(Bucket* B) {
        const uint64_t i = B->index;
        ++active;
        if(top == TopKind::hash) {
            table.try_emplace(i, B);
            if(!any) {
                imin = imax = i;
                any = true;
            }
            imin = std::min(imin, i);
            imax = std::max(imax, i);
            return;
        }

        reserve_entry(i);
        if(!any) {
            entry(i) = B;
            imin = imax = i;
            any = true;
        } else if(i < imin) {
            for(uint64_t j = i; j < imin; ++j) entry(j) = B;
            imin = i;
        } else if(i > imax) {
            Bucket* prev = entry(imax);
            for(uint64_t j = imax + 1; j < i; ++j) entry(j) = prev;
            entry(i) = B;
            imax = i;
        } else {
            for(uint64_t j = i; j <= imax && entry(j)->index < i; ++j) entry(j) = B;
        }
    }

    void deactivate(Bucket* B) {
        const uint64_t i = B->index;
        --active;
        if(top == TopKind::hash) {
            table.erase(i);
            if(table.empty()) {
                any = false;
            } else if(i == imin) {
                uint64_t j = i + 1;
                while(!table.contains(j)) ++j;
                imin = j;
            } else if(i == imax) {
                uint64_t j = i - 1;
                while(!table.contains(j)) --j;
                imax = j;
            }
            return;
        }

        if(imin == imax) {
            any = false;
            entries.clear();
            entries.shrink_to_fit();
        } else if(i == imin) {
            uint64_t j = i + 1;
            while(entry(j) == B) ++j;
            imin = j;
        } else if(i == imax) {
            imax = entry(i - 1)->index;
        } else {
            Bucket* prev = entry(i - 1);
            for(uint64_t j = i; j <= imax && entry(j) == B; ++j) entry(j) = prev;
        }
    }

    // ---- buckets

    static PredResult local_pred(const Bucket* B, Key xt) { return B->bv ? B->bits.pred(xt) : B->list.pred(xt); }

    static bool local_contains(const Bucket* B, Key xt) { return B->bv ? B->bits.test(xt) : B->list.find(xt) >= 0; }

    size_t list_limit() const { return kind == BucketKind::hybrid ? theta_max : b; }

    void to_bitvector(Bucket* B) {
        B->bits.allocate(b);
        for(size_t i = 0; i < B->list.size(); ++i) B->bits.set(B->list.get(i));
        B->list.release();
        B->bv = true;
    }

    void to_list(Bucket* B) {
        B->list.reserve(B->count);
        for(size_t wi = 0; wi < B->bits.words(); ++wi) {
            for(uint64_t word = B->bits.word(wi); word != 0; word &= word - 1) {
                B->list.push(Key(wi) * 64 + Key(bits::tzcnt(word)), list_limit());
            }
        }
        B->bits.release();
        B->bv = false;
    }

    void add(Bucket* B, Key xt) {
        if(!B->bv && kind == BucketKind::hybrid && B->count + 1 > theta_max) to_bitvector(B);
        if(B->bv) B->bits.set(xt);
        else B->list.push(xt, list_limit());
        if(B->count == 0 || xt < B->min_t) B->min_t = xt;
        if(B->count == 0 || xt > B->max_t) B->max_t = xt;
        ++B->count;
    }

    Key list_min(const Bucket* B) const {
        return B->list.visit([&](const auto* p) { return Key(*std::min_element(p, p + B->list.size())); });
    }

    Key list_max(const Bucket* B) const {
        return B->list.visit([&](const auto* p) { return Key(*std::max_element(p, p + B->list.size())); });
    }

    // ---- operations

    bool insert(Key x) {
        const uint64_t i = x >> k;
        const Key xt = x & (b - 1);
        Bucket* B = exact(i);
        if(B == nullptr) {
            B = new Bucket(i, width);
            if(kind == BucketKind::bitvector) {
                B->bits.allocate(b);
                B->bv = true;
            }
            add(B, xt);
            activate(B);
        } else {
            if(local_contains(B, xt)) return false;
            add(B, xt);
        }
        ++n;
        return true;
    }

    bool erase(Key x) {
        const uint64_t i = x >> k;
        const Key xt = x & (b - 1);
        Bucket* B = exact(i);
        if(B == nullptr) return false;
        if(B->bv) {
            if(!B->bits.test(xt)) return false;
            B->bits.clear(xt);
        } else {
            const long pos = B->list.find(xt);
            if(pos < 0) return false;
            B->list.remove_at(size_t(pos));
        }
        --n;
        if(--B->count == 0) {
            deactivate(B);
            delete B;
            return true;
        }
        if(xt == B->min_t) B->min_t = B->bv ? B->bits.min() : list_min(B);
        if(xt == B->max_t) B->max_t = B->bv ? B->bits.max() : list_max(B);
        if(B->bv && kind == BucketKind::hybrid && B->count < theta_min) to_list(B);
        return true;
    }

    PredResult predecessor(Key x) const {
        const uint64_t i = x >> k;
        const Key xt = x & (b - 1);
        const Bucket* B = locate(i);
        if(B == nullptr) return std::nullopt;
        if(B->index == i) {
            if(xt >= B->min_t) return (Key(i) << k) | *local_pred(B, xt);
            if(i == 0) return std::nullopt;
            B = locate(i - 1);
            if(B == nullptr) return std::nullopt;
        }
        return (Key(B->index) << k) | B->max_t;
    }

    size_t heap_bytes() const {
        size_t bytes = entries.capacity() * sizeof(Bucket*) + table.heap_bytes();
        for_each_bucket([&](const Bucket* B) { bytes += sizeof(Bucket) + B->storage_bytes(); });
        return bytes;
    }

    void check() const {
        auto fail = [](const std::string& what) { throw std::logic_error("universe sampling: " + what); };
        size_t total = 0, seen = 0;
        for_each_bucket([&](const Bucket* B) {
            ++seen;
            if(B->count == 0) fail("active bucket " + std::to_string(B->index) + " is empty");
            std::vector<Key> keys;
            if(B->bv) {
                for(size_t wi = 0; wi < B->bits.words(); ++wi) {
                    for(uint64_t word = B->bits.word(wi); word != 0; word &= word - 1) {
                        keys.push_back(Key(wi) * 64 + Key(bits::tzcnt(word)));
                    }
                }
            } else {
                for(size_t j = 0; j < B->list.size(); ++j) keys.push_back(B->list.get(j));
                std::sort(keys.begin(), keys.end());
                if(std::adjacent_find(keys.begin(), keys.end()) != keys.end()) fail("duplicate in list");
                if(B->list.capacity() > list_limit()) fail("list capacity above its limit");
            }
            if(keys.size() != B->count) fail("bucket count mismatch");
            if(keys.front() != B->min_t || keys.back() != B->max_t) fail("cached extremes stale");
            if(kind == BucketKind::bitvector && !B->bv) fail("bit vector bucket stored as list");
            if(kind == BucketKind::list && B->bv) fail("list bucket stored as bit vector");
            if(kind == BucketKind::hybrid) {
                if(!B->bv && B->count > theta_max) fail("hybrid list above theta_max");
                if(B->bv && B->count < theta_min) fail("hybrid bit vector below theta_min");
            }
            total += B->count;
        });
        if(total != n) fail("size mismatch");
        if(seen != active) fail("active bucket count mismatch");
        if(!any) {
            if(n != 0) fail("keys without active buckets");
            return;
        }

        if(top == TopKind::hash) {
            if(!table.contains(imin) || !table.contains(imax)) fail("bounds not active");
            table.for_each([&](uint64_t i, Bucket* B) {
                if(B->index != i) fail("hash entry links wrong bucket");
                if(i < imin || i > imax) fail("active bucket outside bounds");
            });
            return;
        }

        // entries must form the step function j -> rightmost active bucket <= j
        if(imin < base || imax >= base + entries.size()) fail("bounds outside entry storage");
        if(entry(imin) == nullptr || entry(imin)->index != imin) fail("entry i_min does not link bucket i_min");
        if(entry(imax)->index != imax) fail("entry i_max does not link bucket i_max");
        const Bucket* last = nullptr;
        for(uint64_t j = imin; j <= imax; ++j) {
            const Bucket* B = entry(j);
            if(B == nullptr) fail("null entry");
            if(B->index == j) {
                last = B;
            } else if(B != last) {
                fail("entry " + std::to_string(j) + " does not link the rightmost active bucket before it");
            }
        }
    }
};

UniverseSampling::UniverseSampling(Universe universe, USConfig config) : m_universe(universe), m_config(config) {
    const unsigned w = universe.bits();
    if(w >= 64) throw std::invalid_argument("universe sampling does not support 64-bit keys");
    if(config.k_b == 0 || config.k_b >= w) {
        throw std::invalid_argument("universe sampling: k_b must be in (0, " + std::to_string(w) + "), got " +
                                    std::to_string(config.k_b));
    }
    if(config.bucket == BucketKind::hybrid) {
        const size_t b = size_t(1) << config.k_b;
        if(config.theta_min == 0 || config.theta_min > config.theta_max || config.theta_max >= b) {
            throw std::invalid_argument("universe sampling: hybrid thresholds need 0 < theta_min <= theta_max < b");
        }
    }
    m_impl = std::make_unique<Impl>(universe, config);
}

UniverseSampling::~UniverseSampling() = default;
UniverseSampling::UniverseSampling(UniverseSampling&&) noexcept = default;
UniverseSampling& UniverseSampling::operator=(UniverseSampling&&) noexcept = default;

bool UniverseSampling::insert(Key x) { return m_impl->insert(x); }
bool UniverseSampling::erase(Key x) { return m_impl->erase(x); }
PredResult UniverseSampling::predecessor(Key x) const { return m_impl->predecessor(x); }
size_t UniverseSampling::size() const { return m_impl->n; }

std::optional<uint64_t> UniverseSampling::top_locate(uint64_t i) const {
    const auto* B = m_impl->locate(i);
    if(B == nullptr) return std::nullopt;
    return B->index;
}

PredResult UniverseSampling::bucket_pred(uint64_t i, Key xt) const {
    const auto* B = m_impl->exact(i);
    if(B == nullptr) return std::nullopt;
    return Impl::local_pred(B, xt);
}

std::optional<USBucketInfo> UniverseSampling::bucket(uint64_t i) const {
    const auto* B = m_impl->exact(i);
    if(B == nullptr) return std::nullopt;
    USBucketInfo info{B->index, B->count, B->min_t, B->max_t, B->bv, B->storage_bytes(), {}};
    for(Key j = B->min_t;;) {
        info.keys.push_back(j);
        if(j == B->max_t) break;
        // next key: smallest truncated key above j
        Key next = B->max_t;
        if(B->bv) {
            for(Key c = j + 1; c < B->max_t; ++c) {
                if(B->bits.test(c)) {
                    next = c;
                    break;
                }
            }
        } else {
            for(size_t p = 0; p < B->list.size(); ++p) {
                const Key c = B->list.get(p);
                if(c > j && c < next) next = c;
            }
        }
        j = next;
    }
    return info;
}

size_t UniverseSampling::active_buckets() const { return m_impl->active; }

std::optional<uint64_t> UniverseSampling::i_min() const {
    if(!m_impl->any) return std::nullopt;
    return m_impl->imin;
}

std::optional<uint64_t> UniverseSampling::i_max() const {
    if(!m_impl->any) return std::nullopt;
    return m_impl->imax;
}

size_t UniverseSampling::heap_bytes() const { return m_impl->heap_bytes(); }

void UniverseSampling::check_invariants() const { m_impl->check(); }

} // namespace pred
