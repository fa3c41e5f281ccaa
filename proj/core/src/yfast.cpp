#include <pred/yfast.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <pred/word_ops.hpp>

namespace pred {

YFastTrie::YFastTrie(Universe universe, YFastConfig config)
    : m_universe(universe), m_config(config) {
    if(config.t == 0 || !(config.gamma > 0.0) || !(config.c > 0.0)) {
        throw std::invalid_argument("yfast: t, c and gamma must be positive");
    }
    m_lower = std::max<size_t>(1, size_t(std::ceil(config.gamma * config.t)));
    m_upper = size_t(std::floor(config.c * config.t));
    if(m_upper + 1 < 2 * m_lower) {
        throw std::invalid_argument("yfast: bucket bounds [" + std::to_string(m_lower) + ", " + std::to_string(m_upper) +
                                    "] leave no room to split and merge (need c >= 2 gamma)");
    }
    m_head.minus_inf = true;
    m_levels.resize(w());
    m_node_count.assign(w() + 1, 0);
    m_branch_count.assign(w(), 0);
}

YFastTrie::~YFastTrie() { release(); }

void YFastTrie::release() {
    Bucket* b = m_head.next;
    while(b != nullptr) {
        Bucket* next = b->next;
        delete b;
        b = next;
    }
    m_head.next = nullptr;
    m_head.keys.clear();
    m_size = 0;
    m_reps = 0;
    for(auto& level : m_levels) level.clear();
    std::fill(m_node_count.begin(), m_node_count.end(), 0);
    std::fill(m_branch_count.begin(), m_branch_count.end(), 0);
    m_top = 0;
    m_bot = 0;
}

unsigned YFastTrie::branch_level(Key a, Key b) const {
    return w() - 1 - unsigned(bits::msb0(a ^ b));
}

void YFastTrie::refresh_levels() {
    m_bot = 0;
    for(unsigned l = w(); l > 0; --l) {
        if(m_branch_count[l - 1] != 0) {
            m_bot = l;
            break;
        }
    }
    m_top = 0;
    while(m_top < w() && m_top + 1 < 63 && m_node_count[m_top + 1] == (size_t(1) << (m_top + 1))) ++m_top;
}

void YFastTrie::insert_rep(Bucket* nb) {
    const Key r = nb->rep;
    Bucket* lo = nb->prev != nullptr && !nb->prev->minus_inf ? nb->prev : nullptr;
    Bucket* hi = nb->next;
    ++m_reps;

    if(lo == nullptr && hi == nullptr) {
        for(auto& c : m_node_count) ++c;
        refresh_levels();
        return;
    }

    // the new branching node is where r leaves the path of its closest neighbour
    unsigned d = 0;
    Bucket* sib = nullptr;
    if(lo != nullptr) {
        d = branch_level(r, lo->rep);
        sib = lo;
    }
    if(hi != nullptr) {
        const unsigned dh = branch_level(r, hi->rep);
        if(sib == nullptr || dh > d) {
            d = dh;
            sib = hi;
        }
    }
    for(unsigned l = d + 1; l <= w(); ++l) ++m_node_count[l];
    ++m_branch_count[d];

    Bucket* smin = r < sib->rep ? nb : sib;
    Bucket* smax = r < sib->rep ? sib : nb;
    const bool rbit = bit_at(r, d);

    for(int l = int(d); l >= 0; --l) {
        auto& level = m_levels[l];
        const Key pre = prefix(r, unsigned(l));
        if(LssNode* node = level.find(pre)) {
            if(unsigned(l) == d) {
                if(rbit) node->has_right = true;
                else node->has_left = true;
            }
            if(r < node->desc_min->rep) node->desc_min = nb;
            if(r > node->desc_max->rep) node->desc_max = nb;
        } else {
            // previously a unary node above sib alone
            LssNode fresh;
            fresh.desc_min = smin;
            fresh.desc_max = smax;
            if(unsigned(l) == d) {
                fresh.has_left = fresh.has_right = true;
            } else {
                const bool b = bit_at(r, unsigned(l));
                fresh.has_left = !b;
                fresh.has_right = b;
            }
            level.try_emplace(pre, fresh);
        }
    }
    refresh_levels();
}

void YFastTrie::remove_rep(Bucket* gone) {
    const Key r = gone->rep;
    Bucket* lo = gone->prev != nullptr && !gone->prev->minus_inf ? gone->prev : nullptr;
    Bucket* hi = gone->next;
    --m_reps;

    if(lo == nullptr && hi == nullptr) {
        for(auto& c : m_node_count) --c;
        refresh_levels();
        return;
    }

    unsigned d = 0;
    bool have = false;
    if(lo != nullptr) {
        d = branch_level(r, lo->rep);
        have = true;
    }
    if(hi != nullptr) {
        const unsigned dh = branch_level(r, hi->rep);
        if(!have || dh > d) d = dh;
    }
    for(unsigned l = d + 1; l <= w(); ++l) --m_node_count[l];
    --m_branch_count[d];

    bool erasing = false;
    for(int l = int(d); l >= 0; --l) {
        auto& level = m_levels[l];
        const Key pre = prefix(r, unsigned(l));
        LssNode* node = level.find(pre);
        if(unsigned(l) == d) {
            const bool rbit = bit_at(r, d);
            if(rbit) node->has_right = false;
            else node->has_left = false;
            const bool child_stored = d + 1 < w() && m_levels[d + 1].contains(prefix(r, d + 1) ^ 1);
            if(!child_stored) {
                level.erase(pre);
                erasing = true;
                continue;
            }
        } else if(erasing) {
            if(!(node->has_left && node->has_right)) {
                level.erase(pre);
                continue;
            }
            erasing = false;
        }
        if(node->desc_min == gone) node->desc_min = gone->next;
        if(node->desc_max == gone) node->desc_max = gone->prev;
    }
    refresh_levels();
}

YFastTrie::Bucket* YFastTrie::locate(Key x) const {
    Bucket* head = const_cast<Bucket*>(&m_head);
    if(m_reps == 0) return head;
    if(m_bot == 0) {
        Bucket* only = m_head.next;
        return x >= only->rep ? only : head;
    }

    // levels above ell_top are complete and branching, hence stored
    unsigned lo = m_top > 0 ? std::min(m_top, m_bot) - 1 : 0;
    unsigned hi = m_bot - 1;
    while(lo < hi) {
        const unsigned mid = (lo + hi + 1) / 2;
        if(m_levels[mid].contains(prefix(x, mid))) lo = mid;
        else hi = mid - 1;
    }

    const LssNode* v = m_levels[lo].find(prefix(x, lo));
    const bool b = bit_at(x, lo);
    if(b ? v->has_right : v->has_left) {
        // the child's subtrie is a unary tail with a single representative
        Bucket* only = b ? v->desc_max : v->desc_min;
        return x >= only->rep ? only : only->prev;
    }
    return b ? v->desc_max : v->desc_min->prev;
}

bool YFastTrie::bucket_contains(const Bucket* b, Key x) const {
    if(m_config.sorted) return std::binary_search(b->keys.begin(), b->keys.end(), x);
    return std::find(b->keys.begin(), b->keys.end(), x) != b->keys.end();
}

PredResult YFastTrie::bucket_pred(const Bucket* b, Key x) const {
    if(m_config.sorted) {
        auto it = std::upper_bound(b->keys.begin(), b->keys.end(), x);
        if(it == b->keys.begin()) return std::nullopt;
        return *(it - 1);
    }
    bool found = false;
    Key best = 0;
    for(Key k : b->keys) {
        if(k <= x && (!found || k > best)) {
            best = k;
            found = true;
        }
    }
    if(!found) return std::nullopt;
    return best;
}

Key YFastTrie::bucket_max(const Bucket* b) {
    return *std::max_element(b->keys.begin(), b->keys.end());
}

void YFastTrie::split(Bucket* b) {
    auto& keys = b->keys;
    const size_t m = keys.size() / 2;
    if(!m_config.sorted) std::nth_element(keys.begin(), keys.begin() + m, keys.end());

    Bucket* nb = new Bucket();
    nb->rep = keys[m];
    nb->keys.assign(keys.begin() + m, keys.end());
    keys.resize(m);

    nb->prev = b;
    nb->next = b->next;
    if(b->next != nullptr) b->next->prev = nb;
    b->next = nb;
    insert_rep(nb);
}

void YFastTrie::merge(Bucket* b) {
    Bucket* survivor;
    Bucket* gone;
    if(b->next != nullptr) {
        survivor = b;
        gone = b->next;
    } else {
        survivor = b->prev;
        gone = b;
    }

    remove_rep(gone);
    survivor->keys.insert(survivor->keys.end(), gone->keys.begin(), gone->keys.end());
    survivor->next = gone->next;
    if(gone->next != nullptr) gone->next->prev = survivor;
    delete gone;

    if(survivor->keys.size() > m_upper) split(survivor);
}

bool YFastTrie::insert(Key x) {
    Bucket* b = locate(x);
    if(bucket_contains(b, x)) return false;
    if(m_config.sorted) b->keys.insert(std::upper_bound(b->keys.begin(), b->keys.end(), x), x);
    else b->keys.push_back(x);
    ++m_size;
    if(!b->minus_inf && b->rep == x) b->rep_dead = false;
    if(b->keys.size() > m_upper) split(b);
    return true;
}

bool YFastTrie::erase(Key x) {
    Bucket* b = locate(x);
    auto& keys = b->keys;
    if(m_config.sorted) {
        auto it = std::lower_bound(keys.begin(), keys.end(), x);
        if(it == keys.end() || *it != x) return false;
        keys.erase(it);
    } else {
        auto it = std::find(keys.begin(), keys.end(), x);
        if(it == keys.end()) return false;
        *it = keys.back();
        keys.pop_back();
    }
    --m_size;
    if(!b->minus_inf) {
        if(x == b->rep) b->rep_dead = true;
        if(keys.size() < m_lower) merge(b);
    }
    return true;
}

PredResult YFastTrie::predecessor(Key x) const {
    const Bucket* b = locate(x);
    if(auto p = bucket_pred(b, x)) return p;
    // x lies between a dead representative and the bucket's minimum
    const Bucket* prev = b->prev;
    if(prev == nullptr || prev->keys.empty()) return std::nullopt;
    return bucket_max(prev);
}

YFastTrie::BucketView YFastTrie::view(const Bucket* b) {
    BucketView v{b->minus_inf, b->rep, b->rep_dead, b->keys};
    std::sort(v.keys.begin(), v.keys.end());
    return v;
}

YFastTrie::BucketView YFastTrie::locate_bucket(Key x) const { return view(locate(x)); }

std::vector<YFastTrie::BucketView> YFastTrie::buckets() const {
    std::vector<BucketView> out;
    for(const Bucket* b = &m_head; b != nullptr; b = b->next) out.push_back(view(b));
    return out;
}

void YFastTrie::assemble(std::span<const Key> minus_infinity, const std::vector<BucketSpec>& buckets) {
    release();
    for(Key k : minus_infinity) {
        if(!m_universe.contains(k)) throw std::invalid_argument("yfast: key outside universe");
    }
    m_head.keys.assign(minus_infinity.begin(), minus_infinity.end());
    if(m_config.sorted) std::sort(m_head.keys.begin(), m_head.keys.end());
    m_size = m_head.keys.size();

    Bucket* tail = &m_head;
    for(const auto& spec : buckets) {
        if(!m_universe.contains(spec.rep)) throw std::invalid_argument("yfast: representative outside universe");
        if(tail != &m_head && spec.rep <= tail->rep) throw std::invalid_argument("yfast: representatives must ascend");
        for(Key k : tail->keys) {
            if(k >= spec.rep) throw std::invalid_argument("yfast: bucket keys overlap the next representative");
        }
        Bucket* b = new Bucket();
        b->rep = spec.rep;
        b->keys = spec.keys;
        if(m_config.sorted) std::sort(b->keys.begin(), b->keys.end());
        for(Key k : b->keys) {
            if(k < spec.rep) throw std::invalid_argument("yfast: bucket key below its representative");
        }
        b->rep_dead = std::find(b->keys.begin(), b->keys.end(), spec.rep) == b->keys.end();
        b->prev = tail;
        tail->next = b;
        tail = b;
        m_size += b->keys.size();
        insert_rep(b);
    }
}

void YFastTrie::check_invariants() const {
    auto fail = [](const std::string& what) { throw std::logic_error("yfast: " + what); };

    // bucket list
    std::vector<const Bucket*> reps;
    size_t total = 0;
    if(!m_head.minus_inf || m_head.prev != nullptr) fail("malformed minus infinity bucket");
    for(const Bucket* b = &m_head; b != nullptr; b = b->next) {
        total += b->keys.size();
        if(b->next != nullptr && b->next->prev != b) fail("broken prev link");
        if(b->next != nullptr) {
            for(Key k : b->keys) {
                if(k >= b->next->rep) fail("bucket key not below next representative");
            }
        }
        if(b->minus_inf) continue;
        if(b->keys.size() < m_lower || b->keys.size() > m_upper) {
            fail("bucket of size " + std::to_string(b->keys.size()) + " outside bounds");
        }
        for(Key k : b->keys) {
            if(k < b->rep) fail("bucket key below representative");
        }
        const bool has_rep = std::find(b->keys.begin(), b->keys.end(), b->rep) != b->keys.end();
        if(has_rep == b->rep_dead) fail("dead flag inconsistent with contents");
        if(m_config.sorted && !std::is_sorted(b->keys.begin(), b->keys.end())) fail("sorted bucket out of order");
        if(!reps.empty() && reps.back()->rep >= b->rep) fail("representatives not ascending");
        reps.push_back(b);
    }
    if(total != m_size) fail("size mismatch");
    if(reps.size() != m_reps) fail("representative count mismatch");

    // conceptual trie counts
    std::vector<size_t> node_count(w() + 1, 0), branch_count(w(), 0);
    for(unsigned l = 0; l <= w(); ++l) {
        for(size_t i = 0; i < reps.size(); ++i) {
            if(i == 0 || prefix(reps[i]->rep, l) != prefix(reps[i - 1]->rep, l)) ++node_count[l];
        }
    }
    for(size_t i = 1; i < reps.size(); ++i) ++branch_count[branch_level(reps[i - 1]->rep, reps[i]->rep)];
    if(node_count != m_node_count) fail("per-level node counts differ");
    if(branch_count != m_branch_count) fail("per-level branching counts differ");

    unsigned bot = 0;
    for(unsigned l = w(); l > 0; --l) {
        if(branch_count[l - 1]) {
            bot = l;
            break;
        }
    }
    unsigned top = 0;
    while(top < w() && top + 1 < 63 && node_count[top + 1] == (size_t(1) << (top + 1))) ++top;
    if(bot != m_bot) fail("ell_bot is " + std::to_string(m_bot) + ", expected " + std::to_string(bot));
    if(top != m_top) fail("ell_top is " + std::to_string(m_top) + ", expected " + std::to_string(top));

    // stored nodes: the branching nodes and their ancestors
    std::vector<std::map<Key, LssNode>> expect(w());
    for(size_t i = 1; i < reps.size(); ++i) {
        const Key r = reps[i]->rep;
        const unsigned d = branch_level(reps[i - 1]->rep, r);
        for(unsigned l = 0; l <= d; ++l) {
            const Key pre = prefix(r, l);
            if(expect[l].count(pre)) continue;
            // reps with this prefix form a contiguous range
            size_t a = i, z = i;
            while(a > 0 && prefix(reps[a - 1]->rep, l) == pre) --a;
            while(z + 1 < reps.size() && prefix(reps[z + 1]->rep, l) == pre) ++z;
            LssNode node;
            node.desc_min = const_cast<Bucket*>(reps[a]);
            node.desc_max = const_cast<Bucket*>(reps[z]);
            for(size_t j = a; j <= z; ++j) {
                if(bit_at(reps[j]->rep, l)) node.has_right = true;
                else node.has_left = true;
            }
            expect[l].emplace(pre, node);
        }
    }
    for(unsigned l = 0; l < w(); ++l) {
        if(l >= m_bot && !m_levels[l].empty()) fail("LSS entries at level " + std::to_string(l) + " >= ell_bot");
        if(m_levels[l].size() != expect[l].size()) {
            fail("level " + std::to_string(l) + " stores " + std::to_string(m_levels[l].size()) + " nodes, expected " +
                 std::to_string(expect[l].size()));
        }
        for(const auto& [pre, e] : expect[l]) {
            const LssNode* got = m_levels[l].find(pre);
            if(got == nullptr) fail("missing LSS node at level " + std::to_string(l));
            if(got->has_left != e.has_left || got->has_right != e.has_right) fail("child flags differ");
            if(got->desc_min != e.desc_min || got->desc_max != e.desc_max) fail("descendant links differ");
        }
    }
}

} // namespace pred
