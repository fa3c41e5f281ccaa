#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "predecessor_set.hpp"

namespace pred::detail {

/// \brief B-tree of maximum degree B with single-pass insertion and deletion.
///
/// Nodes split when full on the way down during insertion and are refilled to
/// at least B/2 keys on the way down during deletion, so no operation walks
/// back up. The per-node key container is the policy \c Keys, which must
/// provide size(), key(i), keys(), rank(x, search) (number of keys <= x),
/// insert_at(i, x, search), erase_at(i, search) and assign(span). Multi-key
/// changes from splits, merges and rotations go through assign().
template<typename Keys, unsigned B, typename Search>
class BTreeCore {
    static_assert(B >= 4 && B % 2 == 0, "B-tree degree must be even and at least 4");

public:
    static constexpr unsigned max_children = B;
    static constexpr unsigned max_keys = B - 1;
    static constexpr unsigned min_keys = B / 2 - 1;

private:
    struct Node {
        Keys keys;
        bool leaf;
        explicit Node(bool is_leaf) : leaf(is_leaf) {}
    };

    struct Inner : Node {
        std::array<Node*, B> child{};
        Inner() : Node(false) {}
    };

    static Inner* inner(Node* n) { return static_cast<Inner*>(n); }
    static const Inner* inner(const Node* n) { return static_cast<const Inner*>(n); }

    static Node* make(bool leaf) { return leaf ? new Node(true) : new Inner(); }

    static void destroy(Node* n) {
        if(n == nullptr) return;
        if(n->leaf) {
            delete n;
        } else {
            Inner* in = inner(n);
            for(size_t i = 0; i <= in->keys.size(); ++i) destroy(in->child[i]);
            delete in;
        }
    }

    static void free_node(Node* n) {
        if(n->leaf) delete n;
        else delete inner(n);
    }

    Node* m_root = nullptr;
    size_t m_size = 0;
    Search m_search;

    static constexpr unsigned T = B / 2; // minimum degree

    // splits the full child i of parent around its median
    void split_child(Inner* parent, unsigned i) {
        Node* y = parent->child[i];
        Node* z = make(y->leaf);

        std::array<Key, B> buf;
        const auto ys = y->keys.keys();
        std::copy(ys.begin(), ys.end(), buf.begin());
        const Key median = buf[T - 1];

        z->keys.assign(std::span<const Key>(buf.data() + T, T - 1));
        y->keys.assign(std::span<const Key>(buf.data(), T - 1));
        if(!y->leaf) {
            for(unsigned j = 0; j < T; ++j) inner(z)->child[j] = inner(y)->child[j + T];
        }

        for(unsigned j = parent->keys.size() + 1; j > i + 1; --j) parent->child[j] = parent->child[j - 1];
        parent->child[i + 1] = z;
        parent->keys.insert_at(i, median, m_search);
    }

    // merges child i+1 and separator i into child i
    void merge_children(Inner* parent, unsigned i) {
        Node* y = parent->child[i];
        Node* z = parent->child[i + 1];

        std::array<Key, B> buf;
        size_t n = 0;
        for(Key k : y->keys.keys()) buf[n++] = k;
        buf[n++] = parent->keys.key(i);
        for(Key k : z->keys.keys()) buf[n++] = k;

        if(!y->leaf) {
            const size_t ys = y->keys.size();
            for(size_t j = 0; j <= z->keys.size(); ++j) inner(y)->child[ys + 1 + j] = inner(z)->child[j];
        }
        y->keys.assign(std::span<const Key>(buf.data(), n));

        const size_t ps = parent->keys.size();
        for(size_t j = i + 1; j < ps; ++j) parent->child[j] = parent->child[j + 1];
        parent->keys.erase_at(i, m_search);
        free_node(z);
    }

    void set_key(Keys& keys, size_t i, Key x) {
        std::array<Key, B> buf;
        const auto ks = keys.keys();
        std::copy(ks.begin(), ks.end(), buf.begin());
        buf[i] = x;
        keys.assign(std::span<const Key>(buf.data(), ks.size()));
    }

    // moves the last key of child i-1 up and separator i-1 down into child i
    void rotate_right(Inner* parent, unsigned i) {
        Node* c = parent->child[i];
        Node* l = parent->child[i - 1];
        const size_t ls = l->keys.size();

        if(!c->leaf) {
            Inner* ci = inner(c);
            for(size_t j = c->keys.size() + 1; j > 0; --j) ci->child[j] = ci->child[j - 1];
            ci->child[0] = inner(l)->child[ls];
        }
        c->keys.insert_at(0, parent->keys.key(i - 1), m_search);
        set_key(parent->keys, i - 1, l->keys.key(ls - 1));
        l->keys.erase_at(ls - 1, m_search);
    }

    // moves the first key of child i+1 up and separator i down into child i
    void rotate_left(Inner* parent, unsigned i) {
        Node* c = parent->child[i];
        Node* r = parent->child[i + 1];
        const size_t cs = c->keys.size();

        if(!c->leaf) {
            Inner* ri = inner(r);
            inner(c)->child[cs + 1] = ri->child[0];
            for(size_t j = 0; j < r->keys.size(); ++j) ri->child[j] = ri->child[j + 1];
        }
        c->keys.insert_at(cs, parent->keys.key(i), m_search);
        set_key(parent->keys, i, r->keys.key(0));
        r->keys.erase_at(0, m_search);
    }

    static Key max_key(const Node* n) {
        while(!n->leaf) n = inner(n)->child[n->keys.size()];
        return n->keys.key(n->keys.size() - 1);
    }

    static Key min_key(const Node* n) {
        while(!n->leaf) n = inner(n)->child[0];
        return n->keys.key(0);
    }

    // audit helper: returns leaf depth, throws on violation
    size_t check_node(const Node* n, bool is_root, const Key* lo, const Key* hi, size_t& count) const {
        const auto ks = n->keys.keys();
        if(!is_root && ks.size() < min_keys) throw std::logic_error("btree: node underfull");
        if(ks.size() > max_keys) throw std::logic_error("btree: node overfull");
        if(is_root && ks.empty() && m_size != 0) throw std::logic_error("btree: empty root");
        for(size_t i = 0; i < ks.size(); ++i) {
            if(i > 0 && ks[i - 1] >= ks[i]) throw std::logic_error("btree: keys out of order");
            if(lo && ks[i] <= *lo) throw std::logic_error("btree: key below separator");
            if(hi && ks[i] >= *hi) throw std::logic_error("btree: key above separator");
        }
        if(!n->keys.canonical()) throw std::logic_error("btree: node key state not canonical");
        count += ks.size();
        if(n->leaf) return 0;

        size_t depth = SIZE_MAX;
        for(size_t i = 0; i <= ks.size(); ++i) {
            const Key* clo = i == 0 ? lo : &ks[i - 1];
            const Key* chi = i == ks.size() ? hi : &ks[i];
            const Node* c = inner(n)->child[i];
            if(c == nullptr) throw std::logic_error("btree: missing child");
            const size_t d = check_node(c, false, clo, chi, count);
            if(depth != SIZE_MAX && d != depth) throw std::logic_error("btree: leaves at different depths");
            depth = d;
        }
        return depth + 1;
    }

public:
    explicit BTreeCore(Search search = Search{}) : m_search(search) {}
    ~BTreeCore() { destroy(m_root); }

    BTreeCore(const BTreeCore&) = delete;
    BTreeCore& operator=(const BTreeCore&) = delete;

    BTreeCore(BTreeCore&& o) noexcept : m_root(o.m_root), m_size(o.m_size), m_search(o.m_search) {
        o.m_root = nullptr;
        o.m_size = 0;
    }

    BTreeCore& operator=(BTreeCore&& o) noexcept {
        if(this != &o) {
            destroy(m_root);
            m_root = o.m_root;
            m_size = o.m_size;
            m_search = o.m_search;
            o.m_root = nullptr;
            o.m_size = 0;
        }
        return *this;
    }

    size_t size() const { return m_size; }
    bool empty() const { return m_size == 0; }
    Search search() const { return m_search; }

    size_t height() const {
        size_t h = 0;
        for(const Node* n = m_root; n != nullptr; n = n->leaf ? nullptr : inner(n)->child[0]) ++h;
        return h;
    }

    bool insert(Key x) {
        if(m_root == nullptr) {
            m_root = make(true);
            m_root->keys.insert_at(0, x, m_search);
            m_size = 1;
            return true;
        }
        if(m_root->keys.size() == max_keys) {
            Inner* s = new Inner();
            s->child[0] = m_root;
            m_root = s;
            split_child(s, 0);
        }

        Node* n = m_root;
        for(;;) {
            unsigned r = unsigned(n->keys.rank(x, m_search));
            if(r > 0 && n->keys.key(r - 1) == x) return false;
            if(n->leaf) {
                n->keys.insert_at(r, x, m_search);
                ++m_size;
                return true;
            }
            Inner* in = inner(n);
            if(in->child[r]->keys.size() == max_keys) {
                split_child(in, r);
                const Key sep = in->keys.key(r);
                if(x == sep) return false;
                if(x > sep) ++r;
            }
            n = in->child[r];
        }
    }

    bool erase(Key x) {
        if(m_root == nullptr) return false;

        bool removed = false;
        Node* n = m_root;
        for(;;) {
            const unsigned r = unsigned(n->keys.rank(x, m_search));
            const bool found = r > 0 && n->keys.key(r - 1) == x;

            if(n->leaf) {
                if(found) {
                    n->keys.erase_at(r - 1, m_search);
                    removed = true;
                }
                break;
            }

            Inner* in = inner(n);
            if(found) {
                const unsigned i = r - 1;
                Node* y = in->child[i];
                Node* z = in->child[i + 1];
                if(y->keys.size() > min_keys) {
                    const Key p = max_key(y);
                    set_key(in->keys, i, p);
                    x = p;
                    n = y;
                } else if(z->keys.size() > min_keys) {
                    const Key s = min_key(z);
                    set_key(in->keys, i, s);
                    x = s;
                    n = z;
                } else {
                    merge_children(in, i);
                    n = y;
                }
                continue;
            }

            unsigned i = r;
            if(in->child[i]->keys.size() == min_keys) {
                const size_t ps = in->keys.size();
                if(i > 0 && in->child[i - 1]->keys.size() > min_keys) {
                    rotate_right(in, i);
                } else if(i < ps && in->child[i + 1]->keys.size() > min_keys) {
                    rotate_left(in, i);
                } else if(i < ps) {
                    merge_children(in, i);
                } else {
                    merge_children(in, i - 1);
                    --i;
                }
            }
            n = in->child[i];
        }

        if(m_root->keys.size() == 0) {
            Node* old = m_root;
            m_root = old->leaf ? nullptr : inner(old)->child[0];
            free_node(old);
        }
        if(removed) --m_size;
        return removed;
    }

    PredResult predecessor(Key x) const {
        PredResult best;
        const Node* n = m_root;
        while(n != nullptr) {
            const size_t r = n->keys.rank(x, m_search);
            if(r > 0) {
                const Key k = n->keys.key(r - 1);
                if(k == x) return k;
                best = k;
            }
            n = n->leaf ? nullptr : inner(n)->child[r];
        }
        return best;
    }

    /// Visits all keys in ascending order.
    template<typename F>
    void for_each(F&& f) const {
        visit(m_root, f);
    }

    /// Verifies ordering, occupancy, balance and node states; throws std::logic_error on violation.
    void check_invariants() const {
        if(m_root == nullptr) {
            if(m_size != 0) throw std::logic_error("btree: size without root");
            return;
        }
        size_t count = 0;
        check_node(m_root, true, nullptr, nullptr, count);
        if(count != m_size) throw std::logic_error("btree: size mismatch");
    }

private:
    template<typename F>
    static void visit(const Node* n, F& f) {
        if(n == nullptr) return;
        const auto ks = n->keys.keys();
        for(size_t i = 0; i < ks.size(); ++i) {
            if(!n->leaf) visit(inner(n)->child[i], f);
            f(ks[i]);
        }
        if(!n->leaf) visit(inner(n)->child[ks.size()], f);
    }
};

} // namespace pred::detail
