// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <pred/fusion_node.hpp>
#include <pred/harness.hpp>
#include <pred/memory_meter.hpp>
#include <pred/oracle_set.hpp>
#include <pred/registry.hpp>
#include <pred/universe_sampling.hpp>
#include <pred/word_ops.hpp>
#include <pred/yfast.hpp>

#include "oracles.hpp"
#include "scenarios.hpp"

using namespace pred;

namespace {

/// Collects failures of one criterion; the first few are printed.
struct Check {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if(!ok) failures.push_back(what);
    }
    template<typename A, typename B>
    void equal(const A& a, const B& b, const std::string& what) {
        if(!(a == b)) failures.push_back(what);
    }
};

std::string str(PredResult r) { return r ? std::to_string(*r) : std::string("none"); }

int run(const char* name, double limit_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch(const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if(s > limit_s) {
        std::ostringstream os;
        os << "runtime " << s << " s exceeds " << limit_s << " s";
        c.failures.push_back(os.str());
    }
    std::printf("%s %-28s %8.2f s", c.failures.empty() ? "PASS" : "FAIL", name, s);
    for(const auto& n : c.notes) std::printf("  %s", n.c_str());
    std::printf("\n");
    for(size_t i = 0; i < c.failures.size() && i < 10; ++i) std::printf("    - %s\n", c.failures[i].c_str());
    if(c.failures.size() > 10) std::printf("    ... %zu more\n", c.failures.size() - 10);
    std::fflush(stdout);
    return c.failures.empty() ? 0 : 1;
}

// ---- worked examples

void worked_examples(Check& c) {
    const std::vector<Key> keys = {2, 3, 12, 27};
    auto node = FusionNode<8>::rebuild(keys);
    c.equal(node.mask(), uint64_t(0b11001), "M of rebuild({2,3,12,27})");
    const uint8_t branch[] = {0b000, 0b001, 0b010, 0b100};
    const uint8_t freebits[] = {0b000, 0b000, 0b001, 0b011};
    for(unsigned i = 0; i < 4; ++i) {
        c.equal(node.branch_row(i), branch[i], "branch row " + std::to_string(i));
        c.equal(node.free_row(i), freebits[i], "free row " + std::to_string(i));
    }
    c.equal(node.match(25), 4u, "match(25)");
    c.equal(node.match(0b11000), 4u, "match(11000)");
    c.equal(node.match(4), 1u, "match(4)");
    c.equal(node.match(0b00111), 2u, "match(00111)");
    c.equal(node.predecessor(25), PredResult(12), "predecessor(25)");
    c.equal(node.predecessor(4), PredResult(3), "predecessor(4)");

    c.expect(node.erase(12), "erase(12)");
    c.equal(node.mask(), uint64_t(0b10001), "M after deleting 12");
    const uint8_t branch2[] = {0b00, 0b01, 0b10};
    const uint8_t free2[] = {0b00, 0b00, 0b01};
    for(unsigned i = 0; i < 3; ++i) {
        c.equal(node.branch_row(i), branch2[i], "branch row after delete " + std::to_string(i));
        c.equal(node.free_row(i), free2[i], "free row after delete " + std::to_string(i));
    }

    c.equal(bits::extract_bits(0b11011, 0b11001), uint64_t(0b111), "extract_bits key 27");
    c.equal(bits::extract_bits(0b01100, 0b11001), uint64_t(0b010), "extract_bits key 12");
    c.equal(bits::select1(0b11001, 2), 3, "select1(25, 2)");
    c.equal(bits::select1(0b11001, 3), 4, "select1(25, 3)");

    for(TopKind top : {TopKind::array, TopKind::hash}) {
        UniverseSampling us(Universe(5), scenario::small_sampling_config(top));
        for(Key k : {1, 2, 4, 6, 7, 21, 19}) us.insert(k);
        c.equal(us.bucket_of(19), 2u, "bucket_of(19)");
        c.equal(us.truncated(19), 3u, "truncated(19)");
        c.equal(us.top_locate(1), std::optional<uint64_t>(0), "top_locate(1)");
        c.equal(us.predecessor(20), PredResult(19), "us predecessor(20)");
        c.equal(us.predecessor(10), PredResult(7), "us predecessor(10)");
        c.equal(us.predecessor(0), PredResult(), "us predecessor(0)");
        c.equal(us.bucket_pred(0, 5), PredResult(4), "B1 pred(5)");
        c.equal(us.bucket_pred(2, 4), PredResult(3), "B2 pred(4)");
        c.equal(us.bucket_pred(2, 2), PredResult(), "B2 pred(2)");
    }
}

// ---- fusion canonical rebuild

template<unsigned K>
void canonical_walk(Check& c, unsigned w, uint64_t seed, int steps) {
    std::mt19937_64 rng(seed);
    const Key mask = Universe(w).max_key();
    std::vector<Key> pool;
    const Key base = rng() & mask;
    for(int i = 0; i < 40; ++i) pool.push_back((base ^ (rng() & (rng() % 2 ? 0xFF : mask))) & mask);

    FusionNode<K> node;
    std::set<Key> ref;
    for(int s = 0; s < steps; ++s) {
        const Key x = pool[rng() % pool.size()];
        const bool ins = ref.size() < K && (ref.empty() || rng() % 2);
        const bool a = ins ? node.insert(x) : node.erase(x);
        const bool b = ins ? ref.insert(x).second : ref.erase(x) == 1;
        const std::vector<Key> keys(ref.begin(), ref.end());
        if(a != b || !(node == FusionNode<K>::rebuild(keys))) {
            c.expect(false, "k=" + std::to_string(K) + " w=" + std::to_string(w) + " diverges at step " + std::to_string(s));
            return;
        }
    }
}

void fusion_canonical(Check& c) {
    for(unsigned w : {32u, 40u, 64u}) {
        canonical_walk<8>(c, w, 100 + w, 10'000);
        canonical_walk<16>(c, w, 200 + w, 10'000);
    }
}

// ---- exhaustive small universe

template<typename Set>
void compare_all(Check& c, const Set& s, const std::vector<Key>& keys, const char* what) {
    for(Key x = 0; x < 32; ++x) {
        const auto got = s.predecessor(x);
        const auto want = oracle::brute_pred(keys, x);
        if(got != want) {
            std::ostringstream os;
            os << what << " {";
            for(Key k : keys) os << ' ' << k;
            os << " } pred(" << x << ") = " << str(got) << ", expected " << str(want);
            c.expect(false, os.str());
        }
    }
}

void exhaustive(Check& c) {
    std::vector<Key> keys;
    size_t sets = 0;
    const auto ycfg = scenario::small_trie_config();
    auto visit = [&] {
        ++sets;
        compare_all(c, FusionNode<8>::rebuild(keys), keys, "fusion");
        compare_all(c, FusionNode<16>::rebuild(keys), keys, "fusion-wide");

        YFastTrie grown(Universe(5), ycfg);
        for(Key k : keys) grown.insert(k);
        compare_all(c, grown, keys, "yfast by inserts");
        // the same set reached by deleting the complement from the full universe
        YFastTrie shrunk(Universe(5), ycfg);
        for(Key k = 0; k < 32; ++k) shrunk.insert(k);
        for(Key k = 0; k < 32; ++k) {
            if(std::find(keys.begin(), keys.end(), k) == keys.end()) shrunk.erase(k);
        }
        compare_all(c, shrunk, keys, "yfast by deletes");

        for(TopKind top : {TopKind::array, TopKind::hash}) {
            UniverseSampling a(Universe(5), scenario::small_sampling_config(top));
            for(Key k : keys) a.insert(k);
            compare_all(c, a, keys, "universe sampling by inserts");
            UniverseSampling b(Universe(5), scenario::small_sampling_config(top));
            for(Key k = 0; k < 32; ++k) b.insert(k);
            for(Key k = 0; k < 32; ++k) {
                if(std::find(keys.begin(), keys.end(), k) == keys.end()) b.erase(k);
            }
            compare_all(c, b, keys, "universe sampling by deletes");
        }
    };
    std::function<void(Key)> rec = [&](Key from) {
        visit();
        if(keys.size() == 4 || c.failures.size() > 20) return;
        for(Key k = from; k < 32; ++k) {
            keys.push_back(k);
            rec(k + 1);
            keys.pop_back();
        }
    };
    rec(0);
    c.equal(sets, size_t(1 + 32 + 496 + 4960 + 35960), "number of key sets visited");
    c.notes.push_back(std::to_string(sets) + " sets x 32 queries");
}

// ---- differential soak

void soak(Check& c) {
    constexpr uint64_t OPS = 100'000;
    size_t configs = 0, ops = 0;
    for(unsigned w : {32u, 40u, 64u}) {
        std::map<unsigned, Trace> traces; // one trace per key window
        for(const auto& spec : all_configurations(w)) {
            const unsigned wb = default_window_bits(spec);
            auto it = traces.find(wb);
            if(it == traces.end()) it = traces.emplace(wb, make_trace(w, wb, OPS, 1000 + w + wb)).first;
            auto set = make_structure(spec);
            const auto r = verify(*set, it->second, 25'000);
            ++configs;
            ops += r.ops_checked;
            if(!r.ok) {
                c.expect(false, spec.name + " " + format_params(spec.params) + " w=" + std::to_string(w) + ": " + r.message);
            }
        }
    }
    c.notes.push_back(std::to_string(configs) + " configurations, " + std::to_string(ops) + " ops");
}

// ---- y-fast insert and delete scenario

void yfast_scenario(Check& c) {
    for(bool sorted : {false, true}) {
        const std::string mode = sorted ? " (sorted)" : " (unsorted)";
        using BV = YFastTrie::BucketView;
        {
            YFastTrie t(Universe(5), scenario::small_trie_config(sorted));
            scenario::build_small_trie(t);
            t.check_invariants();
            size_t nodes = 0;
            for(unsigned l = 0; l < 5; ++l) nodes += t.lss_nodes(l);
            const unsigned bot = t.ell_bot();
            c.expect(t.insert(8), "insert 8" + mode);
            t.check_invariants();
            const auto b = t.buckets();
            c.equal(b.size(), size_t(5), "bucket count after insert 8" + mode);
            if(b.size() == 5) {
                c.equal(b[1], BV{false, 0, true, {3, 6}}, "bucket {3,6}" + mode);
                c.equal(b[2], BV{false, 7, false, {7, 8, 9}}, "bucket {7,8,9} with rep 7" + mode);
            }
            c.equal(t.ell_bot(), bot, "ell_bot unchanged" + mode);
            size_t after = 0;
            for(unsigned l = 0; l < 5; ++l) after += t.lss_nodes(l);
            c.equal(after, nodes + 2, "two new LSS nodes" + mode);
        }
        {
            YFastTrie t(Universe(5), scenario::small_trie_config(sorted));
            scenario::build_small_trie(t);
            c.expect(t.erase(21), "erase 21" + mode);
            t.check_invariants();
            const auto b = t.buckets();
            c.equal(b.size(), size_t(3), "bucket count after delete 21" + mode);
            if(b.size() == 3) c.equal(b[2], BV{false, 17, false, {17, 18, 19, 23}}, "merged bucket" + mode);
            for(const auto& v : b) c.expect(v.minus_infinity || v.rep != 20, "rep 20 removed" + mode);
            c.equal(t.ell_bot(), t.ell_top(), "ell_bot == ell_top" + mode);
        }
    }
}

// ---- word ops

void word_ops(Check& c) {
    const char* env = std::getenv("PREDBENCH_NO_INTRINSICS");
    const bool disabled = env != nullptr && std::string(env) == "1";
    c.notes.push_back(std::string("PREDBENCH_NO_INTRINSICS=") + (disabled ? "1" : "unset"));
    c.equal(bits::intrinsics_enabled(), bits::hw_supported() && !disabled, "dispatch follows environment");
    if(!bits::hw_supported()) {
        c.expect(false, "CPU lacks BMI2/AVX2, intrinsic path cannot be compared");
        return;
    }
    std::mt19937_64 rng(disabled ? 77 : 78);
    constexpr int N = 100'000;
    size_t bad = 0;
    for(int i = 0; i < N; ++i) {
        uint64_t x = rng(), m = rng();
        if(i % 3 == 1) x &= rng() & rng();
        if(i % 3 == 2) m &= rng() & rng();
        const unsigned h = unsigned(rng() % 66);
        bad += bits::hw::msb0(x) != bits::portable::msb0(x);
        bad += bits::hw::tzcnt(x) != bits::portable::tzcnt(x);
        bad += bits::hw::count_trailing_ones(x) != bits::portable::count_trailing_ones(x);
        bad += bits::hw::popcount(x) != bits::portable::popcount(x);
        bad += bits::hw::select1(x, h) != bits::portable::select1(x, h);
        bad += bits::hw::extract_bits(x, m) != bits::portable::extract_bits(x, m);
        bad += bits::extract_bits(x, m) != bits::portable::extract_bits(x, m);
        const uint8_t y8 = uint8_t(rng());
        bad += bits::hw::packed_rank8(x, y8) != bits::portable::packed_rank8(x, y8);
        const Word256 W(rng(), rng(), rng(), rng());
        const uint16_t y16 = uint16_t(rng());
        bad += bits::hw::packed_rank16(W, y16) != bits::portable::packed_rank16(W, y16);
        bad += bits::packed_rank16(W, y16) != bits::portable::packed_rank16(W, y16);
    }
    c.equal(bad, size_t(0), std::to_string(bad) + " mismatches");
}

// ---- memory trends

void memory_trends(Check& c) {
    if(!memory::available()) {
        c.expect(false, "allocation meter not linked");
        return;
    }
    auto series = [&](const std::string& name, const std::string& param, const std::vector<std::string>& values) {
        std::vector<double> bpk;
        std::ostringstream note;
        note << name << ":";
        for(const auto& v : values) {
            WorkloadSpec spec;
            spec.structure = resolve_structure(name, {{param, v}}, 64);
            spec.n = uint64_t(1) << 20;
            spec.q = 1;
            spec.iterations = 1;
            spec.seed = 1;
            const auto r = run_experiment(spec);
            bpk.push_back(*r.rows.front().bits_per_key);
            char buf[64];
            std::snprintf(buf, sizeof buf, " %s=%s %.1f", param.c_str(), v.c_str(), bpk.back());
            note << buf;
        }
        c.notes.push_back(note.str() + " bits/key");
        for(size_t i = 1; i < bpk.size(); ++i) {
            c.expect(bpk[i] < bpk[i - 1], name + " " + param + "=" + values[i] + " not below " + param + "=" + values[i - 1]);
        }
    };
    series("yfast-ul", "t", {"64", "128", "256", "512"});
    series("btree-bs", "B", {"8", "16", "64", "128", "256"});
}

// ---- harness protocol

void harness_protocol(Check& c) {
    for(const auto& name : structure_names()) {
        // the array top level costs u/b entries; at w = 40 with default b that is 8 GB
        const unsigned w = name.rfind("us-", 0) == 0 ? 32 : 64;
        WorkloadSpec spec;
        spec.structure = resolve_structure(name, {}, w);
        spec.n = 10'000;
        spec.q = 10'000;
        spec.iterations = 2;
        spec.seed = 42;
        const auto r = run_experiment(spec);
        for(unsigned i = 0; i < spec.iterations; ++i) {
            c.equal(r.final_sizes[i], size_t(0), name + " not empty after phase 3");
            const auto expect = oracle_checksum(generate_workload(w, spec.n, spec.q, spec.seed + i));
            c.equal(r.checksums[i], expect, name + " checksum differs from the oracle's");
        }
    }
}

} // namespace

int main() {
    int failed = 0;
    failed += run("worked-examples", 1, worked_examples);
    failed += run("fusion-canonical-rebuild", 30, fusion_canonical);
    failed += run("exhaustive-small-universe", 60, exhaustive);
    failed += run("differential-soak", 300, soak);
    failed += run("yfast-scenario-replay", 1, yfast_scenario);
    failed += run("word-op-equivalence", 10, word_ops);
    failed += run("memory-trends", 120, memory_trends);
    failed += run("harness-protocol", 60, harness_protocol);
    std::printf("%d of 8 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
