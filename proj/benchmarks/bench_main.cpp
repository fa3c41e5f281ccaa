#include <benchmark/benchmark.h>

#include <random>
#include <algorithm>
#include <vector>

#include <pred/btree.hpp>
#include <pred/fusion_node.hpp>
#include <pred/fusion_tree.hpp>
#include <pred/universe_sampling.hpp>
#include <pred/word_ops.hpp>
#include <pred/yfast.hpp>

using namespace pred;

namespace {

std::vector<Key> draws(size_t n, unsigned w, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Key> v(n);
    for(auto& x : v) x = rng() & Universe(w).max_key();
    return v;
}

// ---- word ops, both paths

template<bool HW>
void BM_ExtractBits(benchmark::State& st) {
    if(HW && !bits::hw_supported()) {
        st.SkipWithError("no BMI2");
        return;
    }
    const auto x = draws(1024, 64, 1), m = draws(1024, 64, 2);
    size_t i = 0;
    for(auto _ : st) {
        const uint64_t r = HW ? bits::hw::extract_bits(x[i], m[i]) : bits::portable::extract_bits(x[i], m[i]);
        benchmark::DoNotOptimize(r);
        i = (i + 1) & 1023;
    }
}
BENCHMARK(BM_ExtractBits<true>);
BENCHMARK(BM_ExtractBits<false>);

template<bool HW>
void BM_PackedRank16(benchmark::State& st) {
    if(HW && !bits::hw_supported()) {
        st.SkipWithError("no AVX2");
        return;
    }
    Word256 W;
    for(unsigned l = 0; l < 16; ++l) W.set_lane16(l, uint16_t(l * 4000));
    const auto y = draws(1024, 16, 3);
    size_t i = 0;
    for(auto _ : st) {
        const unsigned r = HW ? bits::hw::packed_rank16(W, uint16_t(y[i])) : bits::portable::packed_rank16(W, uint16_t(y[i]));
        benchmark::DoNotOptimize(r);
        i = (i + 1) & 1023;
    }
}
BENCHMARK(BM_PackedRank16<true>);
BENCHMARK(BM_PackedRank16<false>);

// ---- fusion node rank

template<unsigned K>
void BM_FusionNodeRank(benchmark::State& st) {
    auto keys = draws(K, 64, 4);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    const auto node = FusionNode<K>::rebuild(keys);
    const auto q = draws(1024, 64, 5);
    const auto search = st.range(0) ? RankSearch::packed : RankSearch::linear;
    size_t i = 0;
    for(auto _ : st) {
        benchmark::DoNotOptimize(node.predecessor(q[i], search));
        i = (i + 1) & 1023;
    }
}
BENCHMARK(BM_FusionNodeRank<8>)->ArgName("packed")->Arg(0)->Arg(1);
BENCHMARK(BM_FusionNodeRank<16>)->ArgName("packed")->Arg(0)->Arg(1);

// ---- whole structures: predecessor queries on n random keys

template<typename Make>
void queries(benchmark::State& st, unsigned w, Make make) {
    const size_t n = size_t(st.range(0));
    auto set = make();
    for(Key k : draws(n, w, 6)) set->insert(k);
    const auto q = draws(4096, w, 7);
    size_t i = 0;
    for(auto _ : st) {
        benchmark::DoNotOptimize(set->predecessor(q[i]));
        i = (i + 1) & 4095;
    }
    st.SetItemsProcessed(int64_t(st.iterations()));
}

void BM_BTreeQuery(benchmark::State& st) {
    queries(st, 64, [] { return std::make_unique<BTree<64>>(NodeSearch::binary); });
}
void BM_FusionTreeQuery(benchmark::State& st) {
    queries(st, 64, [] { return std::make_unique<FusionTree<16>>(); });
}
void BM_YFastQuery(benchmark::State& st) {
    queries(st, 64, [] { return std::make_unique<YFastTrie>(Universe(64)); });
}
void BM_UniverseSamplingQuery(benchmark::State& st) {
    queries(st, 32, [] { return std::make_unique<UniverseSampling>(Universe(32)); });
}
BENCHMARK(BM_BTreeQuery)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_FusionTreeQuery)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_YFastQuery)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_UniverseSamplingQuery)->Arg(1 << 16)->Arg(1 << 20);

void BM_YFastInsertErase(benchmark::State& st) {
    const auto keys = draws(1 << 16, 64, 8);
    for(auto _ : st) {
        YFastTrie t{Universe(64)};
        for(Key k : keys) t.insert(k);
        for(Key k : keys) t.erase(k);
        benchmark::DoNotOptimize(t.size());
    }
    st.SetItemsProcessed(int64_t(st.iterations()) * 2 * int64_t(keys.size()));
}
BENCHMARK(BM_YFastInsertErase);

} // namespace

BENCHMARK_MAIN();
