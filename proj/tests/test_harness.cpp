#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <pred/harness.hpp>
#include <pred/memory_meter.hpp>
#include <pred/oracle_set.hpp>
#include <pred/registry.hpp>

using namespace pred;

TEST(Workload, Deterministic) {
    const auto a = generate_workload(32, 1000, 500, 7);
    const auto b = generate_workload(32, 1000, 500, 7);
    EXPECT_EQ(a.inserts, b.inserts);
    EXPECT_EQ(a.queries, b.queries);
    const auto c = generate_workload(32, 1000, 500, 8);
    EXPECT_NE(a.inserts, c.inserts);
}

TEST(Workload, QueryRange) {
    for(unsigned w : {32u, 40u, 64u}) {
        const auto wl = generate_workload(w, 5000, 5000, w);
        const auto [lo, hi] = std::minmax_element(wl.inserts.begin(), wl.inserts.end());
        for(Key q : wl.queries) {
            ASSERT_GE(q, *lo);
            ASSERT_LT(q, *hi);
        }
        for(Key k : wl.inserts) ASSERT_TRUE(Universe(w).contains(k));
    }
}

TEST(Workload, DuplicatesMarkedByInsert) {
    // 2^20 draws from 2^32 keys: about n^2 / 2^33 = 128 duplicates
    const auto wl = generate_workload(32, uint64_t(1) << 20, 1, 3);
    auto set = make_structure(resolve_structure("btree-bs", {}, 32));
    size_t dup = 0;
    for(Key k : wl.inserts) dup += !set->insert(k);
    const std::set<Key> distinct(wl.inserts.begin(), wl.inserts.end());
    EXPECT_EQ(dup, wl.inserts.size() - distinct.size());
    EXPECT_EQ(set->size(), distinct.size());
    EXPECT_GT(dup, 60u);
    EXPECT_LT(dup, 250u);
}

TEST(Workload, Degenerate) {
    EXPECT_THROW(generate_workload(32, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(generate_workload(32, 10, 0, 1), std::invalid_argument);
}

TEST(Csv, RoundTrip) {
    Measurement m;
    m.structure = "yfast-ul";
    m.params = "c=2;gamma=0.25;t=128";
    m.width = 64;
    m.n = 1024;
    m.iteration = 0;
    m.seed = 9;
    m.insert_ns = 123456.5;
    m.query_ns = 0.1;
    m.delete_ns = 1e12;
    m.insert_ops_s = 1.0 / 3.0;
    m.query_ops_s = 7;
    m.delete_ops_s = 8;
    m.peak_bytes = 4096;
    m.bytes_after_insert = 2048;
    m.bits_per_key = 16;
    Measurement n = m;
    n.iteration = 1;
    n.peak_bytes.reset();
    n.bytes_after_insert.reset();
    n.bits_per_key.reset();
    const std::vector<Measurement> rows = {m, n, average({m, n})};

    std::stringstream ss;
    write_csv(ss, rows);
    EXPECT_EQ(read_csv(ss), rows);
}

TEST(Csv, HeaderOnly) {
    const auto path = (std::filesystem::temp_directory_path() / "predbench_header_only.csv").string();
    write_csv(path, {});
    std::ifstream in(path);
    std::string header, extra;
    std::getline(in, header);
    EXPECT_EQ(header,
              "structure,params,width,n,iteration,seed,insert_ns,query_ns,delete_ns,insert_ops_s,query_ops_s,"
              "delete_ops_s,peak_bytes,bytes_after_insert,bits_per_key");
    EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
    EXPECT_TRUE(read_csv(path).empty());
    std::filesystem::remove(path);
}

TEST(Csv, ErrorsNamePath) {
    try {
        write_csv("/nonexistent-dir/x.csv", {});
        FAIL();
    } catch(const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
    }
    std::stringstream bad("structure,params\nfoo\n");
    EXPECT_THROW(read_csv(bad), std::runtime_error);
}

TEST(Experiment, IterationsAndAverage) {
    WorkloadSpec spec;
    spec.structure = resolve_structure("btree-bs", {}, 40);
    spec.n = 2000;
    spec.q = 1000;
    spec.iterations = 5;
    spec.seed = 100;
    const auto r = run_experiment(spec);
    ASSERT_EQ(r.rows.size(), 6u);
    for(unsigned i = 0; i < 5; ++i) {
        EXPECT_EQ(r.rows[i].iteration, i);
        EXPECT_EQ(r.rows[i].seed, 100 + i);
        EXPECT_EQ(r.final_sizes[i], 0u);
        EXPECT_EQ(r.checksums[i], oracle_checksum(generate_workload(40, 2000, 1000, 100 + i)));
    }
    EXPECT_FALSE(r.rows[5].iteration);
    double s = 0;
    for(unsigned i = 0; i < 5; ++i) s += r.rows[i].query_ns;
    EXPECT_DOUBLE_EQ(r.rows[5].query_ns, s / 5);
    ASSERT_TRUE(r.rows[0].bits_per_key);
    EXPECT_DOUBLE_EQ(*r.rows[0].bits_per_key, 8.0 * *r.rows[0].bytes_after_insert / 2000);
}

TEST(Experiment, RejectsUnsupportedWidth) {
    EXPECT_THROW(resolve_structure("us-array", {}, 64), std::invalid_argument);
    EXPECT_THROW(resolve_structure("nope", {}, 32), std::invalid_argument);
}

TEST(MemoryMeter, TracksAllocation) {
    ASSERT_TRUE(memory::available());
    memory::Scope scope;
    {
        auto block = std::make_unique<char[]>(1 << 20);
        block[0] = 1;
        EXPECT_GE(scope.live(), size_t(1) << 20);
    }
    EXPECT_LT(scope.live(), size_t(1) << 10);
    EXPECT_GE(scope.peak(), size_t(1) << 20);
}

TEST(MemoryMeter, OracleLowerBound) {
    constexpr size_t n = 100'000;
    memory::Scope scope;
    auto set = make_structure(resolve_structure("oracle", {}, 64));
    for(Key k = 0; k < n; ++k) set->insert(k * 3);
    EXPECT_GE(scope.live(), 8 * n);
}

TEST(Verify, ReportsDivergence) {
    const auto trace = make_trace(32, 12, 2000, 5);
    auto good = make_structure(resolve_structure("btree-ls", {}, 32));
    EXPECT_TRUE(verify(*good, trace, 100).ok);

    // a structure that forgets one key
    struct Lossy : AnySet {
        OracleSet s;
        bool insert(Key x) override { return x % 97 == 0 ? !s.contains(x) : s.insert(x); }
        bool erase(Key x) override { return s.erase(x); }
        PredResult predecessor(Key x) const override { return s.predecessor(x); }
        size_t size() const override { return s.size(); }
        void audit() const override {}
    } lossy;
    const auto r = verify(lossy, trace);
    EXPECT_FALSE(r.ok);
    EXPECT_LT(r.first_divergence, trace.ops.size());
    EXPECT_FALSE(r.message.empty());
}
