#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "registry.hpp"

namespace pred {

/// \brief Deterministic 64-bit generator for one stream of one iteration.
///
/// std::mt19937_64 seeded through std::seed_seq with the seed's two 32-bit
/// halves and the stream number. Stream 0 draws insert keys, stream 1 query
/// keys; iteration i uses seed base + i.
std::mt19937_64 make_rng(uint64_t seed, uint32_t stream);

inline constexpr uint32_t INSERT_STREAM = 0;
inline constexpr uint32_t QUERY_STREAM = 1;

struct WorkloadSpec {
    StructureSpec structure;
    uint64_t n = uint64_t(1) << 20;
    uint64_t q = 1'000'000;
    unsigned iterations = 5;
    uint64_t seed = 1;
};

struct Workload {
    std::vector<Key> inserts; ///< n uniform draws on [0, 2^w), duplicates possible
    std::vector<Key> queries; ///< q uniform draws on [min S, max S)
};

/// \throws std::invalid_argument if n < 2, q < 1, or all inserts are equal
Workload generate_workload(unsigned width, uint64_t n, uint64_t q, uint64_t seed);

/// One CSV row. An absent iteration marks the average row; absent memory
/// fields mean the allocation meter is not linked.
struct Measurement {
    std::string structure;
    std::string params;
    unsigned width = 0;
    uint64_t n = 0;
    std::optional<unsigned> iteration;
    uint64_t seed = 0;
    double insert_ns = 0;
    double query_ns = 0;
    double delete_ns = 0;
    double insert_ops_s = 0;
    double query_ops_s = 0;
    double delete_ops_s = 0;
    std::optional<double> peak_bytes;
    std::optional<double> bytes_after_insert;
    std::optional<double> bits_per_key;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct ExperimentResult {
    std::vector<Measurement> rows;   ///< one per iteration, then the average row
    std::vector<uint64_t> checksums; ///< query checksum per iteration
    std::vector<size_t> final_sizes; ///< structure size after the delete phase
};

/// Folds a query answer into a running checksum.
inline uint64_t checksum_step(uint64_t acc, PredResult r) {
    return acc * 0x100000001b3ULL + (r ? *r + 1 : 0);
}

/// Checksum of the oracle's answers for a workload.
uint64_t oracle_checksum(const Workload& w);

/// \brief Runs the three-phase protocol: insert all keys, query, delete in insertion order.
ExperimentResult run_experiment(const WorkloadSpec& spec);

/// Average of rows, flagged by an absent iteration.
Measurement average(const std::vector<Measurement>& rows);

std::vector<std::string> csv_columns();
void write_csv(std::ostream& out, const std::vector<Measurement>& rows);
/// \throws std::runtime_error naming the path on I/O failure
void write_csv(const std::string& path, const std::vector<Measurement>& rows);
/// \throws std::runtime_error on malformed input
std::vector<Measurement> read_csv(std::istream& in);
std::vector<Measurement> read_csv(const std::string& path);

// ---- differential verification

enum class OpKind : uint8_t { insert, erase, predecessor };

struct Op {
    OpKind kind;
    Key key;
};

/// An operation sequence with the oracle's answer to each operation.
struct Trace {
    unsigned width = 0;
    uint64_t seed = 0;
    std::vector<Op> ops;
    std::vector<PredResult> expected; ///< for updates: 1 if the oracle returned true, else absent
    size_t max_size = 0;              ///< largest oracle size reached
};

/// \brief Random operation sequence over keys in a window of 2^window_bits
/// keys at a random offset. The first half is insert-heavy, the second
/// delete-heavy. Deletes and some inserts and queries target present keys.
Trace make_trace(unsigned width, unsigned window_bits, uint64_t ops, uint64_t seed);

/// Window size that keeps a structure's memory bounded under make_trace.
unsigned default_window_bits(const StructureSpec& spec);

struct VerifyResult {
    bool ok = true;
    size_t ops_checked = 0;
    size_t first_divergence = 0; ///< index of the first diverging op
    std::string message;
};

/// \brief Replays a trace against a structure, comparing every result.
///
/// The structure's invariant audit runs every audit_every ops (0 = only at
/// the end); an audit failure counts as a divergence at that op.
VerifyResult verify(AnySet& set, const Trace& trace, size_t audit_every = 0);

std::string describe(const Op& op);

} // namespace pred
