#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pred/harness.hpp>
#include <pred/memory_meter.hpp>
#include <pred/registry.hpp>
#include <pred/word_ops.hpp>

namespace {

pred::Params collect_params(const std::vector<std::string>& items) {
    pred::Params p;
    for(const auto& item : items) {
        for(const auto& [k, v] : pred::parse_params(item)) p[k] = v;
    }
    return p;
}

std::string structure_help() {
    std::string s = "one of:";
    for(const auto& n : pred::structure_names()) s += " " + n;
    return s;
}

int run(const std::string& structure, const std::vector<std::string>& params, unsigned width, uint64_t n, uint64_t q,
        unsigned iterations, uint64_t seed, const std::string& out, bool check) {
    pred::WorkloadSpec spec;
    spec.structure = pred::resolve_structure(structure, collect_params(params), width);
    spec.n = n;
    spec.q = q;
    spec.iterations = iterations;
    spec.seed = seed;

    if(!pred::memory::available()) std::cerr << "warning: allocation meter unavailable, memory columns are NA\n";
    const auto result = pred::run_experiment(spec);

    int status = 0;
    for(size_t i = 0; i < result.final_sizes.size(); ++i) {
        if(result.final_sizes[i] != 0) {
            std::cerr << "error: iteration " << i << " left " << result.final_sizes[i] << " keys after the delete phase\n";
            status = 1;
        }
        if(check) {
            const auto w = pred::generate_workload(width, n, q, seed + i);
            if(pred::oracle_checksum(w) != result.checksums[i]) {
                std::cerr << "error: iteration " << i << " query checksum differs from the oracle (seed " << seed + i << ")\n";
                status = 1;
            }
        }
    }

    if(!out.empty()) pred::write_csv(out, result.rows);
    else pred::write_csv(std::cout, result.rows);

    const auto& avg = result.rows.back();
    std::fprintf(stderr, "%s [%s] w=%u n=%llu: insert %.3g ops/s, query %.3g ops/s, delete %.3g ops/s", avg.structure.c_str(),
                 avg.params.c_str(), width, static_cast<unsigned long long>(n), avg.insert_ops_s, avg.query_ops_s,
                 avg.delete_ops_s);
    if(avg.bits_per_key) std::fprintf(stderr, ", %.1f bits/key", *avg.bits_per_key);
    std::fprintf(stderr, "\n");
    return status;
}

int verify(const std::string& structure, const std::vector<std::string>& params, unsigned width, uint64_t ops,
           uint64_t seed, int window, size_t audit_every) {
    const auto spec = pred::resolve_structure(structure, collect_params(params), width);
    const unsigned bits = window > 0 ? unsigned(window) : pred::default_window_bits(spec);
    const auto trace = pred::make_trace(width, bits, ops, seed);
    auto set = pred::make_structure(spec);
    const auto res = pred::verify(*set, trace, audit_every);
    const std::string label = spec.name + " [" + pred::format_params(spec.params) + "] w=" + std::to_string(width);
    if(!res.ok) {
        std::cerr << "DIVERGED " << label << ": " << res.message << '\n';
        return 1;
    }
    std::cout << "OK " << label << ": " << res.ops_checked << " ops, seed " << seed << ", window 2^" << bits
              << ", peak size " << trace.max_size << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic integer predecessor structures: benchmark and differential verification"};
    app.require_subcommand(1);

    std::string structure;
    std::vector<std::string> params;
    unsigned width = 32;
    uint64_t seed = 1;

    auto* run_cmd = app.add_subcommand("run", "Insert n random keys, run q queries, delete the keys; emit CSV");
    uint64_t n = uint64_t(1) << 20, q = 1'000'000;
    unsigned iterations = 5;
    std::string out;
    bool check = false;
    run_cmd->add_option("--structure,-s", structure, structure_help())->required();
    run_cmd->add_option("--width,-w", width, "key width in bits (32, 40, 64)")->check(CLI::IsMember({32u, 40u, 64u}));
    run_cmd->add_option("--keys,-n", n, "keys inserted per iteration")->check(CLI::Range(uint64_t(2), ~uint64_t(0)));
    run_cmd->add_option("--queries,-q", q, "predecessor queries per iteration")->check(CLI::PositiveNumber);
    run_cmd->add_option("--iterations,-i", iterations, "iterations, seeded seed, seed+1, ...")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "base seed");
    run_cmd->add_option("--param,-p", params, "structure parameter key=value (repeatable)");
    run_cmd->add_option("--out,-o", out, "CSV output path (default: stdout)");
    run_cmd->add_flag("--check", check, "compare each iteration's query checksum with the oracle");

    auto* verify_cmd = app.add_subcommand("verify", "Replay a random operation sequence against the oracle");
    uint64_t ops = 100'000;
    int window = 0;
    size_t audit_every = 0;
    verify_cmd->add_option("--structure,-s", structure, structure_help())->required();
    verify_cmd->add_option("--width,-w", width, "key width in bits (32, 40, 64)")->check(CLI::IsMember({32u, 40u, 64u}));
    verify_cmd->add_option("--ops", ops, "number of operations")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", seed, "seed of the operation sequence");
    verify_cmd->add_option("--param,-p", params, "structure parameter key=value (repeatable)");
    verify_cmd->add_option("--window", window, "keys are drawn from a window of 2^bits keys (default depends on structure)")
        ->check(CLI::Range(1, 64));
    verify_cmd->add_option("--audit-every", audit_every, "run the structure's invariant audit every k ops (0: at the end)");

    CLI11_PARSE(app, argc, argv);

    if(pred::bits::intrinsics_enabled()) std::cerr << "word ops: hardware\n";
    else std::cerr << "word ops: portable\n";

    try {
        if(*run_cmd) return run(structure, params, width, n, q, iterations, seed, out, check);
        return verify(structure, params, width, ops, seed, window, audit_every);
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
