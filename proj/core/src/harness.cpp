#include <pred/harness.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <pred/memory_meter.hpp>
#include <pred/oracle_set.hpp>

namespace pred {

std::mt19937_64 make_rng(uint64_t seed, uint32_t stream) {
    std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), stream};
    return std::mt19937_64(seq);
}

Workload generate_workload(unsigned width, uint64_t n, uint64_t q, uint64_t seed) {
    if(n < 2) throw std::invalid_argument("workload needs at least 2 keys");
    if(q < 1) throw std::invalid_argument("workload needs at least 1 query");
    const Universe u(width);

    Workload w;
    w.inserts.resize(n);
    auto keys = make_rng(seed, INSERT_STREAM);
    std::uniform_int_distribution<Key> any_key(0, u.max_key());
    for(auto& k : w.inserts) k = any_key(keys);

    const auto [lo, hi] = std::minmax_element(w.inserts.begin(), w.inserts.end());
    if(*lo == *hi) throw std::invalid_argument("workload has a degenerate query range (all keys equal)");

    w.queries.resize(q);
    auto queries = make_rng(seed, QUERY_STREAM);
    std::uniform_int_distribution<Key> in_range(*lo, *hi - 1);
    for(auto& k : w.queries) k = in_range(queries);
    return w;
}

uint64_t oracle_checksum(const Workload& w) {
    std::vector<Key> sorted = w.inserts;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    uint64_t acc = 0;
    for(Key x : w.queries) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        acc = checksum_step(acc, it == sorted.begin() ? PredResult() : PredResult(*(it - 1)));
    }
    return acc;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
    return double(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
}

double ops_per_s(uint64_t ops, double ns) { return ns > 0 ? double(ops) / (ns / 1e9) : 0.0; }

} // namespace

ExperimentResult run_experiment(const WorkloadSpec& spec) {
    const StructureSpec structure = resolve_structure(spec.structure.name, spec.structure.params, spec.structure.width);
    const std::string params = format_params(structure.params);
    const bool metered = memory::available();

    ExperimentResult result;
    for(unsigned it = 0; it < spec.iterations; ++it) {
        const uint64_t seed = spec.seed + it;
        const Workload w = generate_workload(structure.width, spec.n, spec.q, seed);

        Measurement m;
        m.structure = structure.name;
        m.params = params;
        m.width = structure.width;
        m.n = spec.n;
        m.iteration = it;
        m.seed = seed;

        uint64_t checksum = 0;
        size_t final_size = 0;
        {
            memory::Scope scope;
            auto set = make_structure(structure);

            auto t0 = Clock::now();
            for(Key k : w.inserts) set->insert(k);
            auto t1 = Clock::now();
            const size_t after_insert = scope.live();

            for(Key x : w.queries) checksum = checksum_step(checksum, set->predecessor(x));
            auto t2 = Clock::now();

            for(Key k : w.inserts) set->erase(k);
            auto t3 = Clock::now();
            final_size = set->size();

            m.insert_ns = elapsed_ns(t0, t1);
            m.query_ns = elapsed_ns(t1, t2);
            m.delete_ns = elapsed_ns(t2, t3);
            m.insert_ops_s = ops_per_s(w.inserts.size(), m.insert_ns);
            m.query_ops_s = ops_per_s(w.queries.size(), m.query_ns);
            m.delete_ops_s = ops_per_s(w.inserts.size(), m.delete_ns);
            if(metered) {
                m.bytes_after_insert = double(after_insert);
                m.bits_per_key = 8.0 * double(after_insert) / double(spec.n);
                m.peak_bytes = double(scope.peak());
            }
        }
        result.rows.push_back(m);
        result.checksums.push_back(checksum);
        result.final_sizes.push_back(final_size);
    }
    if(!result.rows.empty()) result.rows.push_back(average(result.rows));
    return result;
}

Measurement average(const std::vector<Measurement>& rows) {
    if(rows.empty()) throw std::invalid_argument("cannot average zero measurements");
    Measurement a = rows.front();
    a.iteration.reset();
    const double k = double(rows.size());
    auto mean = [&](auto field) {
        double s = 0;
        for(const auto& r : rows) s += r.*field;
        return s / k;
    };
    auto mean_opt = [&](auto field) -> std::optional<double> {
        double s = 0;
        for(const auto& r : rows) {
            if(!(r.*field)) return std::nullopt;
            s += *(r.*field);
        }
        return s / k;
    };
    a.insert_ns = mean(&Measurement::insert_ns);
    a.query_ns = mean(&Measurement::query_ns);
    a.delete_ns = mean(&Measurement::delete_ns);
    a.insert_ops_s = mean(&Measurement::insert_ops_s);
    a.query_ops_s = mean(&Measurement::query_ops_s);
    a.delete_ops_s = mean(&Measurement::delete_ops_s);
    a.peak_bytes = mean_opt(&Measurement::peak_bytes);
    a.bytes_after_insert = mean_opt(&Measurement::bytes_after_insert);
    a.bits_per_key = mean_opt(&Measurement::bits_per_key);
    return a;
}

// ---- CSV

namespace {

const char* const NA = "NA";

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : NA; }

double parse_double(const std::string& s, const std::string& column) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if(r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error("csv: bad number '" + s + "' in column " + column);
    return v;
}

uint64_t parse_u64(const std::string& s, const std::string& column) {
    uint64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if(r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error("csv: bad integer '" + s + "' in column " + column);
    return v;
}

std::optional<double> parse_opt(const std::string& s, const std::string& column) {
    if(s == NA) return std::nullopt;
    return parse_double(s, column);
}

} // namespace

std::vector<std::string> csv_columns() {
    return {"structure",    "params",      "width",        "n",          "iteration",          "seed",
            "insert_ns",    "query_ns",    "delete_ns",    "insert_ops_s", "query_ops_s",      "delete_ops_s",
            "peak_bytes",   "bytes_after_insert", "bits_per_key"};
}

void write_csv(std::ostream& out, const std::vector<Measurement>& rows) {
    const auto cols = csv_columns();
    for(size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for(const auto& m : rows) {
        out << m.structure << ',' << m.params << ',' << m.width << ',' << m.n << ','
            << (m.iteration ? std::to_string(*m.iteration) : std::string("avg")) << ',' << m.seed << ',' << fmt(m.insert_ns)
            << ',' << fmt(m.query_ns) << ',' << fmt(m.delete_ns) << ',' << fmt(m.insert_ops_s) << ',' << fmt(m.query_ops_s)
            << ',' << fmt(m.delete_ops_s) << ',' << fmt(m.peak_bytes) << ',' << fmt(m.bytes_after_insert) << ','
            << fmt(m.bits_per_key) << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<Measurement>& rows) {
    std::ofstream out(path);
    if(!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, rows);
    out.flush();
    if(!out) throw std::runtime_error("error writing '" + path + "'");
}

std::vector<Measurement> read_csv(std::istream& in) {
    const auto cols = csv_columns();
    std::string line;
    if(!std::getline(in, line)) throw std::runtime_error("csv: missing header");
    {
        std::vector<std::string> header;
        std::stringstream ss(line);
        std::string cell;
        while(std::getline(ss, cell, ',')) header.push_back(cell);
        if(header != cols) throw std::runtime_error("csv: unexpected header '" + line + "'");
    }

    std::vector<Measurement> rows;
    size_t lineno = 1;
    while(std::getline(in, line)) {
        ++lineno;
        if(line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while(std::getline(ss, cell, ',')) f.push_back(cell);
        if(!line.empty() && line.back() == ',') f.emplace_back();
        if(f.size() != cols.size()) {
            throw std::runtime_error("csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
        }
        Measurement m;
        m.structure = f[0];
        m.params = f[1];
        m.width = unsigned(parse_u64(f[2], cols[2]));
        m.n = parse_u64(f[3], cols[3]);
        if(f[4] != "avg") m.iteration = unsigned(parse_u64(f[4], cols[4]));
        m.seed = parse_u64(f[5], cols[5]);
        m.insert_ns = parse_double(f[6], cols[6]);
        m.query_ns = parse_double(f[7], cols[7]);
        m.delete_ns = parse_double(f[8], cols[8]);
        m.insert_ops_s = parse_double(f[9], cols[9]);
        m.query_ops_s = parse_double(f[10], cols[10]);
        m.delete_ops_s = parse_double(f[11], cols[11]);
        m.peak_bytes = parse_opt(f[12], cols[12]);
        m.bytes_after_insert = parse_opt(f[13], cols[13]);
        m.bits_per_key = parse_opt(f[14], cols[14]);
        rows.push_back(std::move(m));
    }
    return rows;
}

std::vector<Measurement> read_csv(const std::string& path) {
    std::ifstream in(path);
    if(!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_csv(in);
}

// ---- verification

Trace make_trace(unsigned width, unsigned window_bits, uint64_t ops, uint64_t seed) {
    const Universe u(width);
    const unsigned wb = std::min(window_bits, width);
    const Key span_mask = wb == 64 ? ~Key(0) : (Key(1) << wb) - 1;
    auto rng = make_rng(seed, 2);
    const Key offset = wb == width ? 0 : std::uniform_int_distribution<Key>(0, u.max_key() - span_mask)(rng);
    auto draw = [&] { return offset + (rng() & span_mask); };

    Trace t;
    t.width = width;
    t.seed = seed;
    t.ops.reserve(ops);
    t.expected.reserve(ops);
    OracleSet oracle;
    auto existing = [&] { return oracle.keys()[rng() % oracle.size()]; };

    for(uint64_t i = 0; i < ops; ++i) {
        const bool growing = i < ops / 2;
        const unsigned r = unsigned(rng() % 100);
        const unsigned p_insert = growing ? 60 : 25;
        const unsigned p_erase = growing ? 15 : 50;
        Op op;
        if(r < p_insert) {
            op.kind = OpKind::insert;
            op.key = !oracle.empty() && rng() % 10 == 0 ? existing() : draw();
        } else if(r < p_insert + p_erase) {
            op.kind = OpKind::erase;
            op.key = !oracle.empty() && rng() % 100 < 85 ? existing() : draw();
        } else {
            op.kind = OpKind::predecessor;
            const unsigned s = unsigned(rng() % 10);
            if(!oracle.empty() && s < 2) {
                op.key = existing();
            } else if(!oracle.empty() && s < 3) {
                const Key e = existing();
                op.key = e == 0 ? e : e - 1;
            } else {
                op.key = draw();
            }
        }

        PredResult expect;
        switch(op.kind) {
        case OpKind::insert:
            if(oracle.insert(op.key)) expect = 1;
            break;
        case OpKind::erase:
            if(oracle.erase(op.key)) expect = 1;
            break;
        case OpKind::predecessor: expect = oracle.predecessor(op.key); break;
        }
        t.ops.push_back(op);
        t.expected.push_back(expect);
        t.max_size = std::max(t.max_size, oracle.size());
    }
    return t;
}

unsigned default_window_bits(const StructureSpec& spec) {
    if(spec.name == "us-array" || spec.name == "us-hash") {
        const auto& kind = spec.params.at("bucket");
        const unsigned k = unsigned(std::bit_width(std::stoull(spec.params.at("b")))) - 1;
        // bit vectors cost b bits per active bucket, so keep few buckets active
        const unsigned extra = kind == "ul" ? 10 : 4;
        return std::min(spec.width, k + extra);
    }
    return spec.width;
}

std::string describe(const Op& op) {
    const char* name = op.kind == OpKind::insert ? "insert" : op.kind == OpKind::erase ? "delete" : "predecessor";
    return std::string(name) + "(" + std::to_string(op.key) + ")";
}

namespace {

std::string show(OpKind kind, const PredResult& r) {
    if(kind != OpKind::predecessor) return r ? "true" : "false";
    return r ? std::to_string(*r) : "absent";
}

} // namespace

VerifyResult verify(AnySet& set, const Trace& trace, size_t audit_every) {
    VerifyResult res;
    auto diverge = [&](size_t i, const std::string& what) {
        res.ok = false;
        res.first_divergence = i;
        res.message = "op #" + std::to_string(i) + " " + describe(trace.ops[i]) + ": " + what + "; seed " +
                      std::to_string(trace.seed) + ", width " + std::to_string(trace.width) + "; minimal failing prefix " +
                      std::to_string(i + 1) + " ops";
    };

    for(size_t i = 0; i < trace.ops.size(); ++i) {
        const Op& op = trace.ops[i];
        PredResult got;
        switch(op.kind) {
        case OpKind::insert:
            if(set.insert(op.key)) got = 1;
            break;
        case OpKind::erase:
            if(set.erase(op.key)) got = 1;
            break;
        case OpKind::predecessor: got = set.predecessor(op.key); break;
        }
        res.ops_checked = i + 1;
        if(got != trace.expected[i]) {
            diverge(i, "structure returned " + show(op.kind, got) + ", oracle " + show(op.kind, trace.expected[i]));
            return res;
        }
        const bool last = i + 1 == trace.ops.size();
        if((audit_every != 0 && (i + 1) % audit_every == 0) || last) {
            try {
                set.audit();
            } catch(const std::logic_error& e) {
                diverge(i, std::string("invariant audit failed: ") + e.what());
                return res;
            }
        }
    }
    return res;
}

} // namespace pred
