#include <pred/registry.hpp>

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include <pred/btree.hpp>
#include <pred/fusion_tree.hpp>
#include <pred/oracle_set.hpp>
#include <pred/universe_sampling.hpp>
#include <pred/yfast.hpp>

namespace pred {

namespace {

template<typename T>
class Model final : public AnySet {
public:
    template<typename... Args>
    explicit Model(Args&&... args) : m_set(std::forward<Args>(args)...) {}

    bool insert(Key x) override { return m_set.insert(x); }
    bool erase(Key x) override { return m_set.erase(x); }
    PredResult predecessor(Key x) const override { return m_set.predecessor(x); }
    size_t size() const override { return m_set.size(); }
    void audit() const override {
        if constexpr(requires { m_set.check_invariants(); }) m_set.check_invariants();
    }

private:
    T m_set;
};

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

unsigned long long to_uint(const std::string& key, const std::string& v) {
    size_t pos = 0;
    unsigned long long r = 0;
    try {
        r = std::stoull(v, &pos);
    } catch(const std::exception&) {
        pos = 0;
    }
    if(pos != v.size() || v.empty() || v[0] == '-') bad("parameter " + key + ": expected an unsigned integer, got '" + v + "'");
    return r;
}

double to_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double r = 0;
    try {
        r = std::stod(v, &pos);
    } catch(const std::exception&) {
        pos = 0;
    }
    if(pos != v.size() || v.empty()) bad("parameter " + key + ": expected a number, got '" + v + "'");
    return r;
}

void check_keys(const std::string& name, const Params& params, std::initializer_list<const char*> allowed) {
    for(const auto& [k, v] : params) {
        if(std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
            bad("structure " + name + " has no parameter '" + k + "'");
        }
    }
}

void check_choice(const std::string& key, const std::string& v, std::initializer_list<const char*> choices) {
    if(std::none_of(choices.begin(), choices.end(), [&](const char* c) { return v == c; })) {
        bad("parameter " + key + ": unsupported value '" + v + "'");
    }
}

void set_default(Params& p, const std::string& key, const std::string& value) { p.emplace(key, value); }

template<unsigned B>
std::unique_ptr<AnySet> make_btree(NodeSearch search) {
    return std::make_unique<Model<BTree<B>>>(search);
}

} // namespace

std::string format_params(const Params& params) {
    std::string out;
    for(const auto& [k, v] : params) {
        if(!out.empty()) out += ';';
        out += k + '=' + v;
    }
    return out;
}

Params parse_params(const std::string& text) {
    Params out;
    std::stringstream ss(text);
    std::string item;
    while(std::getline(ss, item, ';')) {
        if(item.empty()) continue;
        const auto eq = item.find('=');
        if(eq == std::string::npos || eq == 0) bad("malformed parameter '" + item + "', expected key=value");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

const std::vector<std::string>& structure_names() {
    static const std::vector<std::string> names = {"us-array", "us-hash",  "yfast-ul", "yfast-sl", "fusion",
                                                   "fusion-wide", "btree-ls", "btree-bs", "oracle"};
    return names;
}

StructureSpec resolve_structure(const std::string& name, const Params& given, unsigned width) {
    if(width != 32 && width != 40 && width != 64) bad("unsupported width " + std::to_string(width) + " (32, 40 or 64)");
    Params p = given;

    if(name == "us-array" || name == "us-hash") {
        if(width == 64) bad(name + " does not support 64-bit keys");
        check_keys(name, p, {"bucket", "b", "theta_min", "theta_max"});
        set_default(p, "bucket", "ul");
        check_choice("bucket", p["bucket"], {"bv", "ul", "hybrid"});
        const std::string& kind = p["bucket"];
        set_default(p, "b", kind == "bv" ? "16777216" : kind == "ul" ? "1024" : "65536");
        const auto b = to_uint("b", p["b"]);
        if(!std::has_single_bit(b) || b < 2 || std::bit_width(b) - 1 >= width) {
            bad("parameter b: bucket size must be a power of two below 2^" + std::to_string(width));
        }
        if(kind == "hybrid") {
            set_default(p, "theta_min", "512");
            set_default(p, "theta_max", "1024");
            const auto lo = to_uint("theta_min", p["theta_min"]);
            const auto hi = to_uint("theta_max", p["theta_max"]);
            if(lo == 0 || lo > hi || hi >= b) bad("hybrid thresholds need 0 < theta_min <= theta_max < b");
        } else if(p.count("theta_min") || p.count("theta_max")) {
            bad("theta_min/theta_max apply to bucket=hybrid only");
        }
    } else if(name == "yfast-ul" || name == "yfast-sl") {
        check_keys(name, p, {"t", "c", "gamma"});
        set_default(p, "t", "128");
        set_default(p, "c", "2");
        set_default(p, "gamma", "0.25");
        if(to_uint("t", p["t"]) == 0) bad("parameter t must be positive");
        to_double("c", p["c"]);
        to_double("gamma", p["gamma"]);
    } else if(name == "fusion" || name == "fusion-wide") {
        check_keys(name, p, {"search"});
        set_default(p, "search", "packed");
        check_choice("search", p["search"], {"packed", "linear"});
    } else if(name == "btree-ls" || name == "btree-bs") {
        check_keys(name, p, {"B"});
        set_default(p, "B", "64");
        check_choice("B", p["B"], {"8", "16", "64", "128", "256"});
    } else if(name == "oracle") {
        check_keys(name, p, {});
    } else {
        bad("unknown structure '" + name + "'");
    }
    return {name, p, width};
}

std::unique_ptr<AnySet> make_structure(const StructureSpec& spec) {
    const StructureSpec s = resolve_structure(spec.name, spec.params, spec.width);
    const Params& p = s.params;
    const Universe u(s.width);

    if(s.name == "us-array" || s.name == "us-hash") {
        USConfig c;
        c.top = s.name == "us-array" ? TopKind::array : TopKind::hash;
        const std::string& kind = p.at("bucket");
        c.bucket = kind == "bv" ? BucketKind::bitvector : kind == "ul" ? BucketKind::list : BucketKind::hybrid;
        c.k_b = unsigned(std::bit_width(to_uint("b", p.at("b")))) - 1;
        if(c.bucket == BucketKind::hybrid) {
            c.theta_min = to_uint("theta_min", p.at("theta_min"));
            c.theta_max = to_uint("theta_max", p.at("theta_max"));
        }
        return std::make_unique<Model<UniverseSampling>>(u, c);
    }
    if(s.name == "yfast-ul" || s.name == "yfast-sl") {
        YFastConfig c;
        c.t = unsigned(to_uint("t", p.at("t")));
        c.c = to_double("c", p.at("c"));
        c.gamma = to_double("gamma", p.at("gamma"));
        c.sorted = s.name == "yfast-sl";
        return std::make_unique<Model<YFastTrie>>(u, c);
    }
    if(s.name == "fusion" || s.name == "fusion-wide") {
        const RankSearch search = p.at("search") == "packed" ? RankSearch::packed : RankSearch::linear;
        if(s.name == "fusion") return std::make_unique<Model<FusionTree<8>>>(search);
        return std::make_unique<Model<FusionTree<16>>>(search);
    }
    if(s.name == "btree-ls" || s.name == "btree-bs") {
        const NodeSearch search = s.name == "btree-ls" ? NodeSearch::linear : NodeSearch::binary;
        switch(to_uint("B", p.at("B"))) {
        case 8: return make_btree<8>(search);
        case 16: return make_btree<16>(search);
        case 64: return make_btree<64>(search);
        case 128: return make_btree<128>(search);
        default: return make_btree<256>(search);
        }
    }
    return std::make_unique<Model<OracleSet>>();
}

std::vector<StructureSpec> all_configurations(unsigned width) {
    std::vector<StructureSpec> out;
    if(width != 64) {
        for(const char* top : {"us-array", "us-hash"}) {
            for(const char* kind : {"bv", "ul", "hybrid"}) out.push_back(resolve_structure(top, {{"bucket", kind}}, width));
        }
    }
    for(const char* name : {"yfast-ul", "yfast-sl"}) {
        for(const char* t : {"64", "128", "256", "512"}) out.push_back(resolve_structure(name, {{"t", t}}, width));
    }
    for(const char* name : {"fusion", "fusion-wide"}) {
        for(const char* search : {"packed", "linear"}) out.push_back(resolve_structure(name, {{"search", search}}, width));
    }
    for(const char* name : {"btree-ls", "btree-bs"}) {
        for(const char* B : {"8", "16", "64", "128", "256"}) out.push_back(resolve_structure(name, {{"B", B}}, width));
    }
    out.push_back(resolve_structure("oracle", {}, width));
    return out;
}

} // namespace pred
