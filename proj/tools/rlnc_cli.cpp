// rlnc: command-line front end for the RLNC toolkit.
//
// Subcommands: encode, decode, analyze, simulate multicast,
// simulate duplication, grap solve. Every run is reproducible: outputs are
// pure functions of the config and seeds, and CSV files embed the effective
// config in '#' header comments.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure
// (e.g. undecodable input), 3 infeasible optimization.
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "rlnc/analytics.hpp"
#include "rlnc/channel.hpp"
#include "rlnc/csv.hpp"
#include "rlnc/dupsim.hpp"
#include "rlnc/grap.hpp"
#include "rlnc/version.hpp"
#include "rlnc/wire.hpp"

using json = nlohmann::json;
using namespace rlnc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitInfeasible = 3;

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read input file: " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot open output file: " + path);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw RuntimeFailure("failed writing output file: " + path);
}

// "a:b" inclusive range or comma-separated values.
std::vector<uint64_t> parse_u64_list(const std::string& text) {
    std::vector<uint64_t> values;
    if (text.empty()) return values;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        const uint64_t lo = std::stoull(text.substr(0, colon));
        const uint64_t hi = std::stoull(text.substr(colon + 1));
        if (hi < lo) throw std::invalid_argument("empty range: " + text);
        for (uint64_t v = lo; v <= hi; ++v) values.push_back(v);
        return values;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stoull(item));
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    return values;
}

EncoderMode parse_mode(const std::string& name) {
    if (name == "standard") return EncoderMode::standard;
    if (name == "systematic") return EncoderMode::systematic;
    if (name == "sparse") return EncoderMode::sparse;
    if (name == "tunable_sparse") return EncoderMode::tunable_sparse;
    throw std::invalid_argument("unknown encoder mode: " + name);
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw std::invalid_argument("config root must be a JSON object");
    return cfg;
}

template <typename T>
T config_get(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config field '" + key + "' has the wrong type");
    }
}

void emit_csv(const std::string& out_path, const std::string& body) {
    if (out_path.empty())
        std::cout << body;
    else
        write_file(out_path, body);
}

void csv_preamble(csv::Writer& w, const std::string& command, const json& effective,
                  uint64_t seed) {
    w.comment(std::string("rlnc-toolkit ") + kVersionString);
    w.comment("command: " + command);
    w.comment("config: " + effective.dump());
    w.comment("seed: " + std::to_string(seed));
}

// Index-parallel loop with results ordered by index regardless of schedule.
template <typename Fn>
void parallel_for(size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const unsigned actual = std::min<unsigned>(threads, unsigned(count));
    for (unsigned t = 0; t < actual; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- encode --

struct EncodeArgs {
    std::string input, out;
    uint16_t gen_size_k = 16;
    uint32_t payload_len = 32;
    unsigned field_order = 256;
    std::string mode = "standard";
    uint64_t extra_packets = 0;
    double sparsity_t = 0.0;
    double t_start = 0.0, t_end = 0.0;
    uint64_t ramp_len = 0;
    uint64_t seed = 1;
};

int run_encode(const EncodeArgs& args) {
    EncoderConfig cfg;
    cfg.field = FieldSpec(args.field_order);
    cfg.mode = parse_mode(args.mode);
    cfg.sparsity_t = args.sparsity_t;
    cfg.schedule = {args.t_start, args.t_end, args.ramp_len};
    cfg.seed = args.seed;
    cfg.validate();
    GaloisField::get(args.field_order);
    if (args.gen_size_k < 1 || args.gen_size_k > kMaxGenerationSize)
        throw std::invalid_argument("gen-size must lie in [1, 1024]");
    if (args.payload_len < 1) throw std::invalid_argument("payload-len must be >= 1");

    const auto data = read_file(args.input);
    std::ostringstream out;
    wire::encode_stream(out, data, args.gen_size_k, args.payload_len, cfg, args.extra_packets);
    write_file(args.out, out.str());
    return kExitOk;
}

// ---------------------------------------------------------------- decode --

int run_decode(const std::string& input, const std::string& out) {
    const auto bytes = read_file(input);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    wire::DecodeResult result;
    try {
        result = wire::decode_stream(in);
    } catch (const std::runtime_error& e) {
        // malformed container: magic, version, truncation
        throw std::invalid_argument(e.what());
    }
    if (!result.complete) {
        std::cerr << "decode failed: rank deficit in " << result.deficits.size()
                  << " generation(s)\n";
        for (const auto& d : result.deficits)
            std::cerr << "  generation " << d.generation_id << ": rank " << d.rank << " of "
                      << d.gen_size_k << "\n";
        return kExitRuntime;
    }
    write_file(out, std::string_view(reinterpret_cast<const char*>(result.data.data()),
                                     result.data.size()));
    return kExitOk;
}

// --------------------------------------------------------------- analyze --

struct AnalyzeArgs {
    std::string config_path, out;
    int64_t gen_size_k = -1;
    int64_t field_order = -1;
    double eps = -1.0;
    std::string n_list, sent_list;
    uint64_t delay_trials = 0;
    bool delay_trials_set = false;
    uint64_t seed = 1;
};

int run_analyze(const AnalyzeArgs& args) {
    const json cfg = load_config(args.config_path);
    const int64_t k64 = args.gen_size_k >= 0 ? args.gen_size_k : config_get<int64_t>(cfg, "K", 8);
    const int64_t q64 = args.field_order >= 0 ? args.field_order : config_get<int64_t>(cfg, "q", 2);
    if (k64 < 1 || k64 > int64_t(kMaxGenerationSize))
        throw std::invalid_argument("K must lie in [1, 1024]");
    const uint32_t k = uint32_t(k64);
    const unsigned q = unsigned(q64);
    const double eps = args.eps >= 0.0 ? args.eps : config_get<double>(cfg, "eps", 0.0);
    const std::string n_spec =
        !args.n_list.empty() ? args.n_list : config_get<std::string>(cfg, "n_list", "");
    const std::string sent_spec =
        !args.sent_list.empty() ? args.sent_list : config_get<std::string>(cfg, "N_list", "");
    const auto n_list = parse_u64_list(n_spec);
    const auto sent_list = parse_u64_list(sent_spec);
    const uint64_t delay_trials = args.delay_trials_set
                                      ? args.delay_trials
                                      : config_get<uint64_t>(cfg, "delay_trials", 0);
    if (n_list.empty() && sent_list.empty() && delay_trials == 0)
        throw std::invalid_argument("nothing to analyze: give --n-list, --N-list or --delay-trials");
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
    GaloisField::get(q);
    if (k < 1) throw std::invalid_argument("K must be >= 1");

    json effective{{"K", k},     {"q", q},           {"eps", eps},
                   {"n_list", n_spec}, {"N_list", sent_spec}, {"delay_trials", delay_trials}};

    std::string delay_mean, delay_ci;
    if (delay_trials > 0) {
        const auto est = analytics::avg_decoding_delay_mc(k, q, eps, delay_trials, args.seed);
        delay_mean = csv::format_double(est.mean);
        delay_ci = csv::format_double(est.ci95);
    }

    csv::Writer w;
    csv_preamble(w, "analyze", effective, args.seed);
    w.row("n", "K", "q", "eps", "N", "pd", "po", "mean_delay", "ci95");
    for (const uint64_t n : n_list) {
        const double pd = analytics::decode_prob_given_received(n, k, q);
        w.row(n, k, q, eps, "", pd, 1.0 - pd, delay_mean, delay_ci);
    }
    for (const uint64_t sent : sent_list) {
        const double pd = analytics::decode_prob_after_sent(sent, k, q, eps);
        w.row("", k, q, eps, sent, pd, 1.0 - pd, delay_mean, delay_ci);
    }
    if (n_list.empty() && sent_list.empty())
        w.row("", k, q, eps, "", "", "", delay_mean, delay_ci);

    emit_csv(args.out, w.str());
    return kExitOk;
}

// ---------------------------------------------------- simulate multicast --

struct MulticastArgs {
    std::string config_path, out;
    int64_t gen_size_k = -1;
    int64_t payload_len = -1;
    int64_t field_order = -1;
    std::string mode;
    std::string eps_list;
    int64_t sent_n = -1;
    bool until_decoded = false;
    uint64_t max_slots = 0;
    std::string seeds;
    double sparsity_t = 0.0;
    uint64_t seed = 1;
    unsigned threads = 1;
};

int run_multicast(const MulticastArgs& args) {
    const json cfg = load_config(args.config_path);
    const int64_t k64 = args.gen_size_k >= 0 ? args.gen_size_k
                                              : config_get<int64_t>(cfg, "gen_size_k", 16);
    const int64_t payload64 = args.payload_len >= 0 ? args.payload_len
                                                    : config_get<int64_t>(cfg, "payload_len", 32);
    if (k64 < 1 || k64 > int64_t(kMaxGenerationSize))
        throw std::invalid_argument("gen-size must lie in [1, 1024]");
    if (payload64 < 1) throw std::invalid_argument("payload-len must be >= 1");
    const uint16_t k = uint16_t(k64);
    const uint32_t payload = uint32_t(payload64);
    const unsigned q = args.field_order >= 0 ? unsigned(args.field_order)
                                             : config_get<unsigned>(cfg, "field_order", 256);
    const std::string mode = !args.mode.empty() ? args.mode
                                                : config_get<std::string>(cfg, "mode", "standard");
    std::vector<double> eps;
    if (!args.eps_list.empty())
        eps = parse_double_list(args.eps_list);
    else if (cfg.contains("eps"))
        eps = cfg.at("eps").get<std::vector<double>>();
    if (eps.empty()) throw std::invalid_argument("at least one receiver eps is required");
    for (double e : eps)
        if (e < 0.0 || e > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");

    const bool until = args.until_decoded || config_get<bool>(cfg, "until_decoded", false);
    const int64_t sent_n = args.sent_n >= 0 ? args.sent_n : config_get<int64_t>(cfg, "N", -1);
    if (!until && sent_n < 0)
        throw std::invalid_argument("choose --N <count> or --until-decoded");
    const uint64_t max_slots = args.max_slots ? args.max_slots
                                              : config_get<uint64_t>(cfg, "max_slots", 0);
    const auto seeds = parse_u64_list(!args.seeds.empty()
                                          ? args.seeds
                                          : config_get<std::string>(cfg, "seeds", "1:10"));
    if (seeds.empty()) throw std::invalid_argument("at least one session seed is required");

    EncoderConfig enc_cfg;
    enc_cfg.field = FieldSpec(q);
    enc_cfg.mode = parse_mode(mode);
    enc_cfg.sparsity_t = args.sparsity_t ? args.sparsity_t : config_get<double>(cfg, "sparsity_t", 0.0);
    enc_cfg.validate();

    json eps_json = json::array();
    for (double e : eps) eps_json.push_back(e);
    json effective{{"gen_size_k", k},   {"payload_len", payload}, {"field_order", q},
                   {"mode", mode},      {"eps", eps_json},        {"until_decoded", until},
                   {"N", sent_n},       {"max_slots", max_slots},
                   {"seeds", seeds.size()}};

    dupsim::BlockParams params{k, payload, q};
    std::vector<channel::SessionReport> reports(seeds.size());
    parallel_for(seeds.size(), args.threads, [&](size_t i) {
        const auto block = dupsim::random_block(params, seeds[i]);
        reports[i] = until ? channel::run_until_decoded(block, enc_cfg, eps, max_slots, seeds[i])
                           : channel::run_fixed_n(block, enc_cfg, eps, uint64_t(sent_n), seeds[i]);
    });

    csv::Writer w;
    csv_preamble(w, "simulate multicast", effective, args.seed);
    w.row("seed", "receiver", "eps", "slots_sent", "packets_received", "decoded",
          "slots_to_decode", "overhead_ratio");
    for (size_t i = 0; i < seeds.size(); ++i) {
        for (const auto& rx : reports[i].receivers) {
            if (rx.slots_to_decode)
                w.row(seeds[i], rx.id, rx.eps, rx.slots_sent, rx.packets_received, rx.decoded,
                      *rx.slots_to_decode, reports[i].overhead_ratio);
            else
                w.row(seeds[i], rx.id, rx.eps, rx.slots_sent, rx.packets_received, rx.decoded, "",
                      reports[i].overhead_ratio);
        }
    }
    emit_csv(args.out, w.str());
    return kExitOk;
}

// -------------------------------------------------- simulate duplication --

struct DuplicationArgs {
    std::string config_path, out;
    int64_t gen_size_k = -1;
    int64_t payload_len = -1;
    int64_t field_order = -1;
    std::string legs;      // "eps:cap,eps:cap"
    std::string policies;  // "mirror,split_round_robin,weighted:0.6:0.4"
    std::string seeds;
    uint64_t max_slots = 0;
    uint64_t seed = 1;
    unsigned threads = 1;
};

dupsim::DupPolicy parse_policy(const std::string& name) {
    if (name == "mirror") return dupsim::DupPolicy::mirror();
    if (name == "split_round_robin") return dupsim::DupPolicy::split();
    if (name.rfind("weighted:", 0) == 0) {
        const auto rest = name.substr(9);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("weighted policy needs weighted:<w1>:<w2>");
        return dupsim::DupPolicy::weighted(std::stod(rest.substr(0, colon)),
                                           std::stod(rest.substr(colon + 1)));
    }
    throw std::invalid_argument("unknown policy: " + name);
}

int run_duplication_cmd(const DuplicationArgs& args) {
    const json cfg = load_config(args.config_path);
    const int64_t k64 = args.gen_size_k >= 0 ? args.gen_size_k
                                              : config_get<int64_t>(cfg, "gen_size_k", 16);
    const int64_t payload64 = args.payload_len >= 0 ? args.payload_len
                                                    : config_get<int64_t>(cfg, "payload_len", 32);
    if (k64 < 1 || k64 > int64_t(kMaxGenerationSize))
        throw std::invalid_argument("gen-size must lie in [1, 1024]");
    if (payload64 < 1) throw std::invalid_argument("payload-len must be >= 1");
    const uint16_t k = uint16_t(k64);
    const uint32_t payload = uint32_t(payload64);
    const unsigned q = args.field_order >= 0 ? unsigned(args.field_order)
                                             : config_get<unsigned>(cfg, "field_order", 256);

    std::array<dupsim::LegConfig, 2> legs{{{0.0, 1}, {0.0, 1}}};
    if (!args.legs.empty()) {
        std::stringstream ss(args.legs);
        std::string item;
        size_t i = 0;
        while (std::getline(ss, item, ',') && i < 2) {
            const auto colon = item.find(':');
            legs[i].erasure_eps = std::stod(item.substr(0, colon));
            if (colon != std::string::npos)
                legs[i].packets_per_slot = uint32_t(std::stoul(item.substr(colon + 1)));
            ++i;
        }
        if (i != 2) throw std::invalid_argument("--legs needs two entries: eps:cap,eps:cap");
    } else if (cfg.contains("legs")) {
        const auto& arr = cfg.at("legs");
        if (!arr.is_array() || arr.size() != 2)
            throw std::invalid_argument("config legs must be an array of two objects");
        for (size_t i = 0; i < 2; ++i) {
            legs[i].erasure_eps = config_get<double>(arr[i], "eps", 0.0);
            legs[i].packets_per_slot = config_get<uint32_t>(arr[i], "packets_per_slot", 1);
        }
    }
    legs[0].validate();
    legs[1].validate();

    std::vector<dupsim::DupPolicy> policies;
    std::vector<std::string> policy_names;
    {
        std::string spec = !args.policies.empty() ? args.policies : "";
        if (spec.empty() && cfg.contains("policies")) {
            for (const auto& p : cfg.at("policies")) {
                policies.push_back(parse_policy(p.get<std::string>()));
                policy_names.push_back(p.get<std::string>());
            }
        } else {
            if (spec.empty()) spec = "mirror,split_round_robin";
            std::stringstream ss(spec);
            std::string item;
            while (std::getline(ss, item, ',')) {
                policies.push_back(parse_policy(item));
                policy_names.push_back(item);
            }
        }
    }
    if (policies.empty()) throw std::invalid_argument("at least one policy is required");

    const auto seeds = parse_u64_list(!args.seeds.empty()
                                          ? args.seeds
                                          : config_get<std::string>(cfg, "seeds", "1:20"));
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    const uint64_t max_slots = args.max_slots ? args.max_slots
                                              : config_get<uint64_t>(cfg, "max_slots", 0);

    std::optional<dupsim::UepSetup> uep_setup;
    if (cfg.contains("uep")) {
        const auto& u = cfg.at("uep");
        dupsim::UepSetup setup;
        for (const auto& size : u.at("layers")) setup.profile.layer_sizes.push_back(size.get<uint16_t>());
        const std::string scheme = config_get<std::string>(u, "scheme", "EW");
        setup.scheme = scheme == "NOW" ? uep::WindowScheme::now : uep::WindowScheme::ew;
        if (u.contains("window_dist"))
            setup.dist.probs = u.at("window_dist").get<std::vector<double>>();
        else
            setup.dist = uep::WindowDistribution::uniform(setup.profile.num_layers());
        setup.profile.validate(k);
        setup.dist.validate(setup.profile.num_layers());
        uep_setup = std::move(setup);
    }

    json effective{{"gen_size_k", k},
                   {"payload_len", payload},
                   {"field_order", q},
                   {"legs", json::array({json{{"eps", legs[0].erasure_eps},
                                              {"packets_per_slot", legs[0].packets_per_slot}},
                                         json{{"eps", legs[1].erasure_eps},
                                              {"packets_per_slot", legs[1].packets_per_slot}}})},
                   {"policies", policy_names},
                   {"seeds", seeds.size()},
                   {"max_slots", max_slots},
                   {"uep", uep_setup.has_value()}};

    dupsim::BlockParams params{k, payload, q};
    EncoderConfig enc_cfg;
    enc_cfg.field = FieldSpec(q);

    std::vector<std::vector<dupsim::DupRunReport>> runs(policies.size());
    for (auto& r : runs) r.resize(seeds.size());
    parallel_for(policies.size() * seeds.size(), args.threads, [&](size_t index) {
        const size_t p = index / seeds.size();
        const size_t s = index % seeds.size();
        const auto block = dupsim::random_block(params, seeds[s]);
        runs[p][s] =
            dupsim::run_duplication(block, enc_cfg, legs, policies[p], max_slots, seeds[s], uep_setup);
    });

    csv::Writer w;
    csv_preamble(w, "simulate duplication", effective, args.seed);
    w.row("kind", "policy", "seed", "decoded", "slots_to_decode", "sent_leg1", "sent_leg2",
          "recv_leg1", "recv_leg2", "overhead_ratio", "runs", "decode_rate", "mean_slots",
          "ci95_slots", "mean_overhead", "ci95_overhead");
    for (size_t p = 0; p < policies.size(); ++p) {
        for (size_t s = 0; s < seeds.size(); ++s) {
            const auto& r = runs[p][s];
            if (r.slots_to_decode)
                w.row("run", policy_names[p], seeds[s], r.decoded, *r.slots_to_decode,
                      r.packets_sent[0], r.packets_sent[1], r.packets_received[0],
                      r.packets_received[1], r.overhead_ratio, "", "", "", "", "", "");
            else
                w.row("run", policy_names[p], seeds[s], r.decoded, "", r.packets_sent[0],
                      r.packets_sent[1], r.packets_received[0], r.packets_received[1],
                      r.overhead_ratio, "", "", "", "", "", "");
        }
    }
    // summary rows from the per-run reports, same statistics as compare_policies
    for (size_t p = 0; p < policies.size(); ++p) {
        double slot_sum = 0.0, slot_sq = 0.0, over_sum = 0.0, over_sq = 0.0;
        uint64_t decoded = 0;
        for (const auto& r : runs[p]) {
            if (r.decoded) {
                ++decoded;
                slot_sum += double(*r.slots_to_decode);
                slot_sq += double(*r.slots_to_decode) * double(*r.slots_to_decode);
            }
            over_sum += r.overhead_ratio;
            over_sq += r.overhead_ratio * r.overhead_ratio;
        }
        const double n_runs = double(seeds.size());
        const double rate = decoded / n_runs;
        double mean_slots = 0.0, ci_slots = 0.0;
        if (decoded > 0) {
            mean_slots = slot_sum / double(decoded);
            if (decoded > 1) {
                const double var = (slot_sq - slot_sum * mean_slots) / double(decoded - 1);
                ci_slots = 1.959964 * std::sqrt(std::max(var, 0.0) / double(decoded));
            }
        }
        const double mean_over = over_sum / n_runs;
        double ci_over = 0.0;
        if (seeds.size() > 1) {
            const double var = (over_sq - over_sum * mean_over) / (n_runs - 1.0);
            ci_over = 1.959964 * std::sqrt(std::max(var, 0.0) / n_runs);
        }
        w.row("summary", policy_names[p], "", "", "", "", "", "", "", "", seeds.size(), rate,
              mean_slots, ci_slots, mean_over, ci_over);
    }
    emit_csv(args.out, w.str());
    return kExitOk;
}

// ------------------------------------------------------------ grap solve --

struct GrapArgs {
    std::string instance_path, out;
    bool oracle = false;
    uint64_t n_max = 40;
    uint64_t seed = 1;
};

grap::GrapInstance load_instance(const std::string& path) {
    const json cfg = load_config(path);
    grap::GrapInstance instance;
    try {
        for (const auto& k : cfg.at("layers")) instance.layer_sizes.push_back(k.get<uint16_t>());
        instance.field_order = config_get<unsigned>(cfg, "field_order", 256);
        const std::string scheme = config_get<std::string>(cfg, "scheme", "NOW");
        if (scheme != "NOW" && scheme != "EW")
            throw std::invalid_argument("scheme must be NOW or EW");
        instance.scheme = scheme == "NOW" ? uep::WindowScheme::now : uep::WindowScheme::ew;
        instance.mcs.cost_per_packet = cfg.at("mcs_costs").get<std::vector<double>>();
        for (const auto& user : cfg.at("users"))
            instance.mcs.user_eps.push_back(user.at("eps").get<std::vector<double>>());
        instance.target_users = cfg.at("target_users").get<std::vector<uint32_t>>();
        instance.pd_threshold = cfg.at("pd_threshold").get<double>();
        instance.frame_capacity = cfg.at("frame_capacity").get<double>();
        instance.deadline_frames = cfg.at("deadline_frames").get<uint32_t>();
        const std::string utility = config_get<std::string>(cfg, "utility", "total_packets");
        if (utility == "total_packets")
            instance.utility = grap::UtilityKind::total_packets;
        else if (utility == "total_resource_units")
            instance.utility = grap::UtilityKind::total_resource_units;
        else
            throw std::invalid_argument("utility must be total_packets or total_resource_units");
        const std::string capacity = config_get<std::string>(cfg, "capacity_mode", "resource_units");
        if (capacity == "resource_units")
            instance.capacity_mode = grap::CapacityMode::resource_units;
        else if (capacity == "packet_count")
            instance.capacity_mode = grap::CapacityMode::packet_count;
        else
            throw std::invalid_argument("capacity_mode must be resource_units or packet_count");
        instance.ew_trials = config_get<uint64_t>(cfg, "ew_trials", 2000);
        instance.mc_seed = config_get<uint64_t>(cfg, "mc_seed", 1);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("instance file schema violation: ") + e.what());
    }
    instance.validate();
    return instance;
}

template <typename T>
std::string join_list(const std::vector<T>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        if constexpr (std::is_floating_point_v<T>)
            out += csv::format_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

int run_grap(const GrapArgs& args) {
    const auto instance = load_instance(args.instance_path);
    const auto solution = args.oracle ? grap::brute_force_solve(instance, args.n_max)
                                      : grap::heuristic_solve(instance);

    json effective{{"instance", args.instance_path},
                   {"oracle", args.oracle},
                   {"n_max", args.n_max},
                   {"layers", instance.layer_sizes.size()},
                   {"users", instance.mcs.user_count()},
                   {"mcs_count", instance.mcs.mcs_count()},
                   {"scheme", instance.scheme == uep::WindowScheme::now ? "NOW" : "EW"}};

    csv::Writer w;
    csv_preamble(w, "grap solve", effective, args.seed);
    w.row("feasible", "objective", "mcs", "packets", "coverage", "c5_mcs_ordering", "c6_coverage",
          "c7_frame_capacity", "c8_deadline", "coverage_margin", "capacity_margin",
          "deadline_margin", "reason");
    if (solution.feasible) {
        const auto report = grap::check_feasibility(instance, solution);
        w.row(1, solution.objective, join_list(solution.mcs), join_list(solution.packets),
              join_list(solution.per_layer_coverage), report.mcs_ordering, report.coverage,
              report.frame_capacity, report.deadline, report.coverage_margin,
              report.capacity_margin, report.deadline_margin, "");
    } else {
        w.row(0, "", join_list(solution.mcs), join_list(solution.packets), "", "", "", "", "", "",
              "", "", solution.infeasible_reason);
    }
    emit_csv(args.out, w.str());
    if (!solution.feasible) throw InfeasibleResult(solution.infeasible_reason);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RLNC toolkit: codec, analytics, erasure-channel simulation, GRAP solver"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand
    app.set_version_flag("--version", std::string("rlnc ") + kVersionString);

    uint64_t master_seed = 1;
    unsigned threads = 1;
    app.add_option("--seed", master_seed, "master seed for derived randomness")->capture_default_str();
    app.add_option("--threads", threads, "worker threads for campaign loops")->capture_default_str();

    EncodeArgs encode_args;
    auto* encode = app.add_subcommand("encode", "encode a file into coded packets");
    encode->fallthrough();
    encode->add_option("-i,--input", encode_args.input, "input file")->required();
    encode->add_option("-o,--out", encode_args.out, "output packet file")->required();
    encode->add_option("-K,--gen-size", encode_args.gen_size_k, "source packets per generation")
        ->capture_default_str();
    encode->add_option("--payload-len", encode_args.payload_len, "symbols per packet")
        ->capture_default_str();
    encode->add_option("-q,--field-order", encode_args.field_order, "field order (2, 4, 16, 256)")
        ->capture_default_str();
    encode->add_option("--mode", encode_args.mode,
                       "standard | systematic | sparse | tunable_sparse")
        ->capture_default_str();
    encode->add_option("--extra-packets", encode_args.extra_packets,
                       "coded packets beyond K per generation")
        ->capture_default_str();
    encode->add_option("--sparsity", encode_args.sparsity_t, "zero probability (sparse mode)");
    encode->add_option("--t-start", encode_args.t_start, "initial sparsity (tunable mode)");
    encode->add_option("--t-end", encode_args.t_end, "final sparsity (tunable mode)");
    encode->add_option("--ramp", encode_args.ramp_len, "packets to ramp over (tunable mode)");

    std::string decode_input, decode_out;
    auto* decode = app.add_subcommand("decode", "recover the original file from coded packets");
    decode->fallthrough();
    decode->add_option("-i,--input", decode_input, "packet file")->required();
    decode->add_option("-o,--out", decode_out, "recovered output file")->required();

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "closed-form and Monte-Carlo performance sweeps");
    analyze->fallthrough();
    analyze->add_option("--config", analyze_args.config_path, "JSON config file");
    analyze->add_option("--out", analyze_args.out, "output CSV (default stdout)");
    analyze->add_option("-K,--gen-size", analyze_args.gen_size_k, "source packets per generation");
    analyze->add_option("-q,--field-order", analyze_args.field_order, "field order");
    analyze->add_option("--eps", analyze_args.eps, "erasure probability");
    analyze->add_option("--n-list", analyze_args.n_list, "received-packet sweep, e.g. 1:10 or 4,8");
    analyze->add_option("--N-list", analyze_args.sent_list, "sent-packet sweep, e.g. 8,12,16");
    analyze->add_option("--delay-trials", analyze_args.delay_trials,
                        "Monte-Carlo trials for the delay estimate");

    auto* simulate = app.add_subcommand("simulate", "erasure-channel session simulators");
    simulate->fallthrough();
    simulate->require_subcommand(1);

    MulticastArgs mc_args;
    auto* multicast = simulate->add_subcommand("multicast", "one sender, many erasure receivers");
    multicast->fallthrough();
    multicast->add_option("--config", mc_args.config_path, "JSON config file");
    multicast->add_option("--out", mc_args.out, "output CSV (default stdout)");
    multicast->add_option("-K,--gen-size", mc_args.gen_size_k, "source packets per generation");
    multicast->add_option("--payload-len", mc_args.payload_len, "symbols per packet");
    multicast->add_option("-q,--field-order", mc_args.field_order, "field order");
    multicast->add_option("--mode", mc_args.mode, "encoder mode");
    multicast->add_option("--eps", mc_args.eps_list, "per-receiver erasure probs, e.g. 0.1,0.3");
    multicast->add_option("--N", mc_args.sent_n, "fixed number of coded packets");
    multicast->add_flag("--until-decoded", mc_args.until_decoded,
                        "rateless delivery until all receivers decode");
    multicast->add_option("--max-slots", mc_args.max_slots, "safety bound (0 = 100K)");
    multicast->add_option("--seeds", mc_args.seeds, "session seeds, e.g. 1:100");
    multicast->add_option("--sparsity", mc_args.sparsity_t, "zero probability (sparse mode)");

    DuplicationArgs dup_args;
    auto* duplication =
        simulate->add_subcommand("duplication", "coded duplication over two parallel legs");
    duplication->fallthrough();
    duplication->add_option("--config", dup_args.config_path, "JSON config file");
    duplication->add_option("--out", dup_args.out, "output CSV (default stdout)");
    duplication->add_option("-K,--gen-size", dup_args.gen_size_k, "source packets per generation");
    duplication->add_option("--payload-len", dup_args.payload_len, "symbols per packet");
    duplication->add_option("-q,--field-order", dup_args.field_order, "field order");
    duplication->add_option("--legs", dup_args.legs, "leg parameters eps:cap,eps:cap");
    duplication->add_option("--policies", dup_args.policies,
                            "mirror | split_round_robin | weighted:<w1>:<w2>, comma separated");
    duplication->add_option("--seeds", dup_args.seeds, "run seeds, e.g. 1:200");
    duplication->add_option("--max-slots", dup_args.max_slots, "safety bound (0 = 100K)");

    GrapArgs grap_args;
    auto* grap_cmd = app.add_subcommand("grap", "resource allocation");
    grap_cmd->fallthrough();
    grap_cmd->require_subcommand(1);
    auto* solve = grap_cmd->add_subcommand("solve", "solve a GRAP instance");
    solve->fallthrough();
    solve->add_option("--instance", grap_args.instance_path, "instance JSON file")->required();
    solve->add_option("--out", grap_args.out, "output CSV (default stdout)");
    solve->add_flag("--oracle", grap_args.oracle, "exhaustive brute-force search");
    solve->add_option("--n-max", grap_args.n_max, "per-layer packet bound for the oracle")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        encode_args.seed = master_seed;
        analyze_args.seed = master_seed;
        analyze_args.delay_trials_set = analyze->count("--delay-trials") > 0;
        mc_args.seed = master_seed;
        mc_args.threads = threads;
        dup_args.seed = master_seed;
        dup_args.threads = threads;
        grap_args.seed = master_seed;

        if (encode->parsed()) return run_encode(encode_args);
        if (decode->parsed()) return run_decode(decode_input, decode_out);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (multicast->parsed()) return run_multicast(mc_args);
        if (duplication->parsed()) return run_duplication_cmd(dup_args);
        if (solve->parsed()) return run_grap(grap_args);
    } catch (const InfeasibleResult& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const RuntimeFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
