// Python bindings for the RLNC toolkit core.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rlnc/analytics.hpp"
#include "rlnc/channel.hpp"
#include "rlnc/dupsim.hpp"
#include "rlnc/grap.hpp"
#include "rlnc/version.hpp"
#include "rlnc/wire.hpp"

namespace py = pybind11;
using namespace rlnc;

namespace {

std::vector<uint8_t> to_bytes(const py::bytes& data) {
    const std::string s = data;
    return std::vector<uint8_t>(s.begin(), s.end());
}

py::bytes from_bytes(const std::vector<uint8_t>& data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

EncoderMode mode_from_name(const std::string& name) {
    if (name == "standard") return EncoderMode::standard;
    if (name == "systematic") return EncoderMode::systematic;
    if (name == "sparse") return EncoderMode::sparse;
    if (name == "tunable_sparse") return EncoderMode::tunable_sparse;
    throw std::invalid_argument("unknown encoder mode: " + name);
}

EncoderConfig make_config(unsigned field_order, const std::string& mode, double sparsity_t,
                          uint64_t seed) {
    EncoderConfig cfg;
    cfg.field = FieldSpec(field_order);
    cfg.mode = mode_from_name(mode);
    cfg.sparsity_t = sparsity_t;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

SourceBlock block_from_bytes(const py::bytes& data, uint16_t gen_size_k, uint32_t payload_len,
                             unsigned field_order) {
    const auto bytes = to_bytes(data);
    auto blocks = make_generations(bytes, gen_size_k, payload_len, GaloisField::get(field_order));
    if (blocks.size() != 1)
        throw std::invalid_argument("data spans " + std::to_string(blocks.size()) +
                                    " generations; supply at most one generation of bytes");
    return blocks.front();
}

}  // namespace

PYBIND11_MODULE(_rlnc, m) {
    m.doc() = "Random linear network coding toolkit: codec, analytics, simulators, GRAP solver";
    m.attr("__version__") = kVersionString;

    // ---- field ----
    py::class_<GaloisField>(m, "GaloisField")
        .def(py::init([](unsigned order) { return GaloisField(FieldSpec(order)); }), py::arg("order"))
        .def_static("get", &GaloisField::get, py::arg("order"), py::return_value_policy::reference)
        .def_property_readonly("order", &GaloisField::order)
        .def("add", &GaloisField::add)
        .def("mul", &GaloisField::mul)
        .def("inv", &GaloisField::inv)
        .def("div", &GaloisField::div)
        .def("axpy",
             [](const GaloisField& f, uint8_t coeff, const py::bytes& src, const py::bytes& dst) {
                 auto s = to_bytes(src);
                 auto d = to_bytes(dst);
                 f.axpy(coeff, s, d);
                 return from_bytes(d);
             },
             py::arg("coeff"), py::arg("src"), py::arg("dst"),
             "Returns dst + coeff * src over packed symbol rows");

    // ---- codec ----
    py::class_<SourceBlock>(m, "SourceBlock")
        .def_readonly("generation_id", &SourceBlock::generation_id)
        .def_readonly("gen_size_k", &SourceBlock::gen_size_k)
        .def_readonly("payload_len", &SourceBlock::payload_len)
        .def_readonly("field_order", &SourceBlock::field_order)
        .def_property_readonly("packets", [](const SourceBlock& b) {
            py::list rows;
            for (const auto& row : b.packets) rows.append(from_bytes(row));
            return rows;
        });

    py::class_<CodedPacket>(m, "CodedPacket")
        .def_readonly("generation_id", &CodedPacket::generation_id)
        .def_readonly("window_id", &CodedPacket::window_id)
        .def_property_readonly("coding_vector",
                               [](const CodedPacket& p) { return from_bytes(p.coding_vector); })
        .def_property_readonly("payload", [](const CodedPacket& p) { return from_bytes(p.payload); });

    py::class_<Encoder>(m, "Encoder")
        .def(py::init([](const py::bytes& data, uint16_t gen_size_k, uint32_t payload_len,
                         unsigned field_order, const std::string& mode, double sparsity_t,
                         uint64_t seed) {
                 return Encoder(block_from_bytes(data, gen_size_k, payload_len, field_order),
                                make_config(field_order, mode, sparsity_t, seed));
             }),
             py::arg("data"), py::arg("gen_size_k"), py::arg("payload_len"),
             py::arg("field_order") = 256, py::arg("mode") = "standard",
             py::arg("sparsity_t") = 0.0, py::arg("seed") = 0)
        .def("next", &Encoder::next)
        .def_property_readonly("packets_emitted", &Encoder::packets_emitted);

    py::class_<AbsorbResult>(m, "AbsorbResult")
        .def_readonly("innovative", &AbsorbResult::innovative)
        .def_readonly("rank", &AbsorbResult::rank);

    py::class_<Decoder>(m, "Decoder")
        .def(py::init([](uint16_t gen_size_k, uint32_t payload_len, unsigned field_order,
                         uint32_t generation_id) {
                 return Decoder(GaloisField::get(field_order), generation_id, gen_size_k,
                                payload_len);
             }),
             py::arg("gen_size_k"), py::arg("payload_len"), py::arg("field_order") = 256,
             py::arg("generation_id") = 0)
        .def("absorb", &Decoder::absorb)
        .def_property_readonly("rank", &Decoder::rank)
        .def_property_readonly("received_count", &Decoder::received_count)
        .def_property_readonly("complete", &Decoder::complete)
        .def("packet_recovered", &Decoder::packet_recovered)
        .def("try_recover", [](const Decoder& d) -> py::object {
            const auto block = d.try_recover();
            if (!block) return py::none();
            std::vector<uint8_t> flat;
            for (const auto& row : block->packets) flat.insert(flat.end(), row.begin(), row.end());
            return from_bytes(flat);
        });

    // ---- container ----
    m.def(
        "encode_stream",
        [](const py::bytes& data, uint16_t gen_size_k, uint32_t payload_len, unsigned field_order,
           const std::string& mode, uint64_t extra_packets, double sparsity_t, uint64_t seed) {
            const auto cfg = make_config(field_order, mode, sparsity_t, seed);
            std::ostringstream out;
            wire::encode_stream(out, to_bytes(data), gen_size_k, payload_len, cfg, extra_packets);
            const std::string s = out.str();
            return py::bytes(s);
        },
        py::arg("data"), py::arg("gen_size_k"), py::arg("payload_len"),
        py::arg("field_order") = 256, py::arg("mode") = "standard", py::arg("extra_packets") = 0,
        py::arg("sparsity_t") = 0.0, py::arg("seed") = 0,
        "Encode a byte string into the coded-packet container format");

    m.def(
        "decode_stream",
        [](const py::bytes& container) {
            std::istringstream in{std::string(container)};
            const auto result = wire::decode_stream(in);
            if (!result.complete) {
                std::string msg = "rank deficit in generation(s):";
                for (const auto& d : result.deficits)
                    msg += " " + std::to_string(d.generation_id) + " (rank " +
                           std::to_string(d.rank) + "/" + std::to_string(d.gen_size_k) + ")";
                throw std::runtime_error(msg);
            }
            return from_bytes(result.data);
        },
        py::arg("container"), "Recover the original byte string from a coded-packet container");

    // ---- analytics ----
    m.def("decode_prob_given_received", &analytics::decode_prob_given_received, py::arg("n"),
          py::arg("gen_size_k"), py::arg("field_order"));
    m.def("decode_prob_pdf", &analytics::decode_prob_pdf, py::arg("n"), py::arg("gen_size_k"),
          py::arg("field_order"));
    m.def("decode_prob_after_sent", &analytics::decode_prob_after_sent, py::arg("sent_n"),
          py::arg("gen_size_k"), py::arg("field_order"), py::arg("eps"));
    m.def("outage_prob", &analytics::outage_prob, py::arg("sent_n"), py::arg("gen_size_k"),
          py::arg("field_order"), py::arg("eps"));
    m.def(
        "avg_decoding_delay_mc",
        [](uint32_t k, unsigned q, double eps, uint64_t trials, uint64_t seed) {
            const auto est = analytics::avg_decoding_delay_mc(k, q, eps, trials, seed);
            return py::make_tuple(est.mean, est.ci95);
        },
        py::arg("gen_size_k"), py::arg("field_order"), py::arg("eps"),
        py::arg("trials") = analytics::kDefaultTrials, py::arg("seed") = 1,
        "Mean slots to full rank and the 95% confidence half-width");
    m.def("mc_decode_freq", &analytics::mc_decode_freq, py::arg("sent_n"), py::arg("gen_size_k"),
          py::arg("field_order"), py::arg("eps"), py::arg("trials") = analytics::kDefaultTrials,
          py::arg("seed") = 1);
    m.def(
        "layered_decode_prob_now",
        [](const std::vector<uint64_t>& per_layer_sent, const std::vector<uint16_t>& layer_sizes,
           unsigned q, double eps) {
            return analytics::layered_decode_prob_now(per_layer_sent, layer_sizes, q, eps);
        },
        py::arg("per_layer_sent"), py::arg("layer_sizes"), py::arg("field_order"), py::arg("eps"));
    m.def(
        "layered_decode_prob_ew_mc",
        [](const std::vector<uint64_t>& per_window_sent, const std::vector<uint16_t>& layer_sizes,
           unsigned q, double eps, uint64_t trials, uint64_t seed) {
            uep::LayerProfile profile{layer_sizes};
            const auto probs =
                analytics::layered_decode_prob_ew_mc(per_window_sent, profile, q, eps, trials, seed);
            return py::make_tuple(probs.prob, probs.ci95);
        },
        py::arg("per_window_sent"), py::arg("layer_sizes"), py::arg("field_order"), py::arg("eps"),
        py::arg("trials") = 10000, py::arg("seed") = 1);

    // ---- channel ----
    py::class_<channel::ReceiverOutcome>(m, "ReceiverOutcome")
        .def_readonly("id", &channel::ReceiverOutcome::id)
        .def_readonly("eps", &channel::ReceiverOutcome::eps)
        .def_readonly("slots_sent", &channel::ReceiverOutcome::slots_sent)
        .def_readonly("packets_received", &channel::ReceiverOutcome::packets_received)
        .def_readonly("decoded", &channel::ReceiverOutcome::decoded)
        .def_readonly("slots_to_decode", &channel::ReceiverOutcome::slots_to_decode);

    py::class_<channel::SessionReport>(m, "SessionReport")
        .def_readonly("receivers", &channel::SessionReport::receivers)
        .def_readonly("total_slots", &channel::SessionReport::total_slots)
        .def_readonly("overhead_ratio", &channel::SessionReport::overhead_ratio)
        .def_readonly("max_slots_hit", &channel::SessionReport::max_slots_hit);

    m.def(
        "run_fixed_n",
        [](uint16_t k, uint32_t payload_len, unsigned q, const std::vector<double>& eps,
           uint64_t sent_n, uint64_t seed, const std::string& mode) {
            const auto block = dupsim::random_block({k, payload_len, q}, seed);
            return channel::run_fixed_n(block, make_config(q, mode, 0.0, seed), eps, sent_n, seed);
        },
        py::arg("gen_size_k"), py::arg("payload_len"), py::arg("field_order"), py::arg("eps"),
        py::arg("sent_n"), py::arg("seed") = 1, py::arg("mode") = "standard");
    m.def(
        "run_until_decoded",
        [](uint16_t k, uint32_t payload_len, unsigned q, const std::vector<double>& eps,
           uint64_t max_slots, uint64_t seed, const std::string& mode) {
            const auto block = dupsim::random_block({k, payload_len, q}, seed);
            return channel::run_until_decoded(block, make_config(q, mode, 0.0, seed), eps,
                                              max_slots, seed);
        },
        py::arg("gen_size_k"), py::arg("payload_len"), py::arg("field_order"), py::arg("eps"),
        py::arg("max_slots") = 0, py::arg("seed") = 1, py::arg("mode") = "standard");

    // ---- uep ----
    py::enum_<uep::WindowScheme>(m, "WindowScheme")
        .value("NOW", uep::WindowScheme::now)
        .value("EW", uep::WindowScheme::ew);

    // ---- grap ----
    py::enum_<grap::UtilityKind>(m, "UtilityKind")
        .value("total_packets", grap::UtilityKind::total_packets)
        .value("total_resource_units", grap::UtilityKind::total_resource_units);
    py::enum_<grap::CapacityMode>(m, "CapacityMode")
        .value("resource_units", grap::CapacityMode::resource_units)
        .value("packet_count", grap::CapacityMode::packet_count);

    py::class_<grap::McsTable>(m, "McsTable")
        .def(py::init<>())
        .def_readwrite("cost_per_packet", &grap::McsTable::cost_per_packet)
        .def_readwrite("user_eps", &grap::McsTable::user_eps);

    py::class_<grap::GrapInstance>(m, "GrapInstance")
        .def(py::init<>())
        .def_readwrite("layer_sizes", &grap::GrapInstance::layer_sizes)
        .def_readwrite("field_order", &grap::GrapInstance::field_order)
        .def_readwrite("scheme", &grap::GrapInstance::scheme)
        .def_readwrite("mcs", &grap::GrapInstance::mcs)
        .def_readwrite("target_users", &grap::GrapInstance::target_users)
        .def_readwrite("pd_threshold", &grap::GrapInstance::pd_threshold)
        .def_readwrite("frame_capacity", &grap::GrapInstance::frame_capacity)
        .def_readwrite("deadline_frames", &grap::GrapInstance::deadline_frames)
        .def_readwrite("utility", &grap::GrapInstance::utility)
        .def_readwrite("capacity_mode", &grap::GrapInstance::capacity_mode)
        .def_readwrite("ew_trials", &grap::GrapInstance::ew_trials)
        .def_readwrite("mc_seed", &grap::GrapInstance::mc_seed)
        .def("validate", &grap::GrapInstance::validate);

    py::class_<grap::ConstraintReport>(m, "ConstraintReport")
        .def_readonly("mcs_ordering", &grap::ConstraintReport::mcs_ordering)
        .def_readonly("coverage", &grap::ConstraintReport::coverage)
        .def_readonly("frame_capacity", &grap::ConstraintReport::frame_capacity)
        .def_readonly("deadline", &grap::ConstraintReport::deadline)
        .def_readonly("coverage_margin", &grap::ConstraintReport::coverage_margin)
        .def_readonly("capacity_margin", &grap::ConstraintReport::capacity_margin)
        .def_readonly("deadline_margin", &grap::ConstraintReport::deadline_margin)
        .def("ok", &grap::ConstraintReport::ok)
        .def("failing", &grap::ConstraintReport::failing);

    py::class_<grap::GrapSolution>(m, "GrapSolution")
        .def_readonly("mcs", &grap::GrapSolution::mcs)
        .def_readonly("packets", &grap::GrapSolution::packets)
        .def_readonly("feasible", &grap::GrapSolution::feasible)
        .def_readonly("objective", &grap::GrapSolution::objective)
        .def_readonly("per_layer_coverage", &grap::GrapSolution::per_layer_coverage)
        .def_readonly("infeasible_reason", &grap::GrapSolution::infeasible_reason);

    m.def("grap_heuristic_solve", &grap::heuristic_solve, py::arg("instance"));
    m.def("grap_brute_force_solve", &grap::brute_force_solve, py::arg("instance"),
          py::arg("n_max") = 40);
    m.def("grap_check_feasibility", &grap::check_feasibility, py::arg("instance"),
          py::arg("solution"));
    m.def("grap_coverage", &grap::coverage, py::arg("instance"), py::arg("mcs"),
          py::arg("packets"), py::arg("ell"));
    m.def("make_synthetic_mcs_table", &grap::make_synthetic_mcs_table, py::arg("users"),
          py::arg("mcs_count"), py::arg("seed"), py::arg("base_cost") = 4.0);

    // ---- dupsim ----
    py::class_<dupsim::DupRunReport>(m, "DupRunReport")
        .def_readonly("decoded", &dupsim::DupRunReport::decoded)
        .def_readonly("slots_to_decode", &dupsim::DupRunReport::slots_to_decode)
        .def_readonly("packets_sent", &dupsim::DupRunReport::packets_sent)
        .def_readonly("packets_received", &dupsim::DupRunReport::packets_received)
        .def_readonly("overhead_ratio", &dupsim::DupRunReport::overhead_ratio)
        .def_readonly("max_slots_hit", &dupsim::DupRunReport::max_slots_hit)
        .def_readonly("layers_recovered", &dupsim::DupRunReport::layers_recovered);

    py::class_<dupsim::PolicySummary>(m, "PolicySummary")
        .def_property_readonly("policy",
                               [](const dupsim::PolicySummary& s) {
                                   switch (s.policy.kind) {
                                       case dupsim::DupPolicyKind::mirror: return std::string("mirror");
                                       case dupsim::DupPolicyKind::split_round_robin:
                                           return std::string("split_round_robin");
                                       default: return std::string("weighted");
                                   }
                               })
        .def_readonly("runs", &dupsim::PolicySummary::runs)
        .def_readonly("decode_rate", &dupsim::PolicySummary::decode_rate)
        .def_readonly("mean_slots", &dupsim::PolicySummary::mean_slots)
        .def_readonly("ci95_slots", &dupsim::PolicySummary::ci95_slots)
        .def_readonly("mean_overhead", &dupsim::PolicySummary::mean_overhead)
        .def_readonly("ci95_overhead", &dupsim::PolicySummary::ci95_overhead);

    auto parse_policy = [](const std::string& name, double w1, double w2) {
        if (name == "mirror") return dupsim::DupPolicy::mirror();
        if (name == "split_round_robin") return dupsim::DupPolicy::split();
        if (name == "weighted") return dupsim::DupPolicy::weighted(w1, w2);
        throw std::invalid_argument("unknown policy: " + name);
    };

    m.def(
        "run_duplication",
        [parse_policy](uint16_t k, uint32_t payload_len, unsigned q, double eps1, double eps2,
                       uint32_t cap1, uint32_t cap2, const std::string& policy, double w1,
                       double w2, uint64_t max_slots, uint64_t seed) {
            const auto block = dupsim::random_block({k, payload_len, q}, seed);
            const std::array<dupsim::LegConfig, 2> legs{{{eps1, cap1}, {eps2, cap2}}};
            return dupsim::run_duplication(block, make_config(q, "standard", 0.0, seed), legs,
                                           parse_policy(policy, w1, w2), max_slots, seed);
        },
        py::arg("gen_size_k"), py::arg("payload_len"), py::arg("field_order"), py::arg("eps_leg1"),
        py::arg("eps_leg2"), py::arg("cap_leg1") = 1, py::arg("cap_leg2") = 1,
        py::arg("policy") = "split_round_robin", py::arg("weight_leg1") = 0.5,
        py::arg("weight_leg2") = 0.5, py::arg("max_slots") = 0, py::arg("seed") = 1);

    m.def(
        "compare_duplication_policies",
        [parse_policy](uint16_t k, uint32_t payload_len, unsigned q, double eps1, double eps2,
                       const std::vector<std::string>& policies, const std::vector<uint64_t>& seeds,
                       uint64_t max_slots) {
            const std::array<dupsim::LegConfig, 2> legs{{{eps1, 1}, {eps2, 1}}};
            std::vector<dupsim::DupPolicy> parsed;
            for (const auto& name : policies) parsed.push_back(parse_policy(name, 0.5, 0.5));
            return dupsim::compare_policies({k, payload_len, q}, legs, parsed, seeds, max_slots);
        },
        py::arg("gen_size_k"), py::arg("payload_len"), py::arg("field_order"), py::arg("eps_leg1"),
        py::arg("eps_leg2"), py::arg("policies"), py::arg("seeds"), py::arg("max_slots") = 0);
}
