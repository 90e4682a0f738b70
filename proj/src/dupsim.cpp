#include "rlnc/dupsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlnc::dupsim {

void LegConfig::validate() const {
    if (erasure_eps < 0.0 || erasure_eps > 1.0)
        throw std::invalid_argument("erasure probability must lie in [0, 1]");
    if (packets_per_slot < 1) throw std::invalid_argument("leg capacity must be >= 1 packet/slot");
}

void DupPolicy::validate() const {
    if (kind != DupPolicyKind::weighted) return;
    if (weight_leg1 <= 0.0 || weight_leg2 <= 0.0)
        throw std::invalid_argument("policy weights must be positive");
    if (std::abs(weight_leg1 + weight_leg2 - 1.0) > 1e-9)
        throw std::invalid_argument("policy weights must sum to 1");
}

DupPolicy DupPolicy::weighted(double w1, double w2) {
    DupPolicy policy{DupPolicyKind::weighted, w1, w2};
    policy.validate();
    return policy;
}

namespace {

// Per-leg packet sources. Mirror draws everything from leg 1's encoder and
// replays the same packets on leg 2; the other policies give each leg its
// own coefficient stream.
struct LegEncoders {
    std::optional<Encoder> plain[2];
    std::optional<uep::UepEncoder> layered[2];

    CodedPacket next(size_t leg) { return plain[leg] ? plain[leg]->next() : layered[leg]->next(); }
};

class JointReceiver {
public:
    JointReceiver(const SourceBlock& block, const std::optional<UepSetup>& setup,
                  const GaloisField& field) {
        if (setup) {
            session_.emplace(field, block.generation_id, setup->profile, setup->scheme,
                             block.payload_len);
        } else {
            decoder_.emplace(field, block.generation_id, block.gen_size_k, block.payload_len);
        }
    }

    void absorb(const CodedPacket& pkt) {
        if (session_)
            session_->absorb(pkt);
        else
            decoder_->absorb(pkt);
    }

    bool complete() const { return session_ ? session_->complete() : decoder_->complete(); }
    size_t layers_recovered() const { return session_ ? session_->recovered_layers() : (complete() ? 1 : 0); }

    // Interleaved two-leg arrival must still reproduce the source bytes.
    void verify_recovery(const SourceBlock& block) const {
        const auto recovered = session_ ? session_->try_recover() : decoder_->try_recover();
        if (!recovered || recovered->packets != block.packets)
            throw std::logic_error("joint decoder reached full rank but not the source block");
    }

private:
    std::optional<Decoder> decoder_;
    std::optional<uep::UepSession> session_;
};

}  // namespace

DupRunReport run_duplication(const SourceBlock& block, const EncoderConfig& cfg,
                             const std::array<LegConfig, 2>& legs, const DupPolicy& policy,
                             uint64_t max_slots, uint64_t seed,
                             const std::optional<UepSetup>& uep_setup) {
    block.validate();
    legs[0].validate();
    legs[1].validate();
    policy.validate();
    if (max_slots == 0) max_slots = 100ull * block.gen_size_k;

    const auto& field = GaloisField::get(cfg.field.order);
    EncoderConfig leg_cfg = cfg;
    leg_cfg.seed = seed;

    LegEncoders encoders;
    for (size_t leg = 0; leg < 2; ++leg) {
        const uint64_t tag = stream::leg + leg;
        if (uep_setup) {
            encoders.layered[leg].emplace(block, uep_setup->profile, uep_setup->scheme,
                                          uep_setup->dist, leg_cfg, tag);
        } else {
            encoders.plain[leg].emplace(block, leg_cfg, tag);
        }
    }
    Rng channel_rng[2] = {Rng(Rng::derive(seed, {stream::channel, 0})),
                          Rng(Rng::derive(seed, {stream::channel, 1}))};
    JointReceiver receiver(block, uep_setup, field);

    DupRunReport report;
    double credit[2] = {0.0, 0.0};
    uint64_t slot = 0;
    while (!receiver.complete() && slot < max_slots) {
        ++slot;

        uint32_t budget[2] = {legs[0].packets_per_slot, legs[1].packets_per_slot};
        if (policy.kind == DupPolicyKind::weighted) {
            const double total = double(budget[0]) + double(budget[1]);
            const double weights[2] = {policy.weight_leg1, policy.weight_leg2};
            for (size_t leg = 0; leg < 2; ++leg) {
                credit[leg] += weights[leg] * total;
                const uint32_t send = std::min<uint32_t>(
                    budget[leg], static_cast<uint32_t>(std::floor(credit[leg])));
                credit[leg] -= send;
                // saturate so a capacity-starved leg cannot bank unbounded credit
                credit[leg] = std::min(credit[leg], double(legs[leg].packets_per_slot));
                budget[leg] = send;
            }
        }

        if (policy.kind == DupPolicyKind::mirror) {
            // Same fresh packets on both legs, fates drawn per leg.
            const uint32_t count = std::max(budget[0], budget[1]);
            for (uint32_t p = 0; p < count; ++p) {
                const CodedPacket pkt = encoders.next(0);
                for (size_t leg = 0; leg < 2; ++leg) {
                    if (p >= budget[leg]) continue;
                    ++report.packets_sent[leg];
                    if (channel_rng[leg].uniform01() < legs[leg].erasure_eps) continue;
                    ++report.packets_received[leg];
                    receiver.absorb(pkt);
                }
            }
        } else {
            for (size_t leg = 0; leg < 2; ++leg) {
                for (uint32_t p = 0; p < budget[leg]; ++p) {
                    const CodedPacket pkt = encoders.next(leg);
                    ++report.packets_sent[leg];
                    if (channel_rng[leg].uniform01() < legs[leg].erasure_eps) continue;
                    ++report.packets_received[leg];
                    receiver.absorb(pkt);
                }
            }
        }
        if (receiver.complete() && !report.slots_to_decode) report.slots_to_decode = slot;
    }

    report.decoded = receiver.complete();
    report.max_slots_hit = !report.decoded;
    report.layers_recovered = receiver.layers_recovered();
    if (report.decoded) receiver.verify_recovery(block);
    report.overhead_ratio =
        double(report.packets_sent[0] + report.packets_sent[1]) / double(block.gen_size_k);
    return report;
}

SourceBlock random_block(const BlockParams& params, uint64_t seed) {
    const auto& field = GaloisField::get(params.field_order);
    SourceBlock block;
    block.generation_id = 0;
    block.gen_size_k = params.gen_size_k;
    block.payload_len = params.payload_len;
    block.field_order = params.field_order;
    Rng rng(Rng::derive(seed, {stream::block}));
    const size_t row_bytes = field.packed_size(params.payload_len);
    block.packets.assign(params.gen_size_k, std::vector<uint8_t>(row_bytes, 0));
    for (auto& row : block.packets) {
        for (uint32_t i = 0; i < params.payload_len; ++i)
            field.set_symbol(row, i, static_cast<uint8_t>(rng.below(params.field_order)));
    }
    return block;
}

std::vector<PolicySummary> compare_policies(const BlockParams& params,
                                            const std::array<LegConfig, 2>& legs,
                                            const std::vector<DupPolicy>& policies,
                                            std::span<const uint64_t> seeds, uint64_t max_slots,
                                            const std::optional<UepSetup>& uep_setup) {
    std::vector<PolicySummary> table;
    table.reserve(policies.size());
    EncoderConfig cfg;
    cfg.field = FieldSpec(params.field_order);

    for (const auto& policy : policies) {
        PolicySummary row;
        row.policy = policy;
        row.runs = seeds.size();
        double slot_sum = 0.0, slot_sq = 0.0, over_sum = 0.0, over_sq = 0.0;
        uint64_t decoded = 0;
        for (const uint64_t seed : seeds) {
            const SourceBlock block = random_block(params, seed);
            const auto report = run_duplication(block, cfg, legs, policy, max_slots, seed, uep_setup);
            if (report.decoded) {
                ++decoded;
                slot_sum += double(*report.slots_to_decode);
                slot_sq += double(*report.slots_to_decode) * double(*report.slots_to_decode);
            }
            over_sum += report.overhead_ratio;
            over_sq += report.overhead_ratio * report.overhead_ratio;
        }
        const double n_runs = double(seeds.size());
        row.decode_rate = seeds.empty() ? 0.0 : double(decoded) / n_runs;
        if (decoded > 0) {
            row.mean_slots = slot_sum / double(decoded);
            if (decoded > 1) {
                const double var = (slot_sq - slot_sum * row.mean_slots) / double(decoded - 1);
                row.ci95_slots = 1.959964 * std::sqrt(std::max(var, 0.0) / double(decoded));
            }
        }
        if (!seeds.empty()) {
            row.mean_overhead = over_sum / n_runs;
            if (seeds.size() > 1) {
                const double var = (over_sq - over_sum * row.mean_overhead) / (n_runs - 1.0);
                row.ci95_overhead = 1.959964 * std::sqrt(std::max(var, 0.0) / n_runs);
            }
        }
        table.push_back(row);
    }
    return table;
}

}  // namespace rlnc::dupsim
