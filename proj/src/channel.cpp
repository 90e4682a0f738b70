#include "rlnc/channel.hpp"

#include <stdexcept>

namespace rlnc::channel {

Receiver::Receiver(uint32_t id, double eps, const GaloisField& field, uint32_t generation_id,
                   uint16_t gen_size_k, uint32_t payload_len, uint64_t master_seed)
    : id_(id),
      eps_(eps),
      decoder_(field, generation_id, gen_size_k, payload_len),
      rng_(Rng::derive(master_seed, {stream::channel, id})) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("erasure probability must lie in [0, 1]");
}

std::vector<bool> transmit_slot(const CodedPacket& pkt, std::span<Receiver> receivers) {
    std::vector<bool> delivered(receivers.size(), false);
    for (size_t i = 0; i < receivers.size(); ++i) {
        auto& rx = receivers[i];
        if (rx.channel_rng().uniform01() < rx.eps()) continue;
        delivered[i] = true;
        rx.decoder().absorb(pkt);
    }
    return delivered;
}

namespace {

std::vector<Receiver> make_receivers(std::span<const double> receiver_eps, const SourceBlock& block,
                                     const GaloisField& field, uint64_t seed) {
    std::vector<Receiver> receivers;
    receivers.reserve(receiver_eps.size());
    for (size_t i = 0; i < receiver_eps.size(); ++i)
        receivers.emplace_back(static_cast<uint32_t>(i), receiver_eps[i], field,
                               block.generation_id, block.gen_size_k, block.payload_len, seed);
    return receivers;
}

}  // namespace

SessionReport run_fixed_n(const SourceBlock& block, const EncoderConfig& cfg,
                          std::span<const double> receiver_eps, uint64_t sent_n, uint64_t seed) {
    block.validate();
    const auto& field = GaloisField::get(cfg.field.order);
    EncoderConfig session_cfg = cfg;
    session_cfg.seed = seed;
    Encoder encoder(block, session_cfg);
    auto receivers = make_receivers(receiver_eps, block, field, seed);

    SessionReport report;
    report.receivers.resize(receivers.size());
    std::vector<uint64_t> received(receivers.size(), 0);
    std::vector<std::optional<uint64_t>> done_at(receivers.size());

    for (uint64_t slot = 1; slot <= sent_n; ++slot) {
        const CodedPacket pkt = encoder.next();
        const auto delivered = transmit_slot(pkt, receivers);
        for (size_t i = 0; i < receivers.size(); ++i) {
            if (delivered[i]) ++received[i];
            if (!done_at[i] && receivers[i].decoder().complete()) done_at[i] = slot;
        }
    }

    for (size_t i = 0; i < receivers.size(); ++i) {
        auto& out = report.receivers[i];
        out.id = receivers[i].id();
        out.eps = receivers[i].eps();
        out.slots_sent = sent_n;
        out.packets_received = received[i];
        out.decoded = receivers[i].decoder().complete();
        out.slots_to_decode = done_at[i];
    }
    report.total_slots = sent_n;
    report.overhead_ratio = double(sent_n) / double(block.gen_size_k);
    return report;
}

SessionReport run_until_decoded(const SourceBlock& block, const EncoderConfig& cfg,
                                std::span<const double> receiver_eps, uint64_t max_slots,
                                uint64_t seed) {
    block.validate();
    if (max_slots == 0) max_slots = kDefaultMaxSlotsFactor * block.gen_size_k;
    const auto& field = GaloisField::get(cfg.field.order);
    EncoderConfig session_cfg = cfg;
    session_cfg.seed = seed;
    Encoder encoder(block, session_cfg);
    auto receivers = make_receivers(receiver_eps, block, field, seed);

    SessionReport report;
    report.receivers.resize(receivers.size());
    std::vector<uint64_t> received(receivers.size(), 0);
    std::vector<uint64_t> participated(receivers.size(), 0);
    std::vector<std::optional<uint64_t>> done_at(receivers.size());
    size_t active = receivers.size();

    uint64_t slot = 0;
    while (active > 0 && slot < max_slots) {
        ++slot;
        const CodedPacket pkt = encoder.next();
        for (size_t i = 0; i < receivers.size(); ++i) {
            if (done_at[i]) continue;  // full-rank receivers have left the session
            auto& rx = receivers[i];
            ++participated[i];
            if (rx.channel_rng().uniform01() < rx.eps()) continue;
            ++received[i];
            rx.decoder().absorb(pkt);
            if (rx.decoder().complete()) {
                done_at[i] = slot;
                --active;
            }
        }
    }

    for (size_t i = 0; i < receivers.size(); ++i) {
        auto& out = report.receivers[i];
        out.id = receivers[i].id();
        out.eps = receivers[i].eps();
        out.slots_sent = participated[i];
        out.packets_received = received[i];
        out.decoded = receivers[i].decoder().complete();
        out.slots_to_decode = done_at[i];
    }
    report.total_slots = slot;
    report.overhead_ratio = double(slot) / double(block.gen_size_k);
    report.max_slots_hit = active > 0;
    return report;
}

}  // namespace rlnc::channel
