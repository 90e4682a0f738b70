#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rlnc/codec.hpp"

namespace rlnc::channel {

// One multicast receiver: an erasure channel of its own plus a decoder.
// Erasure draws come from a stream derived from (seed, channel, id), so a
// receiver's loss pattern is independent of every other receiver and stable
// when receivers are added or removed.
class Receiver {
public:
    Receiver(uint32_t id, double eps, const GaloisField& field, uint32_t generation_id,
             uint16_t gen_size_k, uint32_t payload_len, uint64_t master_seed);

    uint32_t id() const { return id_; }
    double eps() const { return eps_; }
    Decoder& decoder() { return decoder_; }
    const Decoder& decoder() const { return decoder_; }
    Rng& channel_rng() { return rng_; }

private:
    uint32_t id_;
    double eps_;
    Decoder decoder_;
    Rng rng_;
};

struct ReceiverOutcome {
    uint32_t id = 0;
    double eps = 0.0;
    uint64_t slots_sent = 0;        // slots the receiver took part in
    uint64_t packets_received = 0;  // deliveries that survived erasure
    bool decoded = false;
    std::optional<uint64_t> slots_to_decode;
};

struct SessionReport {
    std::vector<ReceiverOutcome> receivers;
    uint64_t total_slots = 0;
    double overhead_ratio = 0.0;  // total_slots / K
    bool max_slots_hit = false;
};

// Delivers one packet across every receiver's independent erasure channel;
// survivors are absorbed into the receivers' decoders. Returns the delivery
// bitmap.
std::vector<bool> transmit_slot(const CodedPacket& pkt, std::span<Receiver> receivers);

// Sends exactly sent_n coded packets; every receiver listens to all of them.
SessionReport run_fixed_n(const SourceBlock& block, const EncoderConfig& cfg,
                          std::span<const double> receiver_eps, uint64_t sent_n, uint64_t seed);

// Rateless delivery: keep transmitting fresh coded packets until every
// receiver has acknowledged full rank (idealized per-slot feedback) or
// max_slots is exhausted; exhaustion is flagged in the report, never thrown.
// max_slots = 0 selects the default bound of 100 * K.
SessionReport run_until_decoded(const SourceBlock& block, const EncoderConfig& cfg,
                                std::span<const double> receiver_eps, uint64_t max_slots,
                                uint64_t seed);

inline constexpr uint64_t kDefaultMaxSlotsFactor = 100;

}  // namespace rlnc::channel
