#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rlnc/codec.hpp"

namespace rlnc::wire {

// Coded-packet wire format, byte-exact, little-endian integers:
//
//   magic "RLNC" | version u8 = 1 | field_order u8 (log2 q) | gen_size_K u16
//   | payload_len u32 (symbols) | generation_id u32 | window_id u8
//   | coding_vector (K symbols, bit-packed for q < 256, one byte each for 256)
//   | payload (packed symbols)
//
// The encode/decode file container prepends the total original byte length
// as a u64, then concatenates packets.
inline constexpr char kMagic[4] = {'R', 'L', 'N', 'C'};
inline constexpr uint8_t kVersion = 1;

struct PacketHeader {
    uint8_t field_order_log2 = 8;
    uint16_t gen_size_k = 0;
    uint32_t payload_len = 0;
    uint32_t generation_id = 0;
    uint8_t window_id = 0;

    unsigned field_order() const { return 1u << field_order_log2; }
};

void write_packet(std::ostream& out, const CodedPacket& pkt, const GaloisField& field,
                  uint32_t payload_len);

// Reads one packet; std::nullopt at clean EOF. Malformed magic, version or
// truncated data raise std::runtime_error.
std::optional<std::pair<PacketHeader, CodedPacket>> read_packet(std::istream& in);

// High-level stream coding used by the CLI and the bindings: splits data into
// generations and writes K + extra_packets coded packets per generation.
void encode_stream(std::ostream& out, std::span<const uint8_t> data, uint16_t gen_size_k,
                   uint32_t payload_len, const EncoderConfig& cfg, uint64_t extra_packets);

struct GenerationDeficit {
    uint32_t generation_id = 0;
    uint32_t rank = 0;
    uint16_t gen_size_k = 0;
};

struct DecodeResult {
    bool complete = false;
    std::vector<uint8_t> data;               // valid when complete
    std::vector<GenerationDeficit> deficits;  // one entry per unfinished generation
};

DecodeResult decode_stream(std::istream& in);

}  // namespace rlnc::wire
