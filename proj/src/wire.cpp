#include "rlnc/wire.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace rlnc::wire {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    uint8_t bytes[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<uint8_t>(value >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    uint8_t bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) throw std::runtime_error("truncated packet stream");
    T value = 0;
    for (size_t i = 0; i < sizeof(T); ++i) value |= T(bytes[i]) << (8 * i);
    return value;
}

}  // namespace

void write_packet(std::ostream& out, const CodedPacket& pkt, const GaloisField& field,
                  uint32_t payload_len) {
    out.write(kMagic, 4);
    put_le<uint8_t>(out, kVersion);
    put_le<uint8_t>(out, static_cast<uint8_t>(std::countr_zero(field.order())));
    put_le<uint16_t>(out, static_cast<uint16_t>(pkt.coding_vector.size()));
    put_le<uint32_t>(out, payload_len);
    put_le<uint32_t>(out, pkt.generation_id);
    put_le<uint8_t>(out, pkt.window_id);

    // Coding vector travels bit-packed for sub-byte fields.
    std::vector<uint8_t> packed(field.packed_size(pkt.coding_vector.size()), 0);
    for (size_t j = 0; j < pkt.coding_vector.size(); ++j)
        field.set_symbol(packed, j, pkt.coding_vector[j]);
    out.write(reinterpret_cast<const char*>(packed.data()), std::streamsize(packed.size()));
    out.write(reinterpret_cast<const char*>(pkt.payload.data()), std::streamsize(pkt.payload.size()));
    if (!out) throw std::runtime_error("failed writing packet");
}

std::optional<std::pair<PacketHeader, CodedPacket>> read_packet(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() == 0 && in.eof()) return std::nullopt;
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad packet magic; not an RLNC packet stream");
    const auto version = get_le<uint8_t>(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported packet version " + std::to_string(version));

    PacketHeader hdr;
    hdr.field_order_log2 = get_le<uint8_t>(in);
    if (hdr.field_order_log2 != 1 && hdr.field_order_log2 != 2 && hdr.field_order_log2 != 4 &&
        hdr.field_order_log2 != 8)
        throw std::runtime_error("unsupported field order in packet header");
    hdr.gen_size_k = get_le<uint16_t>(in);
    hdr.payload_len = get_le<uint32_t>(in);
    hdr.generation_id = get_le<uint32_t>(in);
    hdr.window_id = get_le<uint8_t>(in);
    if (hdr.gen_size_k == 0 || hdr.gen_size_k > kMaxGenerationSize || hdr.payload_len == 0)
        throw std::runtime_error("invalid packet header dimensions");

    const auto& field = GaloisField::get(hdr.field_order());
    std::vector<uint8_t> packed(field.packed_size(hdr.gen_size_k));
    in.read(reinterpret_cast<char*>(packed.data()), std::streamsize(packed.size()));
    if (!in) throw std::runtime_error("truncated coding vector");

    CodedPacket pkt;
    pkt.generation_id = hdr.generation_id;
    pkt.window_id = hdr.window_id;
    pkt.coding_vector.resize(hdr.gen_size_k);
    for (uint16_t j = 0; j < hdr.gen_size_k; ++j) pkt.coding_vector[j] = field.get_symbol(packed, j);
    pkt.payload.resize(field.packed_size(hdr.payload_len));
    in.read(reinterpret_cast<char*>(pkt.payload.data()), std::streamsize(pkt.payload.size()));
    if (!in) throw std::runtime_error("truncated payload");
    return std::make_pair(hdr, std::move(pkt));
}

void encode_stream(std::ostream& out, std::span<const uint8_t> data, uint16_t gen_size_k,
                   uint32_t payload_len, const EncoderConfig& cfg, uint64_t extra_packets) {
    const auto& field = GaloisField::get(cfg.field.order);
    put_le<uint64_t>(out, data.size());
    for (auto& block : make_generations(data, gen_size_k, payload_len, field)) {
        Encoder enc(std::move(block), cfg);
        const uint64_t count = uint64_t(gen_size_k) + extra_packets;
        for (uint64_t i = 0; i < count; ++i) write_packet(out, enc.next(), field, payload_len);
    }
}

DecodeResult decode_stream(std::istream& in) {
    const uint64_t original_bytes = get_le<uint64_t>(in);

    std::map<uint32_t, Decoder> decoders;
    std::optional<PacketHeader> shape;
    while (auto next = read_packet(in)) {
        const auto& [hdr, pkt] = *next;
        if (!shape) {
            shape = hdr;
        } else if (hdr.field_order_log2 != shape->field_order_log2 ||
                   hdr.gen_size_k != shape->gen_size_k || hdr.payload_len != shape->payload_len) {
            throw std::runtime_error("inconsistent packet headers within container");
        }
        auto it = decoders.find(hdr.generation_id);
        if (it == decoders.end()) {
            it = decoders
                     .emplace(hdr.generation_id,
                              Decoder(GaloisField::get(hdr.field_order()), hdr.generation_id,
                                      hdr.gen_size_k, hdr.payload_len))
                     .first;
        }
        if (!it->second.complete()) it->second.absorb(pkt);
    }

    DecodeResult result;
    if (original_bytes == 0) {
        result.complete = true;
        return result;
    }
    if (!shape) throw std::runtime_error("container holds no packets");

    const auto& field = GaloisField::get(shape->field_order());
    const uint64_t spb = field.symbols_per_byte();
    const uint64_t symbols_per_gen = uint64_t(shape->gen_size_k) * shape->payload_len;
    const uint64_t expected_gens =
        (original_bytes * spb + symbols_per_gen - 1) / symbols_per_gen;

    std::vector<SourceBlock> blocks;
    for (uint32_t g = 0; g < expected_gens; ++g) {
        auto it = decoders.find(g);
        if (it == decoders.end()) {
            result.deficits.push_back({g, 0, shape->gen_size_k});
            continue;
        }
        if (auto block = it->second.try_recover()) {
            blocks.push_back(std::move(*block));
        } else {
            result.deficits.push_back({g, it->second.rank(), shape->gen_size_k});
        }
    }
    if (result.deficits.empty()) {
        result.complete = true;
        result.data = reassemble(blocks, original_bytes, field);
    }
    return result;
}

}  // namespace rlnc::wire
