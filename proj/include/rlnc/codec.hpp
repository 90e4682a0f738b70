#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rlnc/field.hpp"
#include "rlnc/rng.hpp"

namespace rlnc {

// Hard cap on the generation size; Gaussian elimination is O(K^3), which is
// exactly why streams get split into generations in the first place.
inline constexpr uint16_t kMaxGenerationSize = 1024;

// One generation: K equal-length source packets, each payload_len symbols.
// Rows are stored packed (see GaloisField layout notes); field_order records
// the packing so encoders can validate they were handed a compatible block.
struct SourceBlock {
    uint32_t generation_id = 0;
    uint16_t gen_size_k = 0;
    uint32_t payload_len = 0;  // symbols per packet
    unsigned field_order = 256;
    std::vector<std::vector<uint8_t>> packets;

    void validate() const;
    size_t packed_payload_bytes() const;
};

enum class EncoderMode { standard, systematic, sparse, tunable_sparse };

// Sparsity ramp for tunable-sparse coding: the zero probability moves
// linearly from t_start (first packet) to t_end over ramp_len packets and
// stays at t_end afterwards.
struct DensitySchedule {
    double t_start = 0.0;
    double t_end = 0.0;
    uint64_t ramp_len = 0;
};

struct EncoderConfig {
    FieldSpec field{256};
    EncoderMode mode = EncoderMode::standard;
    double sparsity_t = 0.0;  // sparse mode: P(coefficient = 0)
    DensitySchedule schedule;  // tunable_sparse mode
    uint64_t seed = 0;

    void validate() const;
};

// A coded packet: full-length coding vector (unpacked, one symbol per byte)
// plus the packed payload. window_id is 0 for plain RLNC; UEP windows are
// numbered from 1.
struct CodedPacket {
    uint32_t generation_id = 0;
    uint8_t window_id = 0;
    std::vector<uint8_t> coding_vector;
    std::vector<uint8_t> payload;
};

// Splits a byte stream into consecutive generations, zero-padding the last
// one. The stream is interpreted as a packed symbol sequence; callers record
// stream.size() out of band for exact reassembly. An empty stream yields an
// empty list.
std::vector<SourceBlock> make_generations(std::span<const uint8_t> stream, uint16_t gen_size_k,
                                          uint32_t payload_len, const GaloisField& field);

// Inverse of make_generations: concatenates the blocks and truncates to
// original_bytes.
std::vector<uint8_t> reassemble(const std::vector<SourceBlock>& blocks, uint64_t original_bytes,
                                const GaloisField& field);

namespace detail {
// Samples a coding vector over columns [begin, end); zeros elsewhere.
// Uniform sampling when sparsity_t < 0, otherwise the sparse law
// P(0) = t, P(v) = (1 - t) / (q - 1) for v != 0. All-zero vectors are
// rejected and resampled with fresh randomness.
std::vector<uint8_t> sample_coding_vector(const GaloisField& field, uint16_t gen_size_k,
                                          uint16_t begin, uint16_t end, double sparsity_t,
                                          Rng& rng);
}  // namespace detail

// Stateful per-generation encoder. Distinct instances derive independent
// randomness from (seed, generation_id, stream_tag); single-owner, not
// thread-safe, but instances may run on distinct threads freely.
class Encoder {
public:
    Encoder(SourceBlock block, EncoderConfig cfg, uint64_t stream_tag = 0);

    CodedPacket next();
    uint64_t packets_emitted() const { return emitted_; }
    const SourceBlock& block() const { return block_; }

private:
    double current_sparsity() const;

    SourceBlock block_;
    EncoderConfig cfg_;
    const GaloisField* field_;
    Rng rng_;
    uint64_t emitted_ = 0;
};

struct AbsorbResult {
    bool innovative = false;
    uint32_t rank = 0;
};

// Incremental Gaussian-elimination decoder. Rows are kept in reduced form:
// every pivot column has exactly one nonzero entry across stored rows, so
// each arriving packet yields an immediate innovative/non-innovative verdict
// and individual source packets become readable as soon as their pivot row
// is fully reduced.
class Decoder {
public:
    Decoder(const GaloisField& field, uint32_t generation_id, uint16_t gen_size_k,
            uint32_t payload_len);

    AbsorbResult absorb(const CodedPacket& pkt);

    uint32_t rank() const { return rank_; }
    uint64_t received_count() const { return received_; }
    bool complete() const { return rank_ == gen_size_k_; }
    uint16_t gen_size() const { return gen_size_k_; }
    uint32_t generation_id() const { return generation_id_; }

    // Full-block recovery; std::nullopt until rank reaches K.
    std::optional<SourceBlock> try_recover() const;

    // Partial recovery: true when source packet j is individually readable
    // (its pivot row reduced to the unit vector e_j).
    bool packet_recovered(uint16_t j) const;
    std::span<const uint8_t> recovered_packet(uint16_t j) const;

private:
    struct Row {
        std::vector<uint8_t> vec;      // unpacked coding vector, K symbols
        std::vector<uint8_t> payload;  // packed
    };

    const GaloisField* field_;
    uint32_t generation_id_;
    uint16_t gen_size_k_;
    uint32_t payload_len_;
    size_t payload_bytes_;
    std::vector<Row> rows_;
    std::vector<int32_t> pivot_row_;  // column -> index into rows_, or -1
    uint32_t rank_ = 0;
    uint64_t received_ = 0;
};

}  // namespace rlnc
