#include "rlnc/codec.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rlnc {

void SourceBlock::validate() const {
    if (gen_size_k < 1) throw std::invalid_argument("generation size must be >= 1");
    if (gen_size_k > kMaxGenerationSize)
        throw std::invalid_argument("generation size exceeds cap of " +
                                    std::to_string(kMaxGenerationSize));
    if (payload_len < 1) throw std::invalid_argument("payload_len must be >= 1");
    if (packets.size() != gen_size_k)
        throw std::invalid_argument("block must hold exactly gen_size_k packets");
    const size_t expect = packed_payload_bytes();
    for (const auto& row : packets)
        if (row.size() != expect) throw std::invalid_argument("packet rows must have equal length");
}

size_t SourceBlock::packed_payload_bytes() const {
    return GaloisField::get(field_order).packed_size(payload_len);
}

void EncoderConfig::validate() const {
    if (sparsity_t < 0.0 || sparsity_t >= 1.0)
        throw std::invalid_argument("sparsity_t must lie in [0, 1)");
    if (mode == EncoderMode::tunable_sparse) {
        if (schedule.t_start < schedule.t_end)
            throw std::invalid_argument("tunable sparsity must not decrease density: t_start >= t_end");
        if (schedule.t_end < 0.0 || schedule.t_start >= 1.0)
            throw std::invalid_argument("tunable sparsity bounds must lie in [0, 1)");
    }
}

std::vector<SourceBlock> make_generations(std::span<const uint8_t> stream, uint16_t gen_size_k,
                                          uint32_t payload_len, const GaloisField& field) {
    if (gen_size_k < 1 || payload_len < 1)
        throw std::invalid_argument("gen_size_k and payload_len must be >= 1");
    if (gen_size_k > kMaxGenerationSize)
        throw std::invalid_argument("generation size exceeds cap of " +
                                    std::to_string(kMaxGenerationSize));
    std::vector<SourceBlock> blocks;
    if (stream.empty()) return blocks;

    const unsigned spb = field.symbols_per_byte();
    const uint64_t total_symbols = uint64_t(stream.size()) * spb;
    const uint64_t symbols_per_gen = uint64_t(gen_size_k) * payload_len;
    const uint64_t gen_count = (total_symbols + symbols_per_gen - 1) / symbols_per_gen;
    const size_t row_bytes = field.packed_size(payload_len);

    uint64_t sym = 0;  // cursor into the stream's symbol sequence
    for (uint64_t g = 0; g < gen_count; ++g) {
        SourceBlock block;
        block.generation_id = static_cast<uint32_t>(g);
        block.gen_size_k = gen_size_k;
        block.payload_len = payload_len;
        block.field_order = field.order();
        block.packets.assign(gen_size_k, std::vector<uint8_t>(row_bytes, 0));
        for (uint16_t p = 0; p < gen_size_k; ++p) {
            auto& row = block.packets[p];
            for (uint32_t i = 0; i < payload_len && sym < total_symbols; ++i, ++sym) {
                field.set_symbol(row, i, field.get_symbol(stream, sym));
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

std::vector<uint8_t> reassemble(const std::vector<SourceBlock>& blocks, uint64_t original_bytes,
                                const GaloisField& field) {
    std::vector<uint8_t> out(original_bytes, 0);
    const unsigned spb = field.symbols_per_byte();
    const uint64_t total_symbols = original_bytes * spb;
    uint64_t sym = 0;
    for (const auto& block : blocks) {
        for (const auto& row : block.packets) {
            for (uint32_t i = 0; i < block.payload_len && sym < total_symbols; ++i, ++sym) {
                field.set_symbol(out, sym, field.get_symbol(row, i));
            }
        }
    }
    return out;
}

namespace detail {

std::vector<uint8_t> sample_coding_vector(const GaloisField& field, uint16_t gen_size_k,
                                          uint16_t begin, uint16_t end, double sparsity_t,
                                          Rng& rng) {
    const unsigned q = field.order();
    std::vector<uint8_t> vec(gen_size_k, 0);
    for (;;) {
        bool all_zero = true;
        for (uint16_t j = begin; j < end; ++j) {
            uint8_t v;
            if (sparsity_t < 0.0) {
                v = static_cast<uint8_t>(rng.below(q));
            } else {
                v = rng.uniform01() < sparsity_t
                        ? 0
                        : static_cast<uint8_t>(1 + rng.below(q - 1));
            }
            vec[j] = v;
            all_zero = all_zero && v == 0;
        }
        if (!all_zero) return vec;
        // zero vector would waste a transmission slot; draw again
    }
}

}  // namespace detail

Encoder::Encoder(SourceBlock block, EncoderConfig cfg, uint64_t stream_tag)
    : block_(std::move(block)),
      cfg_(cfg),
      field_(&GaloisField::get(cfg.field.order)),
      rng_(Rng::derive(cfg.seed, {stream::encoder, block_.generation_id, stream_tag})) {
    cfg_.validate();
    block_.validate();
    if (block_.field_order != cfg_.field.order)
        throw std::invalid_argument("block packing does not match encoder field order");
}

double Encoder::current_sparsity() const {
    switch (cfg_.mode) {
        case EncoderMode::sparse:
            return cfg_.sparsity_t;
        case EncoderMode::tunable_sparse: {
            const auto& s = cfg_.schedule;
            if (s.ramp_len == 0) return s.t_end;
            const double frac = std::min(1.0, double(emitted_) / double(s.ramp_len));
            return s.t_start + (s.t_end - s.t_start) * frac;
        }
        default:
            return -1.0;  // uniform sampling
    }
}

CodedPacket Encoder::next() {
    const uint16_t k = block_.gen_size_k;
    CodedPacket pkt;
    pkt.generation_id = block_.generation_id;
    pkt.window_id = 0;

    const uint64_t index = emitted_;  // 0-based position of this packet
    if (cfg_.mode == EncoderMode::systematic && index < k) {
        pkt.coding_vector.assign(k, 0);
        pkt.coding_vector[index] = 1;
        pkt.payload = block_.packets[index];
    } else {
        pkt.coding_vector =
            detail::sample_coding_vector(*field_, k, 0, k, current_sparsity(), rng_);
        pkt.payload.assign(block_.packed_payload_bytes(), 0);
        for (uint16_t j = 0; j < k; ++j)
            field_->axpy(pkt.coding_vector[j], block_.packets[j], pkt.payload);
    }
    ++emitted_;
    return pkt;
}

Decoder::Decoder(const GaloisField& field, uint32_t generation_id, uint16_t gen_size_k,
                 uint32_t payload_len)
    : field_(&field),
      generation_id_(generation_id),
      gen_size_k_(gen_size_k),
      payload_len_(payload_len),
      payload_bytes_(field.packed_size(payload_len)),
      pivot_row_(gen_size_k, -1) {
    if (gen_size_k < 1) throw std::invalid_argument("generation size must be >= 1");
    if (gen_size_k > kMaxGenerationSize)
        throw std::invalid_argument("generation size exceeds cap of " +
                                    std::to_string(kMaxGenerationSize));
}

AbsorbResult Decoder::absorb(const CodedPacket& pkt) {
    if (pkt.generation_id != generation_id_)
        throw std::invalid_argument("packet belongs to generation " +
                                    std::to_string(pkt.generation_id) + ", decoder expects " +
                                    std::to_string(generation_id_));
    if (pkt.coding_vector.size() != gen_size_k_)
        throw std::invalid_argument("coding vector length mismatch");
    if (pkt.payload.size() != payload_bytes_)
        throw std::invalid_argument("payload length mismatch");

    ++received_;
    std::vector<uint8_t> vec = pkt.coding_vector;
    std::vector<uint8_t> payload = pkt.payload;

    // Reduce against stored pivot rows.
    for (uint16_t col = 0; col < gen_size_k_; ++col) {
        const uint8_t c = vec[col];
        if (c == 0 || pivot_row_[col] < 0) continue;
        const Row& row = rows_[pivot_row_[col]];
        field_->axpy(c, row.vec, vec);
        field_->axpy(c, row.payload, payload);
    }

    const auto first_nonzero = std::find_if(vec.begin(), vec.end(), [](uint8_t v) { return v != 0; });
    if (first_nonzero == vec.end()) return {false, rank_};  // dependent row, discarded

    const uint16_t pivot = static_cast<uint16_t>(first_nonzero - vec.begin());
    const uint8_t scale = field_->inv(vec[pivot]);
    field_->scale(scale, vec);
    field_->scale(scale, payload);

    // Back-substitute the new pivot into every stored row.
    for (auto& row : rows_) {
        const uint8_t c = row.vec[pivot];
        if (c == 0) continue;
        field_->axpy(c, vec, row.vec);
        field_->axpy(c, payload, row.payload);
    }

    pivot_row_[pivot] = static_cast<int32_t>(rows_.size());
    rows_.push_back({std::move(vec), std::move(payload)});
    ++rank_;
    return {true, rank_};
}

std::optional<SourceBlock> Decoder::try_recover() const {
    if (rank_ != gen_size_k_) return std::nullopt;
    SourceBlock block;
    block.generation_id = generation_id_;
    block.gen_size_k = gen_size_k_;
    block.payload_len = payload_len_;
    block.field_order = field_->order();
    block.packets.reserve(gen_size_k_);
    for (uint16_t j = 0; j < gen_size_k_; ++j) block.packets.push_back(rows_[pivot_row_[j]].payload);
    return block;
}

bool Decoder::packet_recovered(uint16_t j) const {
    if (j >= gen_size_k_) throw std::invalid_argument("packet index out of range");
    if (pivot_row_[j] < 0) return false;
    const auto& vec = rows_[pivot_row_[j]].vec;
    for (uint16_t col = 0; col < gen_size_k_; ++col) {
        if (vec[col] != (col == j ? 1 : 0)) return false;
    }
    return true;
}

std::span<const uint8_t> Decoder::recovered_packet(uint16_t j) const {
    if (!packet_recovered(j)) throw std::logic_error("source packet not yet recovered");
    return rows_[pivot_row_[j]].payload;
}

}  // namespace rlnc
