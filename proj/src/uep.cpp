#include "rlnc/uep.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rlnc::uep {

uint16_t LayerProfile::total_packets() const {
    unsigned total = std::accumulate(layer_sizes.begin(), layer_sizes.end(), 0u);
    return static_cast<uint16_t>(total);
}

uint16_t LayerProfile::layer_begin(size_t i) const {
    if (i >= layer_sizes.size()) throw std::out_of_range("layer index out of range");
    unsigned off = 0;
    for (size_t j = 0; j < i; ++j) off += layer_sizes[j];
    return static_cast<uint16_t>(off);
}

void LayerProfile::validate(uint16_t gen_size_k) const {
    if (layer_sizes.empty()) throw std::invalid_argument("profile needs at least one layer");
    if (layer_sizes.size() > 255) throw std::invalid_argument("at most 255 layers supported");
    unsigned total = 0;
    for (auto k : layer_sizes) {
        if (k < 1) throw std::invalid_argument("every layer must hold at least one packet");
        total += k;
    }
    if (total != gen_size_k)
        throw std::invalid_argument("layer sizes sum to " + std::to_string(total) +
                                    ", generation holds " + std::to_string(gen_size_k));
}

WindowDistribution WindowDistribution::uniform(size_t num_windows) {
    return {std::vector<double>(num_windows, 1.0 / double(num_windows))};
}

void WindowDistribution::validate(size_t num_windows) const {
    if (probs.size() != num_windows)
        throw std::invalid_argument("window distribution must have one entry per window");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("window probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("window probabilities must sum to 1");
}

size_t select_window(const WindowDistribution& dist, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (size_t i = 0; i + 1 < dist.probs.size(); ++i) {
        cum += dist.probs[i];
        if (u < cum) return i;
    }
    return dist.probs.size() - 1;
}

UepEncoder::UepEncoder(SourceBlock block, LayerProfile profile, WindowScheme scheme,
                       WindowDistribution dist, EncoderConfig cfg, uint64_t stream_tag)
    : block_(std::move(block)),
      profile_(std::move(profile)),
      scheme_(scheme),
      dist_(std::move(dist)),
      cfg_(cfg),
      field_(&GaloisField::get(cfg.field.order)),
      coeff_rng_(Rng::derive(cfg.seed, {stream::encoder, block_.generation_id, stream_tag})),
      window_rng_(Rng::derive(cfg.seed, {stream::window, block_.generation_id, stream_tag})) {
    cfg_.validate();
    block_.validate();
    profile_.validate(block_.gen_size_k);
    dist_.validate(profile_.num_layers());
    if (block_.field_order != cfg_.field.order)
        throw std::invalid_argument("block packing does not match encoder field order");
    if (cfg_.mode == EncoderMode::systematic)
        throw std::invalid_argument("UEP encoding has no systematic mode");
}

CodedPacket UepEncoder::next() {
    const size_t w = select_window(dist_, window_rng_);
    const uint16_t begin = scheme_ == WindowScheme::now ? profile_.layer_begin(w) : 0;
    const uint16_t end = scheme_ == WindowScheme::now ? profile_.layer_end(w) : profile_.prefix_end(w);

    double sparsity = -1.0;
    if (cfg_.mode == EncoderMode::sparse) {
        sparsity = cfg_.sparsity_t;
    } else if (cfg_.mode == EncoderMode::tunable_sparse) {
        const auto& s = cfg_.schedule;
        const double frac =
            s.ramp_len == 0 ? 1.0 : std::min(1.0, double(emitted_) / double(s.ramp_len));
        sparsity = s.t_start + (s.t_end - s.t_start) * frac;
    }

    CodedPacket pkt;
    pkt.generation_id = block_.generation_id;
    pkt.window_id = static_cast<uint8_t>(w + 1);
    pkt.coding_vector = rlnc::detail::sample_coding_vector(*field_, block_.gen_size_k, begin, end,
                                                           sparsity, coeff_rng_);
    pkt.payload.assign(block_.packed_payload_bytes(), 0);
    for (uint16_t j = begin; j < end; ++j)
        field_->axpy(pkt.coding_vector[j], block_.packets[j], pkt.payload);
    ++emitted_;
    return pkt;
}

UepSession::UepSession(const GaloisField& field, uint32_t generation_id, LayerProfile profile,
                       WindowScheme scheme, uint32_t payload_len)
    : field_(&field),
      generation_id_(generation_id),
      profile_(std::move(profile)),
      scheme_(scheme),
      payload_len_(payload_len) {
    profile_.validate(profile_.total_packets());
    if (scheme_ == WindowScheme::ew) {
        joint_.emplace(field, generation_id, profile_.total_packets(), payload_len);
    } else {
        per_layer_.reserve(profile_.num_layers());
        for (size_t i = 0; i < profile_.num_layers(); ++i)
            per_layer_.emplace_back(field, generation_id, profile_.layer_sizes[i], payload_len);
    }
}

AbsorbResult UepSession::absorb(const CodedPacket& pkt) {
    ++received_;
    if (scheme_ == WindowScheme::ew) {
        if (pkt.window_id >= 1) {
            if (pkt.window_id > profile_.num_layers())
                throw std::invalid_argument("EW packet carries window_id " +
                                            std::to_string(pkt.window_id) + " outside the profile");
            const uint16_t end = profile_.prefix_end(pkt.window_id - 1);
            for (uint16_t col = end; col < pkt.coding_vector.size(); ++col)
                if (pkt.coding_vector[col] != 0)
                    throw std::invalid_argument("EW packet has support outside its window");
        }
        return joint_->absorb(pkt);
    }

    if (pkt.window_id < 1 || pkt.window_id > profile_.num_layers())
        throw std::invalid_argument("NOW packet carries window_id " + std::to_string(pkt.window_id) +
                                    " outside the profile");
    const size_t w = pkt.window_id - 1;
    const uint16_t begin = profile_.layer_begin(w);
    const uint16_t end = profile_.layer_end(w);
    if (pkt.coding_vector.size() != profile_.total_packets())
        throw std::invalid_argument("coding vector length mismatch");
    for (uint16_t col = 0; col < pkt.coding_vector.size(); ++col) {
        if (pkt.coding_vector[col] != 0 && (col < begin || col >= end))
            throw std::invalid_argument("NOW packet has support outside its window");
    }

    CodedPacket narrowed;
    narrowed.generation_id = pkt.generation_id;
    narrowed.window_id = pkt.window_id;
    narrowed.coding_vector.assign(pkt.coding_vector.begin() + begin,
                                  pkt.coding_vector.begin() + end);
    narrowed.payload = pkt.payload;
    return per_layer_[w].absorb(narrowed);
}

bool UepSession::layer_decoded(size_t layer) const {
    if (layer >= profile_.num_layers()) throw std::out_of_range("layer index out of range");
    if (scheme_ == WindowScheme::now) return per_layer_[layer].complete();
    for (uint16_t j = profile_.layer_begin(layer); j < profile_.layer_end(layer); ++j)
        if (!joint_->packet_recovered(j)) return false;
    return true;
}

size_t UepSession::recovered_layers() const {
    size_t l = 0;
    while (l < profile_.num_layers() && layer_decoded(l)) ++l;
    return l;
}

bool UepSession::complete() const { return recovered_layers() == profile_.num_layers(); }

std::optional<SourceBlock> UepSession::try_recover() const {
    if (!complete()) return std::nullopt;
    if (scheme_ == WindowScheme::ew) return joint_->try_recover();

    SourceBlock block;
    block.generation_id = generation_id_;
    block.gen_size_k = profile_.total_packets();
    block.payload_len = payload_len_;
    block.field_order = field_->order();
    for (const auto& dec : per_layer_) {
        auto part = dec.try_recover();
        for (auto& row : part->packets) block.packets.push_back(std::move(row));
    }
    return block;
}

}  // namespace rlnc::uep
