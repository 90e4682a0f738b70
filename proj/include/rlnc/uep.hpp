#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rlnc/codec.hpp"

namespace rlnc::uep {

// Layered view of a generation: layer i holds layer_sizes[i] consecutive
// source packets; sizes sum to K.
struct LayerProfile {
    std::vector<uint16_t> layer_sizes;

    size_t num_layers() const { return layer_sizes.size(); }
    uint16_t total_packets() const;
    // First column of layer i (0-based) and one-past-last column.
    uint16_t layer_begin(size_t i) const;
    uint16_t layer_end(size_t i) const { return uint16_t(layer_begin(i) + layer_sizes.at(i)); }
    // EW window i covers columns [0, prefix_end(i)); NOW window i covers
    // [layer_begin(i), layer_end(i)).
    uint16_t prefix_end(size_t i) const { return layer_end(i); }

    void validate(uint16_t gen_size_k) const;
};

enum class WindowScheme { now, ew };

// Window selection distribution over the profile's windows.
struct WindowDistribution {
    std::vector<double> probs;

    static WindowDistribution uniform(size_t num_windows);
    void validate(size_t num_windows) const;
};

// Draws a window index in [0, num_windows) with the given probabilities.
size_t select_window(const WindowDistribution& dist, Rng& rng);

// Encoder that draws a window per packet and applies RLNC over the window's
// source packets only; the coding vector is zero outside the window and the
// packet's window_id records the choice (1-based on the wire, 0 means plain
// RLNC). Window draws and coefficient draws use separate derived streams, so
// with a single full-block window the coded packets are identical to the
// plain Encoder's for the same seed.
class UepEncoder {
public:
    UepEncoder(SourceBlock block, LayerProfile profile, WindowScheme scheme,
               WindowDistribution dist, EncoderConfig cfg, uint64_t stream_tag = 0);

    CodedPacket next();
    const LayerProfile& profile() const { return profile_; }

private:
    SourceBlock block_;
    LayerProfile profile_;
    WindowScheme scheme_;
    WindowDistribution dist_;
    EncoderConfig cfg_;
    const GaloisField* field_;
    Rng coeff_rng_;
    Rng window_rng_;
    uint64_t emitted_ = 0;
};

// Decoding side of a UEP session plus layer-level recovery reporting.
//
// EW runs one joint Gaussian elimination over all K columns, so packets from
// higher windows contribute to lower-window recovery. NOW keeps one
// independent sub-decoder per layer. recovered_layers() reports the longest
// prefix of layers fully recovered; per-layer flags are exposed raw as well.
class UepSession {
public:
    UepSession(const GaloisField& field, uint32_t generation_id, LayerProfile profile,
               WindowScheme scheme, uint32_t payload_len);

    AbsorbResult absorb(const CodedPacket& pkt);

    // Largest l such that layers 1..l are all recovered.
    size_t recovered_layers() const;
    bool layer_decoded(size_t layer) const;
    bool complete() const;
    uint64_t received_count() const { return received_; }
    std::optional<SourceBlock> try_recover() const;

private:
    const GaloisField* field_;
    uint32_t generation_id_;
    LayerProfile profile_;
    WindowScheme scheme_;
    uint32_t payload_len_;
    std::optional<Decoder> joint_;       // EW
    std::vector<Decoder> per_layer_;     // NOW
    uint64_t received_ = 0;
};

}  // namespace rlnc::uep
