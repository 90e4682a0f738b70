#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rlnc/uep.hpp"

namespace rlnc::dupsim {

// One transmission leg: an independent erasure channel with a per-slot
// packet budget. RLC/MAC detail below PDCP is abstracted into the budget.
struct LegConfig {
    double erasure_eps = 0.0;
    uint32_t packets_per_slot = 1;

    void validate() const;
};

enum class DupPolicyKind { mirror, split_round_robin, weighted };

// mirror replicates the same coded packets on both legs (the classic PDCP
// duplication baseline), split sends distinct fresh packets on each leg,
// weighted throttles per-leg fresh-packet counts toward the given share of
// the combined budget via a deterministic credit scheme.
struct DupPolicy {
    DupPolicyKind kind = DupPolicyKind::split_round_robin;
    double weight_leg1 = 0.5;
    double weight_leg2 = 0.5;

    void validate() const;
    static DupPolicy mirror() { return {DupPolicyKind::mirror}; }
    static DupPolicy split() { return {DupPolicyKind::split_round_robin}; }
    static DupPolicy weighted(double w1, double w2);
};

struct DupRunReport {
    bool decoded = false;
    std::optional<uint64_t> slots_to_decode;
    std::array<uint64_t, 2> packets_sent{0, 0};
    std::array<uint64_t, 2> packets_received{0, 0};
    double overhead_ratio = 0.0;  // total sent / K
    bool max_slots_hit = false;
    size_t layers_recovered = 0;  // UEP runs only; equals 1 otherwise when decoded
};

// Optional layered coding on top of the duplication legs.
struct UepSetup {
    uep::LayerProfile profile;
    uep::WindowScheme scheme = uep::WindowScheme::ew;
    uep::WindowDistribution dist;
};

// Delivers one source block over two parallel erasure legs into a single
// joint decoder. Both legs encode the same generation from independent
// coefficient streams, so policies differ only in packet allocation.
// max_slots = 0 selects the default bound of 100 * K.
DupRunReport run_duplication(const SourceBlock& block, const EncoderConfig& cfg,
                             const std::array<LegConfig, 2>& legs, const DupPolicy& policy,
                             uint64_t max_slots, uint64_t seed,
                             const std::optional<UepSetup>& uep_setup = std::nullopt);

struct PolicySummary {
    DupPolicy policy;
    uint64_t runs = 0;
    double decode_rate = 0.0;
    double mean_slots = 0.0;  // over decoded runs
    double ci95_slots = 0.0;
    double mean_overhead = 0.0;
    double ci95_overhead = 0.0;
};

struct BlockParams {
    uint16_t gen_size_k = 16;
    uint32_t payload_len = 32;
    unsigned field_order = 256;
};

// Runs every policy over the same seed set; each seed draws a fresh random
// block shared by all policies. Deterministic given the seeds.
std::vector<PolicySummary> compare_policies(const BlockParams& params,
                                            const std::array<LegConfig, 2>& legs,
                                            const std::vector<DupPolicy>& policies,
                                            std::span<const uint64_t> seeds, uint64_t max_slots = 0,
                                            const std::optional<UepSetup>& uep_setup = std::nullopt);

// Deterministic random block helper shared by the simulators and the CLI.
SourceBlock random_block(const BlockParams& params, uint64_t seed);

}  // namespace rlnc::dupsim
