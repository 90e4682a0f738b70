#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlnc/analytics.hpp"

namespace rlnc::grap {

// Per-MCS transmission cost and per-user erasure rates. MCS indices are
// 1-based (m in [1, M]); a higher MCS packs more bits per resource unit
// (strictly decreasing cost) and is less robust (per-user erasure
// non-decreasing in m).
struct McsTable {
    std::vector<double> cost_per_packet;        // index m-1
    std::vector<std::vector<double>> user_eps;  // [user][m-1]

    size_t mcs_count() const { return cost_per_packet.size(); }
    size_t user_count() const { return user_eps.size(); }
    void validate() const;
};

enum class UtilityKind { total_packets, total_resource_units };

// Whether the frame budget S_hat counts resource units or raw packets.
enum class CapacityMode { resource_units, packet_count };

// The resource-allocation problem: pick per-layer MCS m and packet counts N
// minimizing the utility subject to
//   (5) m strictly increasing across layers,
//   (6) at least target_users[l] users decode the first l+1 layers with
//       probability >= pd_threshold,
//   (7) the busiest radio frame stays within frame_capacity,
//   (8) everything is delivered within deadline_frames frames.
struct GrapInstance {
    std::vector<uint16_t> layer_sizes;
    unsigned field_order = 256;
    uep::WindowScheme scheme = uep::WindowScheme::now;
    McsTable mcs;
    std::vector<uint32_t> target_users;
    double pd_threshold = 0.99;
    double frame_capacity = 1.0;
    uint32_t deadline_frames = 1;
    UtilityKind utility = UtilityKind::total_packets;
    CapacityMode capacity_mode = CapacityMode::resource_units;
    uint64_t ew_trials = 2000;  // Monte-Carlo trials per EW coverage estimate
    uint64_t mc_seed = 1;       // fixed per-solve seed, keeps solves pure

    size_t num_layers() const { return layer_sizes.size(); }
    void validate() const;
};

struct ConstraintReport {
    bool mcs_ordering = false;   // (5)
    bool coverage = false;       // (6)
    bool frame_capacity = false; // (7)
    bool deadline = false;       // (8)
    double coverage_margin = 0.0;  // min_l (U_l - target_l)
    double capacity_margin = 0.0;  // S_hat - S(N)
    double deadline_margin = 0.0;  // T_hat - T(N)

    bool ok() const { return mcs_ordering && coverage && frame_capacity && deadline; }
    std::string failing() const;
};

struct GrapSolution {
    std::vector<uint32_t> mcs;      // 1-based MCS per layer
    std::vector<uint64_t> packets;  // N per layer
    bool feasible = false;
    double objective = 0.0;
    std::vector<uint32_t> per_layer_coverage;
    std::string infeasible_reason;
};

// Even-spread schedule metrics: T(N) = ceil(total load / S_hat) frames and
// S(N) = busiest frame when packets are placed least-loaded-first onto those
// frames (layer-major order, ties to the lowest frame).
struct ScheduleMetrics {
    double max_frame_load = 0.0;  // S(N)
    uint64_t frames = 0;          // T(N)
};
ScheduleMetrics schedule_metrics(const GrapInstance& instance, std::span<const uint32_t> mcs,
                                 std::span<const uint64_t> packets);

// Number of users decoding the first `ell` layers (1-based) with probability
// >= pd_threshold. NOW uses the closed-form per-layer product; EW uses the
// Monte-Carlo prefix estimate, conservatively shifted down by its confidence
// half-width.
uint32_t coverage(const GrapInstance& instance, std::span<const uint32_t> mcs,
                  std::span<const uint64_t> packets, size_t ell);
std::vector<uint32_t> coverage_all(const GrapInstance& instance, std::span<const uint32_t> mcs,
                                   std::span<const uint64_t> packets);

ConstraintReport check_feasibility(const GrapInstance& instance, const GrapSolution& solution);

// Two-step heuristic: (1) walk layers top-down assigning each the largest
// MCS, strictly below the layer above, that keeps the target user count
// attainable within the deadline budget; (2) walk layers bottom-up binary
// searching the minimal packet count that meets the coverage target, then
// verify (7)-(8). Every feasible result passes check_feasibility.
GrapSolution heuristic_solve(const GrapInstance& instance);

// Exhaustive reference: enumerates all strictly increasing MCS vectors and
// all packet vectors up to n_max per layer. Ties broken by lexicographically
// smallest (m, N). Throws if the candidate space exceeds the guard limit.
GrapSolution brute_force_solve(const GrapInstance& instance, uint64_t n_max);

inline constexpr uint64_t kBruteForceGuard = 10'000'000;

// Synthetic per-user MCS->erasure map: a logistic curve in the MCS index
// with per-user random midpoint and slope. cost(m) = base_cost / m.
McsTable make_synthetic_mcs_table(uint32_t users, uint32_t mcs_count, uint64_t seed,
                                  double base_cost = 4.0);

}  // namespace rlnc::grap
