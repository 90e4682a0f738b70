#include "rlnc/grap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace rlnc::grap {

namespace {
constexpr double kLoadTolerance = 1e-9;
}

void McsTable::validate() const {
    if (cost_per_packet.empty()) throw std::invalid_argument("MCS table needs at least one entry");
    for (size_t m = 0; m < cost_per_packet.size(); ++m) {
        if (cost_per_packet[m] <= 0.0) throw std::invalid_argument("packet costs must be positive");
        if (m > 0 && cost_per_packet[m] >= cost_per_packet[m - 1])
            throw std::invalid_argument("packet cost must be strictly decreasing in the MCS index");
    }
    for (const auto& row : user_eps) {
        if (row.size() != cost_per_packet.size())
            throw std::invalid_argument("every user needs one erasure rate per MCS");
        for (size_t m = 0; m < row.size(); ++m) {
            if (row[m] < 0.0 || row[m] > 1.0)
                throw std::invalid_argument("erasure rates must lie in [0, 1]");
            if (m > 0 && row[m] < row[m - 1])
                throw std::invalid_argument("erasure rates must be non-decreasing in the MCS index");
        }
    }
}

void GrapInstance::validate() const {
    if (layer_sizes.empty()) throw std::invalid_argument("instance needs at least one layer");
    for (auto k : layer_sizes)
        if (k < 1) throw std::invalid_argument("layer sizes must be >= 1");
    mcs.validate();
    if (num_layers() > mcs.mcs_count())
        throw std::invalid_argument(
            "constraint (5) requires strictly increasing MCS per layer, so layers must not "
            "outnumber MCSs");
    if (target_users.size() != num_layers())
        throw std::invalid_argument("one target user count per layer required");
    for (size_t l = 1; l < target_users.size(); ++l)
        if (target_users[l] > target_users[l - 1])
            throw std::invalid_argument("target user counts must be non-increasing across layers");
    if (!(pd_threshold > 0.0 && pd_threshold < 1.0))
        throw std::invalid_argument("pd_threshold must lie in (0, 1)");
    if (frame_capacity < 1.0) throw std::invalid_argument("frame_capacity must be >= 1");
    if (deadline_frames < 1) throw std::invalid_argument("deadline_frames must be >= 1");
    if (ew_trials < 1) throw std::invalid_argument("ew_trials must be >= 1");
    GaloisField::get(field_order);  // rejects unsupported orders
}

std::string ConstraintReport::failing() const {
    std::string out;
    auto append = [&out](const char* what) {
        if (!out.empty()) out += ", ";
        out += what;
    };
    if (!mcs_ordering) append("(5) mcs ordering");
    if (!coverage) append("(6) coverage");
    if (!frame_capacity) append("(7) frame capacity");
    if (!deadline) append("(8) deadline");
    return out;
}

namespace {

double schedule_cost(const GrapInstance& instance, uint32_t m) {
    return instance.capacity_mode == CapacityMode::resource_units
               ? instance.mcs.cost_per_packet[m - 1]
               : 1.0;
}

void check_solution_dims(const GrapInstance& instance, std::span<const uint32_t> mcs,
                         std::span<const uint64_t> packets) {
    if (mcs.size() != instance.num_layers() || packets.size() != instance.num_layers())
        throw std::invalid_argument("solution dimensions do not match the instance");
    for (auto m : mcs)
        if (m < 1 || m > instance.mcs.mcs_count())
            throw std::invalid_argument("MCS index out of table range");
}

// Window size relevant to layer l (0-based): the layer itself for NOW, the
// expanding prefix for EW.
uint16_t window_packets(const GrapInstance& instance, size_t l) {
    if (instance.scheme == uep::WindowScheme::now) return instance.layer_sizes[l];
    unsigned total = 0;
    for (size_t i = 0; i <= l; ++i) total += instance.layer_sizes[i];
    return static_cast<uint16_t>(total);
}

// Per-user P(l* >= l) estimates for an EW solution, conservative lower edge.
std::vector<double> ew_user_prefix_lower(const GrapInstance& instance,
                                         std::span<const uint32_t> mcs,
                                         std::span<const uint64_t> packets, size_t user) {
    std::vector<double> eps(instance.num_layers());
    for (size_t l = 0; l < instance.num_layers(); ++l)
        eps[l] = instance.mcs.user_eps[user][mcs[l] - 1];
    uep::LayerProfile profile{instance.layer_sizes};
    const auto probs = analytics::layered_decode_prob_ew_mc(
        packets, profile, instance.field_order, eps, instance.ew_trials,
        Rng::derive(instance.mc_seed, {user}));
    std::vector<double> lower(instance.num_layers());
    for (size_t l = 0; l < instance.num_layers(); ++l)
        lower[l] = probs.prob[l] - probs.ci95[l];
    return lower;
}

}  // namespace

std::vector<uint32_t> coverage_all(const GrapInstance& instance, std::span<const uint32_t> mcs,
                                   std::span<const uint64_t> packets) {
    instance.validate();
    check_solution_dims(instance, mcs, packets);
    const size_t layers = instance.num_layers();
    const size_t users = instance.mcs.user_count();
    std::vector<uint32_t> counts(layers, 0);

    for (size_t u = 0; u < users; ++u) {
        if (instance.scheme == uep::WindowScheme::now) {
            double prod = 1.0;
            for (size_t l = 0; l < layers; ++l) {
                prod *= analytics::decode_prob_after_sent(packets[l], instance.layer_sizes[l],
                                                          instance.field_order,
                                                          instance.mcs.user_eps[u][mcs[l] - 1]);
                if (prod >= instance.pd_threshold) ++counts[l];
            }
        } else {
            const auto lower = ew_user_prefix_lower(instance, mcs, packets, u);
            for (size_t l = 0; l < layers; ++l)
                if (lower[l] >= instance.pd_threshold) ++counts[l];
        }
    }
    return counts;
}

uint32_t coverage(const GrapInstance& instance, std::span<const uint32_t> mcs,
                  std::span<const uint64_t> packets, size_t ell) {
    if (ell < 1 || ell > instance.num_layers())
        throw std::invalid_argument("layer prefix length out of range");
    return coverage_all(instance, mcs, packets)[ell - 1];
}

ScheduleMetrics schedule_metrics(const GrapInstance& instance, std::span<const uint32_t> mcs,
                                 std::span<const uint64_t> packets) {
    check_solution_dims(instance, mcs, packets);
    double total = 0.0;
    for (size_t l = 0; l < packets.size(); ++l)
        total += double(packets[l]) * schedule_cost(instance, mcs[l]);
    ScheduleMetrics metrics;
    if (total <= 0.0) return metrics;
    metrics.frames =
        static_cast<uint64_t>(std::ceil(total / instance.frame_capacity - kLoadTolerance));

    // Least-loaded-first placement over exactly T(N) frames.
    using Frame = std::pair<double, uint64_t>;  // load, frame index
    std::priority_queue<Frame, std::vector<Frame>, std::greater<>> frames;
    for (uint64_t f = 0; f < metrics.frames; ++f) frames.push({0.0, f});
    for (size_t l = 0; l < packets.size(); ++l) {
        const double cost = schedule_cost(instance, mcs[l]);
        for (uint64_t p = 0; p < packets[l]; ++p) {
            auto [load, index] = frames.top();
            frames.pop();
            load += cost;
            metrics.max_frame_load = std::max(metrics.max_frame_load, load);
            frames.push({load, index});
        }
    }
    return metrics;
}

ConstraintReport check_feasibility(const GrapInstance& instance, const GrapSolution& solution) {
    instance.validate();
    check_solution_dims(instance, solution.mcs, solution.packets);

    ConstraintReport report;
    report.mcs_ordering = true;
    for (size_t l = 1; l < solution.mcs.size(); ++l)
        if (solution.mcs[l - 1] >= solution.mcs[l]) report.mcs_ordering = false;

    const auto counts = coverage_all(instance, solution.mcs, solution.packets);
    report.coverage = true;
    report.coverage_margin = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l < counts.size(); ++l) {
        const double margin = double(counts[l]) - double(instance.target_users[l]);
        report.coverage_margin = std::min(report.coverage_margin, margin);
        if (counts[l] < instance.target_users[l]) report.coverage = false;
    }

    const auto metrics = schedule_metrics(instance, solution.mcs, solution.packets);
    report.frame_capacity = metrics.max_frame_load <= instance.frame_capacity + kLoadTolerance;
    report.capacity_margin = instance.frame_capacity - metrics.max_frame_load;
    report.deadline = metrics.frames <= instance.deadline_frames;
    report.deadline_margin = double(instance.deadline_frames) - double(metrics.frames);
    return report;
}

namespace {

double objective_value(const GrapInstance& instance, std::span<const uint32_t> mcs,
                       std::span<const uint64_t> packets) {
    double total = 0.0;
    for (size_t l = 0; l < packets.size(); ++l) {
        total += instance.utility == UtilityKind::total_packets
                     ? double(packets[l])
                     : double(packets[l]) * instance.mcs.cost_per_packet[mcs[l] - 1];
    }
    return total;
}

GrapSolution infeasible(std::string reason) {
    GrapSolution solution;
    solution.feasible = false;
    solution.objective = std::numeric_limits<double>::infinity();
    solution.infeasible_reason = std::move(reason);
    return solution;
}

// Largest packet count for one layer that could ever fit the deadline
// budget on its own; the attainability ceiling used by both heuristic steps.
uint64_t budget_packet_cap(const GrapInstance& instance, uint32_t m) {
    const double budget = instance.frame_capacity * double(instance.deadline_frames);
    return static_cast<uint64_t>(std::floor(budget / schedule_cost(instance, m) + kLoadTolerance));
}

// Step-1 attainability: users whose erasure rate at MCS m still allows
// hitting pd_threshold for the layer's window within the deadline budget.
// EW uses the window-local closed form as a proxy for the union probability
// (a lower bound: packets from higher windows only help).
uint32_t attainable_users(const GrapInstance& instance, size_t layer, uint32_t m) {
    const uint64_t cap = budget_packet_cap(instance, m);
    const uint16_t k = window_packets(instance, layer);
    uint32_t count = 0;
    for (size_t u = 0; u < instance.mcs.user_count(); ++u) {
        const double pd = analytics::decode_prob_after_sent(cap, k, instance.field_order,
                                                            instance.mcs.user_eps[u][m - 1]);
        if (pd >= instance.pd_threshold) ++count;
    }
    return count;
}

}  // namespace

GrapSolution heuristic_solve(const GrapInstance& instance) {
    instance.validate();
    const size_t layers = instance.num_layers();
    const uint32_t mcs_count = static_cast<uint32_t>(instance.mcs.mcs_count());

    // Step 1: MCS allocation, highest layer first.
    std::vector<uint32_t> mcs(layers, 0);
    uint32_t upper = mcs_count + 1;
    for (size_t l = layers; l-- > 0;) {
        // Layer l (0-based) needs l MCSs below it for the layers beneath.
        const uint32_t low = static_cast<uint32_t>(l) + 1;
        if (upper <= low)
            return infeasible("constraint (5): no strictly increasing MCS assignment fits");
        bool found = false;
        for (uint32_t m = upper - 1; m >= low; --m) {
            if (attainable_users(instance, l, m) >= instance.target_users[l]) {
                mcs[l] = m;
                found = true;
                break;
            }
            if (m == low) break;
        }
        if (!found)
            return infeasible("constraint (6): layer " + std::to_string(l + 1) +
                              " cannot reach its target user count at any admissible MCS");
        upper = mcs[l];
    }

    // Step 2: minimal packet counts, lowest layer first.
    std::vector<uint64_t> packets(layers, 0);
    std::vector<double> now_prefix(instance.mcs.user_count(), 1.0);
    for (size_t l = 0; l < layers; ++l) {
        const uint64_t cap = budget_packet_cap(instance, mcs[l]);
        if (instance.target_users[l] == 0) {
            packets[l] = 0;
            if (instance.scheme == uep::WindowScheme::now)
                for (auto& p : now_prefix) p = 0.0;
            continue;
        }

        auto covered_users = [&](uint64_t n) -> uint32_t {
            uint32_t count = 0;
            if (instance.scheme == uep::WindowScheme::now) {
                for (size_t u = 0; u < instance.mcs.user_count(); ++u) {
                    const double pd = analytics::decode_prob_after_sent(
                        n, instance.layer_sizes[l], instance.field_order,
                        instance.mcs.user_eps[u][mcs[l] - 1]);
                    if (now_prefix[u] * pd >= instance.pd_threshold) ++count;
                }
            } else {
                std::vector<uint64_t> trial(packets.begin(), packets.end());
                trial[l] = n;
                for (size_t u = 0; u < instance.mcs.user_count(); ++u) {
                    const auto lower = ew_user_prefix_lower(instance, mcs, trial, u);
                    if (lower[l] >= instance.pd_threshold) ++count;
                }
            }
            return count;
        };

        if (covered_users(cap) < instance.target_users[l])
            return infeasible("constraint (6): layer " + std::to_string(l + 1) +
                              " misses its target user count even at the deadline budget");
        uint64_t lo = 0, hi = cap;  // smallest n with the target met
        while (lo < hi) {
            const uint64_t mid = lo + (hi - lo) / 2;
            if (covered_users(mid) >= instance.target_users[l])
                hi = mid;
            else
                lo = mid + 1;
        }
        packets[l] = lo;

        if (instance.scheme == uep::WindowScheme::now) {
            for (size_t u = 0; u < instance.mcs.user_count(); ++u)
                now_prefix[u] *= analytics::decode_prob_after_sent(
                    packets[l], instance.layer_sizes[l], instance.field_order,
                    instance.mcs.user_eps[u][mcs[l] - 1]);
        }
    }

    GrapSolution solution;
    solution.mcs = std::move(mcs);
    solution.packets = std::move(packets);
    solution.feasible = true;
    solution.objective = objective_value(instance, solution.mcs, solution.packets);
    solution.per_layer_coverage = coverage_all(instance, solution.mcs, solution.packets);

    const auto report = check_feasibility(instance, solution);
    if (!report.ok()) {
        solution.feasible = false;
        solution.objective = std::numeric_limits<double>::infinity();
        solution.infeasible_reason = report.failing();
    }
    return solution;
}

GrapSolution brute_force_solve(const GrapInstance& instance, uint64_t n_max) {
    instance.validate();
    const size_t layers = instance.num_layers();
    const uint64_t mcs_count = instance.mcs.mcs_count();

    // Candidate space guard: C(M, layers) increasing MCS vectors times
    // (n_max+1)^layers packet vectors.
    double combos = 1.0;
    for (uint64_t i = 0; i < layers; ++i)
        combos = combos * double(mcs_count - i) / double(i + 1);
    const double space = combos * std::pow(double(n_max) + 1.0, double(layers));
    if (space > double(kBruteForceGuard))
        throw std::invalid_argument("brute-force space of " + std::to_string(uint64_t(space)) +
                                    " candidates exceeds the guard of " +
                                    std::to_string(kBruteForceGuard));

    GrapSolution best = infeasible("empty feasible set");

    std::vector<uint32_t> mcs(layers);
    for (size_t l = 0; l < layers; ++l) mcs[l] = static_cast<uint32_t>(l + 1);
    auto advance_mcs = [&]() -> bool {
        // next strictly increasing vector over [1, mcs_count], lexicographic
        size_t i = layers;
        while (i-- > 0) {
            if (mcs[i] < mcs_count - (layers - 1 - i)) {
                ++mcs[i];
                for (size_t j = i + 1; j < layers; ++j) mcs[j] = mcs[j - 1] + 1;
                return true;
            }
        }
        return false;
    };

    // Closed-form NOW coverage dominates the enumeration cost; memoize
    // P_d(N; k_l, eps[u][m]) for every (user, layer, mcs, N) up front.
    std::vector<double> pd_cache;
    const size_t users = instance.mcs.user_count();
    const uint64_t n_stride = n_max + 1;
    if (instance.scheme == uep::WindowScheme::now && users > 0) {
        pd_cache.resize(users * layers * mcs_count * n_stride);
        for (size_t u = 0; u < users; ++u)
            for (size_t l = 0; l < layers; ++l)
                for (uint64_t m = 1; m <= mcs_count; ++m)
                    for (uint64_t n = 0; n <= n_max; ++n)
                        pd_cache[((u * layers + l) * mcs_count + m - 1) * n_stride + n] =
                            analytics::decode_prob_after_sent(n, instance.layer_sizes[l],
                                                              instance.field_order,
                                                              instance.mcs.user_eps[u][m - 1]);
    }
    auto cached_coverage_ok = [&](std::span<const uint32_t> m, std::span<const uint64_t> n) {
        std::vector<uint32_t> counts(layers, 0);
        for (size_t u = 0; u < users; ++u) {
            double prod = 1.0;
            for (size_t l = 0; l < layers; ++l) {
                prod *= pd_cache[((u * layers + l) * mcs_count + m[l] - 1) * n_stride + n[l]];
                if (prod >= instance.pd_threshold) ++counts[l];
            }
        }
        for (size_t l = 0; l < layers; ++l)
            if (counts[l] < instance.target_users[l]) return false;
        return true;
    };

    GrapSolution candidate;
    candidate.feasible = true;
    do {
        candidate.mcs = mcs;
        candidate.packets.assign(layers, 0);
        for (;;) {
            bool feasible;
            if (instance.scheme == uep::WindowScheme::now) {
                const auto metrics = schedule_metrics(instance, mcs, candidate.packets);
                feasible = cached_coverage_ok(mcs, candidate.packets) &&
                           metrics.max_frame_load <= instance.frame_capacity + kLoadTolerance &&
                           metrics.frames <= instance.deadline_frames;
            } else {
                feasible = check_feasibility(instance, candidate).ok();
            }
            if (feasible) {
                const double objective = objective_value(instance, mcs, candidate.packets);
                if (!best.feasible || objective < best.objective) {
                    best = candidate;
                    best.objective = objective;
                    best.infeasible_reason.clear();
                }
            }
            // lexicographic odometer over packet vectors
            bool advanced = false;
            for (size_t pos = layers; pos-- > 0;) {
                if (candidate.packets[pos] < n_max) {
                    ++candidate.packets[pos];
                    std::fill(candidate.packets.begin() + pos + 1, candidate.packets.end(), 0);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
    } while (advance_mcs());

    if (best.feasible)
        best.per_layer_coverage = coverage_all(instance, best.mcs, best.packets);
    return best;
}

McsTable make_synthetic_mcs_table(uint32_t users, uint32_t mcs_count, uint64_t seed,
                                  double base_cost) {
    if (users < 1 || mcs_count < 1)
        throw std::invalid_argument("need at least one user and one MCS");
    McsTable table;
    table.cost_per_packet.resize(mcs_count);
    for (uint32_t m = 1; m <= mcs_count; ++m) table.cost_per_packet[m - 1] = base_cost / double(m);

    Rng rng(Rng::derive(seed, {stream::trial, users, mcs_count}));
    table.user_eps.resize(users);
    for (auto& row : table.user_eps) {
        const double mid = 1.0 + rng.uniform01() * double(mcs_count);
        const double slope = 0.5 + 1.5 * rng.uniform01();
        row.resize(mcs_count);
        for (uint32_t m = 1; m <= mcs_count; ++m)
            row[m - 1] = 1.0 / (1.0 + std::exp(-(double(m) - mid) / slope));
    }
    return table;
}

}  // namespace rlnc::grap
