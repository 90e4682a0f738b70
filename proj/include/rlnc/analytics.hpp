#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlnc/uep.hpp"

namespace rlnc::analytics {

// Probability that a decoder holding n random coded packets reaches full
// rank K over GF(q):
//
//   P_d(n) = 0                                   for n < K
//   P_d(n) = prod_{j=0}^{K-1} (1 - q^(j-n))      for n >= K
//
// Coding vectors are modeled i.i.d. uniform, zero vectors included.
double decode_prob_given_received(uint64_t n, uint32_t gen_size_k, unsigned q);

// p_d(n) = P_d(n) - P_d(n-1).
double decode_prob_pdf(uint64_t n, uint32_t gen_size_k, unsigned q);

// Transmitter-side decoding probability after N coded packets cross an
// erasure channel with loss probability eps:
//
//   P_d(N) = sum_{n=K}^{N} C(N,n) eps^(N-n) (1-eps)^n P_d(n)
//
// Binomial terms are evaluated in log space.
double decode_prob_after_sent(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps);

double outage_prob(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps);

struct McEstimate {
    double mean = 0.0;
    double ci95 = 0.0;  // 95% confidence half-width, normal approximation
};

inline constexpr uint64_t kDefaultTrials = 100000;

// Stop rule for open-ended sums over the pdf: truncate once the remaining
// mass 1 - P_d(n) drops below this bound.
inline constexpr double kSeriesTailBound = 1e-12;

// Mean number of transmission slots until full rank, estimated over seeded
// independent trials; eps = 1 is rejected (the delay diverges). Coding
// vectors are drawn i.i.d. uniform to match the closed forms above.
McEstimate avg_decoding_delay_mc(uint32_t gen_size_k, unsigned q, double eps, uint64_t trials,
                                 uint64_t seed);

// Monte-Carlo decode frequency after sent_n transmissions; the simulation
// counterpart of decode_prob_after_sent.
double mc_decode_freq(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps,
                      uint64_t trials, uint64_t seed);

// NOW-layered recovery: probability of decoding the first l layers is the
// product of the per-layer probabilities. Entry l-1 of the result covers
// prefixes of length l.
std::vector<double> layered_decode_prob_now(std::span<const uint64_t> per_layer_sent,
                                            std::span<const uint16_t> layer_sizes, unsigned q,
                                            double eps);

struct PrefixProbs {
    std::vector<double> prob;
    std::vector<double> ci95;
};

// EW-layered recovery P(l* >= l), estimated by Monte Carlo with the uep
// joint decoder as ground truth (the union over expanding windows has no
// closed form). eps may be given per window or as a single shared value.
PrefixProbs layered_decode_prob_ew_mc(std::span<const uint64_t> per_window_sent,
                                      const uep::LayerProfile& profile, unsigned q,
                                      std::span<const double> eps_per_window, uint64_t trials,
                                      uint64_t seed);
PrefixProbs layered_decode_prob_ew_mc(std::span<const uint64_t> per_window_sent,
                                      const uep::LayerProfile& profile, unsigned q, double eps,
                                      uint64_t trials, uint64_t seed);

}  // namespace rlnc::analytics
