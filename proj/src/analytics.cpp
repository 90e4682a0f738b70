#include "rlnc/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace rlnc::analytics {

namespace {

void check_field_order(unsigned q) {
    if (q != 2 && q != 4 && q != 16 && q != 256)
        throw std::invalid_argument("unsupported field order " + std::to_string(q));
}

double log_choose(uint64_t n, uint64_t k) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// Rank-only absorption used by the Monte-Carlo estimators: a zero-payload
// decoder tracks exactly the rank of the raw coefficient matrix.
Decoder make_rank_tracker(uint32_t gen_size_k, unsigned q) {
    return Decoder(GaloisField::get(q), 0, static_cast<uint16_t>(gen_size_k), 1);
}

CodedPacket coefficients_only(std::vector<uint8_t> vec, const GaloisField& field) {
    CodedPacket pkt;
    pkt.coding_vector = std::move(vec);
    pkt.payload.assign(field.packed_size(1), 0);
    return pkt;
}

// Uniform coding vector, zero vector included (the matrix model behind the
// closed forms, as opposed to the encoder's resampling).
std::vector<uint8_t> raw_uniform_vector(uint32_t gen_size_k, unsigned q, Rng& rng) {
    std::vector<uint8_t> vec(gen_size_k);
    for (auto& v : vec) v = static_cast<uint8_t>(rng.below(q));
    return vec;
}

double normal_ci95(double variance, uint64_t n) {
    return 1.959964 * std::sqrt(variance / double(n));
}

}  // namespace

double decode_prob_given_received(uint64_t n, uint32_t gen_size_k, unsigned q) {
    check_field_order(q);
    if (gen_size_k < 1) throw std::invalid_argument("gen_size_k must be >= 1");
    if (n < gen_size_k) return 0.0;
    const int bits = q == 2 ? 1 : q == 4 ? 2 : q == 16 ? 4 : 8;
    double prod = 1.0;
    for (uint32_t j = 0; j < gen_size_k; ++j) {
        // q^(j-n) is a power of two, so the factor is exact.
        const int64_t exponent = bits * (int64_t(j) - int64_t(n));
        prod *= 1.0 - std::ldexp(1.0, static_cast<int>(std::max<int64_t>(exponent, -1075)));
    }
    return prod;
}

double decode_prob_pdf(uint64_t n, uint32_t gen_size_k, unsigned q) {
    if (n == 0) return 0.0;
    return decode_prob_given_received(n, gen_size_k, q) -
           decode_prob_given_received(n - 1, gen_size_k, q);
}

double decode_prob_after_sent(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps) {
    check_field_order(q);
    if (gen_size_k < 1) throw std::invalid_argument("gen_size_k must be >= 1");
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0, 1]");
    if (sent_n < gen_size_k) return 0.0;
    if (eps == 0.0) return decode_prob_given_received(sent_n, gen_size_k, q);
    if (eps == 1.0) return 0.0;

    const double log_eps = std::log(eps);
    const double log_arrive = std::log1p(-eps);
    double sum = 0.0;
    for (uint64_t n = gen_size_k; n <= sent_n; ++n) {
        const double log_term =
            log_choose(sent_n, n) + double(sent_n - n) * log_eps + double(n) * log_arrive;
        sum += std::exp(log_term) * decode_prob_given_received(n, gen_size_k, q);
    }
    return std::min(sum, 1.0);
}

double outage_prob(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps) {
    return 1.0 - decode_prob_after_sent(sent_n, gen_size_k, q, eps);
}

McEstimate avg_decoding_delay_mc(uint32_t gen_size_k, unsigned q, double eps, uint64_t trials,
                                 uint64_t seed) {
    check_field_order(q);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (eps < 0.0 || eps >= 1.0)
        throw std::invalid_argument("eps must lie in [0, 1); the delay diverges at eps = 1");

    const auto& field = GaloisField::get(q);
    double sum = 0.0, sum_sq = 0.0;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, {stream::trial, t}));
        Decoder tracker = make_rank_tracker(gen_size_k, q);
        uint64_t slots = 0;
        while (!tracker.complete()) {
            ++slots;
            if (eps > 0.0 && rng.uniform01() < eps) continue;
            tracker.absorb(coefficients_only(raw_uniform_vector(gen_size_k, q, rng), field));
        }
        sum += double(slots);
        sum_sq += double(slots) * double(slots);
    }
    const double mean = sum / double(trials);
    const double variance = trials > 1 ? (sum_sq - sum * mean) / double(trials - 1) : 0.0;
    return {mean, normal_ci95(std::max(variance, 0.0), trials)};
}

double mc_decode_freq(uint64_t sent_n, uint32_t gen_size_k, unsigned q, double eps,
                      uint64_t trials, uint64_t seed) {
    check_field_order(q);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const auto& field = GaloisField::get(q);
    uint64_t successes = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, {stream::trial, t}));
        Decoder tracker = make_rank_tracker(gen_size_k, q);
        for (uint64_t s = 0; s < sent_n && !tracker.complete(); ++s) {
            if (rng.uniform01() < eps) continue;
            tracker.absorb(coefficients_only(raw_uniform_vector(gen_size_k, q, rng), field));
        }
        if (tracker.complete()) ++successes;
    }
    return double(successes) / double(trials);
}

std::vector<double> layered_decode_prob_now(std::span<const uint64_t> per_layer_sent,
                                            std::span<const uint16_t> layer_sizes, unsigned q,
                                            double eps) {
    if (per_layer_sent.size() != layer_sizes.size())
        throw std::invalid_argument("one packet count per layer required");
    std::vector<double> prefix;
    prefix.reserve(layer_sizes.size());
    double prod = 1.0;
    for (size_t i = 0; i < layer_sizes.size(); ++i) {
        prod *= decode_prob_after_sent(per_layer_sent[i], layer_sizes[i], q, eps);
        prefix.push_back(prod);
    }
    return prefix;
}

PrefixProbs layered_decode_prob_ew_mc(std::span<const uint64_t> per_window_sent,
                                      const uep::LayerProfile& profile, unsigned q,
                                      std::span<const double> eps_per_window, uint64_t trials,
                                      uint64_t seed) {
    check_field_order(q);
    const size_t layers = profile.num_layers();
    if (per_window_sent.size() != layers || eps_per_window.size() != layers)
        throw std::invalid_argument("one packet count and eps per window required");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    profile.validate(profile.total_packets());

    const auto& field = GaloisField::get(q);
    const uint16_t gen_size_k = profile.total_packets();
    std::vector<uint64_t> prefix_hits(layers, 0);

    for (uint64_t t = 0; t < trials; ++t) {
        uep::UepSession session(field, 0, profile, uep::WindowScheme::ew, 1);
        for (size_t w = 0; w < layers; ++w) {
            const uint16_t end = profile.prefix_end(w);
            for (uint64_t n = 0; n < per_window_sent[w]; ++n) {
                // Draw erasures and coefficients from per-packet derived
                // streams so estimates share randomness across different
                // packet-count vectors (common random numbers).
                Rng erasure(Rng::derive(seed, {stream::channel, t, uint64_t(w), n}));
                if (erasure.uniform01() < eps_per_window[w]) continue;
                Rng coeffs(Rng::derive(seed, {stream::encoder, t, uint64_t(w), n}));
                CodedPacket pkt = coefficients_only(
                    rlnc::detail::sample_coding_vector(field, gen_size_k, 0, end, -1.0, coeffs),
                    field);
                pkt.window_id = static_cast<uint8_t>(w + 1);
                session.absorb(pkt);
            }
        }
        const size_t recovered = session.recovered_layers();
        for (size_t l = 0; l < recovered; ++l) ++prefix_hits[l];
    }

    PrefixProbs out;
    out.prob.reserve(layers);
    out.ci95.reserve(layers);
    for (size_t l = 0; l < layers; ++l) {
        const double p = double(prefix_hits[l]) / double(trials);
        out.prob.push_back(p);
        out.ci95.push_back(normal_ci95(p * (1.0 - p), trials));
    }
    return out;
}

PrefixProbs layered_decode_prob_ew_mc(std::span<const uint64_t> per_window_sent,
                                      const uep::LayerProfile& profile, unsigned q, double eps,
                                      uint64_t trials, uint64_t seed) {
    std::vector<double> eps_vec(profile.num_layers(), eps);
    return layered_decode_prob_ew_mc(per_window_sent, profile, q, eps_vec, trials, seed);
}

}  // namespace rlnc::analytics
