#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rlnc/analytics.hpp"

using namespace rlnc;
using namespace rlnc::analytics;

TEST_CASE("decoding probability closed form") {
    CHECK(decode_prob_given_received(1, 2, 2) == 0.0);
    CHECK(decode_prob_given_received(1, 2, 256) == 0.0);
    CHECK(decode_prob_given_received(2, 2, 2) == 0.375);
    CHECK(decode_prob_given_received(3, 2, 2) == 0.65625);
    CHECK_THROWS_AS(decode_prob_given_received(4, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(decode_prob_given_received(4, 0, 2), std::invalid_argument);
}

TEST_CASE("closed form equals exhaustive enumeration for K <= 3, q = 2, n <= 6") {
    for (unsigned k = 1; k <= 3; ++k)
        for (unsigned n = k; n <= 6; ++n) {
            const auto exact = oracle::full_rank_probability_exhaustive(n, k, 2);
            REQUIRE(decode_prob_given_received(n, k, 2) == exact.value());
        }
}

TEST_CASE("closed form spot-checked against enumeration for q = 4") {
    const auto exact = oracle::full_rank_probability_exhaustive(3, 2, 4);
    CHECK(decode_prob_given_received(3, 2, 4) == doctest::Approx(exact.value()).epsilon(1e-12));
}

TEST_CASE("cdf is strictly increasing past K and tends to 1") {
    for (unsigned q : {2u, 256u}) {
        double last = 0.0;
        for (uint64_t n = 3; n < 40; ++n) {
            const double p = decode_prob_given_received(n, 3, q);
            if (p < 1.0) CHECK(p > last);  // strict until the double saturates
            CHECK(p >= last);
            last = p;
        }
        CHECK(decode_prob_given_received(500, 3, q) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pdf properties") {
    CHECK(decode_prob_pdf(1, 2, 2) == 0.0);       // n < K
    CHECK(decode_prob_pdf(2, 2, 2) == 0.375);     // P_d(K), since P_d(K-1) = 0
    for (unsigned q : {2u, 16u}) {
        double mass = 0.0;
        uint64_t n = 0;
        while (1.0 - decode_prob_given_received(n, 4, q) > kSeriesTailBound) {
            ++n;
            const double p = decode_prob_pdf(n, 4, q);
            CHECK(p >= 0.0);
            mass += p;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        // cdf/pdf consistency at a few points
        for (uint64_t m : {4ull, 6ull, 9ull}) {
            double cumulative = 0.0;
            for (uint64_t i = 0; i <= m; ++i) cumulative += decode_prob_pdf(i, 4, q);
            CHECK(cumulative == doctest::Approx(decode_prob_given_received(m, 4, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("decoding probability after N sent packets") {
    CHECK(decode_prob_after_sent(50, 4, 2, 1.0) == 0.0);
    CHECK(decode_prob_after_sent(8, 8, 256, 0.0) == decode_prob_given_received(8, 8, 256));
    CHECK(decode_prob_after_sent(3, 8, 2, 0.1) == 0.0);  // N < K

    SUBCASE("monotone in N and in 1 - eps") {
        for (double eps : {0.0, 0.2, 0.5, 0.8}) {
            double last = -1.0;
            for (uint64_t n = 4; n <= 64; n += 4) {
                const double p = decode_prob_after_sent(n, 4, 2, eps);
                CHECK(p >= last);
                last = p;
            }
        }
        for (uint64_t n : {8ull, 16ull, 32ull}) {
            double last = 2.0;
            for (double eps : {0.0, 0.1, 0.3, 0.6, 0.9, 1.0}) {
                const double p = decode_prob_after_sent(n, 4, 2, eps);
                CHECK(p <= last);
                last = p;
            }
        }
    }

    SUBCASE("matches Monte-Carlo channel simulation within 3 sigma") {
        const uint64_t trials = 100000;
        const double closed = decode_prob_after_sent(4, 2, 2, 0.3);
        const double freq = mc_decode_freq(4, 2, 2, 0.3, trials, 17);
        CHECK(oracle::within_sigmas(freq * double(trials), double(trials), closed, 3.0));
    }

    SUBCASE("large N stays finite and sane") {
        const double p = decode_prob_after_sent(4000, 16, 2, 0.5);
        CHECK(p > 0.999999);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("outage probability complements decoding probability") {
    CHECK(outage_prob(20, 4, 2, 1.0) == 1.0);
    for (uint64_t n : {4ull, 10ull, 30ull}) {
        const double pd = decode_prob_after_sent(n, 4, 2, 0.3);
        CHECK(std::abs(pd + outage_prob(n, 4, 2, 0.3) - 1.0) < 1e-12);
    }
    double last = 2.0;
    for (uint64_t n = 4; n <= 40; n += 6) {
        const double po = outage_prob(n, 4, 2, 0.3);
        CHECK(po <= last);
        last = po;
    }
}

TEST_CASE("average decoding delay estimates") {
    CHECK_THROWS_AS(avg_decoding_delay_mc(4, 2, 1.0, 100, 1), std::invalid_argument);

    SUBCASE("near-MDS behaviour at q = 256") {
        const auto est = avg_decoding_delay_mc(8, 256, 0.0, 20000, 2);
        CHECK(std::abs(est.mean - 8.0) < 0.05);
    }

    SUBCASE("q = 2, K = 1 is geometric with mean 2") {
        const auto est = avg_decoding_delay_mc(1, 2, 0.0, 50000, 3);
        CHECK(std::abs(est.mean - 2.0) <= 3.0 * est.ci95 / 1.959964);
    }

    SUBCASE("halving the arrival rate doubles the delay at q = 256") {
        const auto clear = avg_decoding_delay_mc(8, 256, 0.0, 20000, 4);
        const auto lossy = avg_decoding_delay_mc(8, 256, 0.5, 20000, 5);
        CHECK(std::abs(lossy.mean - 2.0 * clear.mean) < 0.2);
    }

    SUBCASE("estimator agrees with the pdf expectation for q = 2, K = 2") {
        double expect = 0.0;
        for (uint64_t n = 2; n < 200; ++n) expect += double(n) * decode_prob_pdf(n, 2, 2);
        const auto est = avg_decoding_delay_mc(2, 2, 0.0, 100000, 6);
        CHECK(std::abs(est.mean - expect) <= est.ci95);
    }
}

TEST_CASE("NOW layered recovery probabilities") {
    const std::vector<uint16_t> layers{4, 4};
    const std::vector<uint64_t> sent{8, 8};
    const auto probs = layered_decode_prob_now(sent, layers, 2, 0.1);
    REQUIRE(probs.size() == 2);
    const double p1 = decode_prob_after_sent(8, 4, 2, 0.1);
    CHECK(probs[0] == doctest::Approx(p1).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(p1 * p1).epsilon(1e-12));
    CHECK(probs[1] <= probs[0]);

    SUBCASE("single layer reduces to decode_prob_after_sent") {
        const std::vector<uint16_t> one{6};
        const std::vector<uint64_t> n{12};
        CHECK(layered_decode_prob_now(n, one, 256, 0.2)[0] ==
              doctest::Approx(decode_prob_after_sent(12, 6, 256, 0.2)).epsilon(1e-12));
    }

    SUBCASE("a zero-packet layer zeroes every later prefix") {
        const std::vector<uint64_t> zeroes{8, 0};
        const auto p = layered_decode_prob_now(zeroes, layers, 2, 0.1);
        CHECK(p[0] > 0.0);
        CHECK(p[1] == 0.0);
    }

    SUBCASE("matches NOW Monte-Carlo simulation within 3 sigma") {
        // simulate: layer i receives binomial arrivals out of sent[i]; decode
        // independently with rank trackers
        const uint64_t trials = 30000;
        uint64_t both = 0, first = 0;
        const auto& field = GaloisField::get(2);
        for (uint64_t t = 0; t < trials; ++t) {
            Rng rng(Rng::derive(99, {stream::trial, t}));
            bool ok[2];
            for (int layer = 0; layer < 2; ++layer) {
                Decoder dec(field, 0, 4, 1);
                for (uint64_t s = 0; s < sent[layer]; ++s) {
                    if (rng.uniform01() < 0.1) continue;
                    CodedPacket pkt;
                    pkt.coding_vector.resize(4);
                    for (auto& v : pkt.coding_vector) v = uint8_t(rng.below(2));
                    pkt.payload.assign(field.packed_size(1), 0);
                    dec.absorb(pkt);
                }
                ok[layer] = dec.complete();
            }
            if (ok[0]) ++first;
            if (ok[0] && ok[1]) ++both;
        }
        CHECK(oracle::within_sigmas(double(first), double(trials), probs[0], 3.0));
        CHECK(oracle::within_sigmas(double(both), double(trials), probs[1], 3.0));
    }
}

TEST_CASE("EW layered recovery estimates") {
    uep::LayerProfile profile{{3, 3}};

    SUBCASE("no packets, no recovery") {
        const std::vector<uint64_t> none{0, 0};
        const auto probs = layered_decode_prob_ew_mc(none, profile, 2, 0.3, 2000, 7);
        CHECK(probs.prob[0] == 0.0);
        CHECK(probs.prob[1] == 0.0);
    }

    SUBCASE("single window agrees with the closed form within 3 sigma") {
        uep::LayerProfile flat{{10}};
        const std::vector<uint64_t> sent{14};
        const uint64_t trials = 20000;
        const auto probs = layered_decode_prob_ew_mc(sent, flat, 256, 0.2, trials, 8);
        const double closed = decode_prob_after_sent(14, 10, 256, 0.2);
        CHECK(oracle::within_sigmas(probs.prob[0] * double(trials), double(trials), closed, 3.0));
    }

    SUBCASE("prefix estimates are monotone non-increasing") {
        uep::LayerProfile deep{{2, 2, 2}};
        const std::vector<uint64_t> sent{4, 4, 4};
        const auto probs = layered_decode_prob_ew_mc(sent, deep, 2, 0.2, 4000, 9);
        CHECK(probs.prob[0] >= probs.prob[1]);
        CHECK(probs.prob[1] >= probs.prob[2]);
    }

    SUBCASE("adding packets to any window never hurts (common random numbers)") {
        const std::vector<uint64_t> base{4, 4};
        const std::vector<uint64_t> more{4, 7};
        const auto a = layered_decode_prob_ew_mc(base, profile, 2, 0.25, 3000, 10);
        const auto b = layered_decode_prob_ew_mc(more, profile, 2, 0.25, 3000, 10);
        CHECK(b.prob[0] >= a.prob[0]);
        CHECK(b.prob[1] >= a.prob[1]);
    }
}
