#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "rlnc/uep.hpp"

using namespace rlnc;
using namespace rlnc::uep;

namespace {

SourceBlock random_block(uint16_t k, uint32_t payload_len, unsigned q, uint64_t seed) {
    const auto& f = GaloisField::get(q);
    SourceBlock block;
    block.gen_size_k = k;
    block.payload_len = payload_len;
    block.field_order = q;
    Rng rng(seed);
    block.packets.assign(k, std::vector<uint8_t>(f.packed_size(payload_len), 0));
    for (auto& row : block.packets)
        for (uint32_t i = 0; i < payload_len; ++i)
            f.set_symbol(row, i, uint8_t(rng.below(q)));
    return block;
}

// Brute-force prefix recovery: source packet j is recoverable from a packet
// set iff the unit vector e_j lies in the row span, i.e. appending e_j does
// not raise the rank. l* is the longest layer prefix all of whose packets
// are recoverable.
size_t prefix_recoverable_oracle(const std::vector<std::vector<uint8_t>>& vectors,
                                 const LayerProfile& profile, unsigned q) {
    const uint16_t k = profile.total_packets();
    const unsigned base_rank = vectors.empty() ? 0 : oracle::matrix_rank(vectors, q);
    size_t longest = 0;
    for (size_t layer = 0; layer < profile.num_layers(); ++layer) {
        bool all = true;
        for (uint16_t j = profile.layer_begin(layer); j < profile.layer_end(layer) && all; ++j) {
            auto extended = vectors;
            std::vector<uint8_t> unit(k, 0);
            unit[j] = 1;
            extended.push_back(unit);
            all = oracle::matrix_rank(extended, q) == base_rank;
        }
        if (!all) break;
        ++longest;
    }
    return longest;
}

}  // namespace

TEST_CASE("profile and distribution validation") {
    LayerProfile profile{{4, 4}};
    CHECK_NOTHROW(profile.validate(8));
    CHECK_THROWS_AS(profile.validate(9), std::invalid_argument);
    const LayerProfile zero_layer{{0, 8}};
    CHECK_THROWS_AS(zero_layer.validate(8), std::invalid_argument);
    const LayerProfile no_layers{{}};
    CHECK_THROWS_AS(no_layers.validate(0), std::invalid_argument);

    CHECK_NOTHROW(WindowDistribution::uniform(4).validate(4));
    const WindowDistribution short_sum{{0.5, 0.4}};
    CHECK_THROWS_AS(short_sum.validate(2), std::invalid_argument);
    const WindowDistribution negative{{1.5, -0.5}};
    CHECK_THROWS_AS(negative.validate(2), std::invalid_argument);
    const WindowDistribution wrong_arity{{1.0}};
    CHECK_THROWS_AS(wrong_arity.validate(2), std::invalid_argument);
}

TEST_CASE("select_window follows the distribution") {
    SUBCASE("degenerate distribution always picks its window") {
        WindowDistribution dist{{1.0, 0.0, 0.0}};
        Rng rng(1);
        for (int i = 0; i < 100; ++i) CHECK(select_window(dist, rng) == 0);
    }

    SUBCASE("zero entries are never selected") {
        WindowDistribution dist{{0.5, 0.0, 0.5}};
        Rng rng(2);
        for (int i = 0; i < 5000; ++i) CHECK(select_window(dist, rng) != 1);
    }

    SUBCASE("uniform frequencies within 4 sigma") {
        const auto dist = WindowDistribution::uniform(4);
        Rng rng(3);
        uint64_t counts[4] = {0, 0, 0, 0};
        const uint64_t draws = 100000;
        for (uint64_t i = 0; i < draws; ++i) ++counts[select_window(dist, rng)];
        for (auto c : counts) CHECK(oracle::within_sigmas(double(c), double(draws), 0.25, 4.0));
    }
}

TEST_CASE("coding vector support stays inside the selected window") {
    auto block = random_block(12, 8, 256, 10);
    LayerProfile profile{{3, 4, 5}};
    EncoderConfig cfg;
    cfg.seed = 5;

    SUBCASE("EW windows cover prefixes") {
        UepEncoder enc(block, profile, WindowScheme::ew, WindowDistribution::uniform(3), cfg);
        for (int i = 0; i < 200; ++i) {
            const auto pkt = enc.next();
            REQUIRE(pkt.window_id >= 1);
            REQUIRE(pkt.window_id <= 3);
            const uint16_t end = profile.prefix_end(pkt.window_id - 1);
            for (uint16_t j = end; j < 12; ++j) REQUIRE(pkt.coding_vector[j] == 0);
        }
    }

    SUBCASE("NOW windows cover single layers") {
        UepEncoder enc(block, profile, WindowScheme::now, WindowDistribution::uniform(3), cfg);
        for (int i = 0; i < 200; ++i) {
            const auto pkt = enc.next();
            const size_t w = pkt.window_id - 1;
            for (uint16_t j = 0; j < 12; ++j) {
                if (j < profile.layer_begin(w) || j >= profile.layer_end(w))
                    REQUIRE(pkt.coding_vector[j] == 0);
            }
        }
    }
}

TEST_CASE("UEP payloads match the reference combination over the window") {
    auto block = random_block(10, 6, 16, 20);
    LayerProfile profile{{4, 6}};
    EncoderConfig cfg;
    cfg.field = FieldSpec(16);
    cfg.seed = 6;
    UepEncoder enc(block, profile, WindowScheme::ew, WindowDistribution::uniform(2), cfg);
    const auto& f = GaloisField::get(16);
    for (int i = 0; i < 50; ++i) {
        const auto pkt = enc.next();
        std::vector<uint8_t> expect(f.packed_size(6), 0);
        for (uint32_t s = 0; s < 6; ++s) {
            unsigned acc = 0;
            for (uint16_t j = 0; j < 10; ++j)
                acc ^= oracle::gf_mul(pkt.coding_vector[j], f.get_symbol(block.packets[j], s), 0x13, 4);
            f.set_symbol(expect, s, uint8_t(acc));
        }
        REQUIRE(pkt.payload == expect);
    }
}

TEST_CASE("recovered_layers ground truth") {
    const auto& f = GaloisField::get(256);
    LayerProfile profile{{2, 3}};

    SUBCASE("no packets -> zero layers") {
        UepSession session(f, 0, profile, WindowScheme::ew, 4);
        CHECK(session.recovered_layers() == 0);
        CHECK_FALSE(session.try_recover());
    }

    SUBCASE("EW window i decoded implies layers 1..i") {
        auto block = random_block(5, 4, 256, 9);
        EncoderConfig cfg;
        cfg.seed = 11;
        // only window 1 packets: layer 1 becomes decodable, layer 2 never
        UepEncoder enc(block, profile, WindowScheme::ew, WindowDistribution{{1.0, 0.0}}, cfg);
        UepSession session(f, 0, profile, WindowScheme::ew, 4);
        for (int i = 0; i < 12; ++i) session.absorb(enc.next());
        CHECK(session.recovered_layers() == 1);
        CHECK(session.layer_decoded(0));
        CHECK_FALSE(session.layer_decoded(1));
    }
}

TEST_CASE("EW sessions match the linear-algebra prefix oracle") {
    LayerProfile profile{{2, 2, 3}};
    const unsigned q = 2;
    const auto& f = GaloisField::get(q);
    Rng rng(404);
    for (int trial = 0; trial < 120; ++trial) {
        auto block = random_block(7, 3, q, rng.next());
        EncoderConfig cfg;
        cfg.field = FieldSpec(q);
        cfg.seed = rng.next();
        UepEncoder enc(block, profile, WindowScheme::ew, WindowDistribution::uniform(3), cfg);
        UepSession session(f, 0, profile, WindowScheme::ew, 3);
        std::vector<std::vector<uint8_t>> vectors;
        const int packets = int(rng.below(14));
        size_t last = 0;
        for (int i = 0; i < packets; ++i) {
            const auto pkt = enc.next();
            vectors.push_back(pkt.coding_vector);
            session.absorb(pkt);
            const size_t now = session.recovered_layers();
            REQUIRE(now >= last);  // monotone as packets arrive
            last = now;
        }
        REQUIRE(session.recovered_layers() == prefix_recoverable_oracle(vectors, profile, q));
    }
}

TEST_CASE("NOW prefix semantics and raw per-layer flags") {
    LayerProfile profile{{2, 2}};
    const auto& f = GaloisField::get(256);
    auto block = random_block(4, 4, 256, 33);
    EncoderConfig cfg;
    cfg.seed = 55;
    // only layer-2 packets: prefix stays 0 even though layer 2 decodes
    UepEncoder enc(block, profile, WindowScheme::now, WindowDistribution{{0.0, 1.0}}, cfg);
    UepSession session(f, 0, profile, WindowScheme::now, 4);
    for (int i = 0; i < 10; ++i) session.absorb(enc.next());
    CHECK(session.layer_decoded(1));
    CHECK_FALSE(session.layer_decoded(0));
    CHECK(session.recovered_layers() == 0);
}

TEST_CASE("UEP recovery is byte-exact") {
    for (auto scheme : {WindowScheme::now, WindowScheme::ew}) {
        LayerProfile profile{{3, 3, 2}};
        auto block = random_block(8, 10, 256, 77);
        EncoderConfig cfg;
        cfg.seed = 13;
        UepEncoder enc(block, profile, scheme, WindowDistribution::uniform(3), cfg);
        UepSession session(GaloisField::get(256), 0, profile, scheme, 10);
        int guard = 0;
        while (!session.complete() && guard++ < 500) session.absorb(enc.next());
        REQUIRE(session.complete());
        CHECK(session.try_recover()->packets == block.packets);
    }
}

TEST_CASE("single-window UEP reduces exactly to standard RLNC") {
    for (auto scheme : {WindowScheme::now, WindowScheme::ew}) {
        auto block = random_block(6, 8, 256, 3);
        EncoderConfig cfg;
        cfg.seed = 2024;
        Encoder plain(block, cfg);
        UepEncoder uep(block, LayerProfile{{6}}, scheme, WindowDistribution::uniform(1), cfg);
        for (int i = 0; i < 25; ++i) {
            const auto a = plain.next(), b = uep.next();
            REQUIRE(a.coding_vector == b.coding_vector);
            REQUIRE(a.payload == b.payload);
        }
    }
}

TEST_CASE("support violations are rejected at absorption") {
    LayerProfile profile{{2, 2}};
    const auto& f = GaloisField::get(256);
    UepSession ew(f, 0, profile, WindowScheme::ew, 2);
    CodedPacket pkt;
    pkt.generation_id = 0;
    pkt.window_id = 1;
    pkt.coding_vector = {0, 0, 1, 0};  // support outside window 1
    pkt.payload.assign(2, 0);
    CHECK_THROWS_AS(ew.absorb(pkt), std::invalid_argument);

    UepSession now(f, 0, profile, WindowScheme::now, 2);
    CHECK_THROWS_AS(now.absorb(pkt), std::invalid_argument);
    pkt.window_id = 5;
    CHECK_THROWS_AS(now.absorb(pkt), std::invalid_argument);
}

TEST_CASE("UEP encoder rejects systematic mode") {
    auto block = random_block(4, 4, 256, 1);
    EncoderConfig cfg;
    cfg.mode = EncoderMode::systematic;
    CHECK_THROWS_AS(UepEncoder(block, LayerProfile{{4}}, WindowScheme::ew,
                               WindowDistribution::uniform(1), cfg),
                    std::invalid_argument);
}
