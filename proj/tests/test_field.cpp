#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rlnc/field.hpp"
#include "rlnc/rng.hpp"

using rlnc::FieldSpec;
using rlnc::GaloisField;

TEST_CASE("field spec validation") {
    CHECK_THROWS_AS(GaloisField(FieldSpec(3)), std::invalid_argument);
    CHECK_THROWS_AS(GaloisField(FieldSpec(512)), std::invalid_argument);
    // x^8 + x^4 + x^3 + x^2 + 1 (0x11d) is also irreducible; x^8 + 1 is not
    CHECK_NOTHROW(GaloisField(FieldSpec(256, 0x11d)));
    CHECK_THROWS_AS(GaloisField(FieldSpec(256, 0x101)), std::invalid_argument);
    CHECK_THROWS_AS(GaloisField(FieldSpec(16, 0x18)), std::invalid_argument);  // x^4+x^3 reducible
}

TEST_CASE("addition is xor and self-inverse") {
    const auto& gf2 = GaloisField::get(2);
    CHECK(gf2.add(1, 1) == 0);
    const auto& gf256 = GaloisField::get(256);
    CHECK(gf256.add(0x53, 0xCA) == 0x99);
    for (unsigned x = 0; x < 256; ++x) CHECK(gf256.add(uint8_t(x), uint8_t(x)) == 0);
}

TEST_CASE("multiplication examples") {
    for (unsigned q : {2u, 4u, 16u, 256u}) {
        const auto& f = GaloisField::get(q);
        for (unsigned x = 0; x < q; ++x) {
            CHECK(f.mul(1, uint8_t(x)) == x);
            CHECK(f.mul(0, uint8_t(x)) == 0);
        }
    }
    CHECK(GaloisField::get(256).mul(0x53, 0xCA) == 0x01);
}

TEST_CASE("GF(256) product table matches the long-division oracle on all pairs") {
    const auto& f = GaloisField::get(256);
    for (unsigned a = 0; a < 256; ++a)
        for (unsigned b = 0; b < 256; ++b)
            REQUIRE(f.mul(uint8_t(a), uint8_t(b)) == oracle::gf_mul(a, b, 0x11b, 8));
}

TEST_CASE("field axioms exhaustively for q <= 16") {
    for (unsigned q : {2u, 4u, 16u}) {
        const auto& f = GaloisField::get(q);
        for (unsigned a = 0; a < q; ++a)
            for (unsigned b = 0; b < q; ++b)
                for (unsigned c = 0; c < q; ++c) {
                    const auto A = uint8_t(a), B = uint8_t(b), C = uint8_t(c);
                    REQUIRE(f.add(f.add(A, B), C) == f.add(A, f.add(B, C)));
                    REQUIRE(f.mul(f.mul(A, B), C) == f.mul(A, f.mul(B, C)));
                    REQUIRE(f.mul(A, f.add(B, C)) == f.add(f.mul(A, B), f.mul(A, C)));
                    REQUIRE(f.add(A, A) == 0);
                    REQUIRE(f.mul(A, B) == f.mul(B, A));
                }
    }
}

TEST_CASE("field axioms on random GF(256) triples") {
    const auto& f = GaloisField::get(256);
    rlnc::Rng rng(20240811);
    for (int i = 0; i < 10000; ++i) {
        const auto a = uint8_t(rng.below(256)), b = uint8_t(rng.below(256)), c = uint8_t(rng.below(256));
        REQUIRE(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
        REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        REQUIRE(f.add(a, a) == 0);
    }
}

TEST_CASE("inverses") {
    CHECK(GaloisField::get(2).inv(1) == 1);
    CHECK(GaloisField::get(256).inv(0x53) == 0xCA);
    for (unsigned q : {2u, 4u, 16u, 256u}) {
        const auto& f = GaloisField::get(q);
        CHECK_THROWS_AS(f.inv(0), std::invalid_argument);
        for (unsigned a = 1; a < q; ++a) {
            REQUIRE(f.mul(uint8_t(a), f.inv(uint8_t(a))) == 1);
            REQUIRE(f.inv(f.inv(uint8_t(a))) == a);  // involution on nonzero
        }
    }
}

TEST_CASE("axpy matches the per-symbol reference loop on packed rows") {
    rlnc::Rng rng(7);
    for (unsigned q : {2u, 4u, 16u, 256u}) {
        const auto& f = GaloisField::get(q);
        const unsigned degree = oracle::degree_of_order(q);
        const unsigned poly = oracle::poly_of_order(q);
        const size_t symbols = 40;
        std::vector<uint8_t> src(f.packed_size(symbols)), dst(f.packed_size(symbols));
        for (auto& b : src) b = uint8_t(rng.below(256));
        for (auto& b : dst) b = uint8_t(rng.below(256));

        for (unsigned c = 0; c < q; ++c) {
            auto expect = dst;
            const size_t padded = f.packed_size(symbols) * f.symbols_per_byte();
            for (size_t i = 0; i < padded; ++i) {
                const unsigned prod = oracle::gf_mul(f.get_symbol(src, i), c, poly, degree);
                f.set_symbol(expect, i, uint8_t(f.get_symbol(expect, i) ^ prod));
            }
            auto got = dst;
            f.axpy(uint8_t(c), src, got);
            REQUIRE(got == expect);
        }

        // coeff = 0 leaves dst unchanged; coeff = 1 is element-wise add
        auto copy = dst;
        f.axpy(0, src, copy);
        CHECK(copy == dst);
        f.axpy(1, src, copy);
        for (size_t i = 0; i < dst.size(); ++i) CHECK(copy[i] == uint8_t(dst[i] ^ src[i]));
    }
}

TEST_CASE("axpy rejects mismatched rows") {
    const auto& f = GaloisField::get(256);
    std::vector<uint8_t> a(4), b(5);
    CHECK_THROWS_AS(f.axpy(1, a, b), std::invalid_argument);
}

TEST_CASE("packed symbol accessors round-trip") {
    for (unsigned q : {2u, 4u, 16u, 256u}) {
        const auto& f = GaloisField::get(q);
        std::vector<uint8_t> row(f.packed_size(13), 0);
        rlnc::Rng rng(q);
        std::vector<uint8_t> values(13);
        for (size_t i = 0; i < values.size(); ++i) {
            values[i] = uint8_t(rng.below(q));
            f.set_symbol(row, i, values[i]);
        }
        for (size_t i = 0; i < values.size(); ++i) REQUIRE(f.get_symbol(row, i) == values[i]);
    }
}
