#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rlnc {

// Finite field description. Supported orders are the characteristic-2 fields
// 2, 4, 16 and 256; reduction_poly is the irreducible polynomial as a bitmask
// (x^2+x+1 -> 0b111). Passing reduction_poly = 0 selects the conventional
// polynomial for the order.
struct FieldSpec {
    unsigned order = 256;
    unsigned reduction_poly = 0;

    FieldSpec() = default;
    explicit FieldSpec(unsigned q, unsigned poly = 0) : order(q), reduction_poly(poly) {}
};

// Default reduction polynomials: GF(4) x^2+x+1, GF(16) x^4+x+1,
// GF(256) x^8+x^4+x^3+x+1 (0x11B).
unsigned default_reduction_poly(unsigned order);

// Arithmetic over GF(2^b), b in {1,2,4,8}. All tables are built once at
// construction; afterwards every operation is a pure table lookup, safe for
// unrestricted concurrent use.
//
// Symbols are integers in [0, q). Rows of symbols come in two layouts:
//   * packed   - symbols_per_byte() symbols per byte, low bits first
//                (payload rows, wire format)
//   * unpacked - one symbol per byte (coding vectors)
// Because packing is positional and addition is XOR, the byte-level scale
// table works on both layouts, so axpy() and scale() accept either.
class GaloisField {
public:
    explicit GaloisField(FieldSpec spec);

    // Cached instance with the conventional polynomial.
    static const GaloisField& get(unsigned order);

    unsigned order() const { return spec_.order; }
    unsigned bits() const { return bits_; }
    unsigned symbols_per_byte() const { return 8u / bits_; }
    const FieldSpec& spec() const { return spec_; }

    // Packed byte count for a row of `symbols` symbols.
    size_t packed_size(size_t symbols) const {
        return (symbols * bits_ + 7) / 8;
    }

    uint8_t add(uint8_t a, uint8_t b) const {
        check_symbol(a);
        check_symbol(b);
        return a ^ b;
    }

    uint8_t mul(uint8_t a, uint8_t b) const {
        check_symbol(a);
        check_symbol(b);
        return mul_[size_t(a) * spec_.order + b];
    }

    // Multiplicative inverse; zero is rejected.
    uint8_t inv(uint8_t a) const;

    uint8_t div(uint8_t a, uint8_t b) const { return mul(a, inv(b)); }

    // dst[i] ^= coeff * src[i], element-wise over every symbol in the rows.
    // Works on packed and unpacked rows alike. Lengths must match.
    void axpy(uint8_t coeff, std::span<const uint8_t> src, std::span<uint8_t> dst) const;

    // row[i] = coeff * row[i].
    void scale(uint8_t coeff, std::span<uint8_t> row) const;

    uint8_t get_symbol(std::span<const uint8_t> packed, size_t index) const {
        const size_t bit = index * bits_;
        return (packed[bit >> 3] >> (bit & 7)) & mask_;
    }

    void set_symbol(std::span<uint8_t> packed, size_t index, uint8_t value) const {
        check_symbol(value);
        const size_t bit = index * bits_;
        uint8_t& b = packed[bit >> 3];
        b = static_cast<uint8_t>((b & ~(mask_ << (bit & 7))) | (value << (bit & 7)));
    }

private:
    void check_symbol(uint8_t a) const;
    const uint8_t* scale_row(uint8_t coeff) const { return scale_.data() + size_t(coeff) * 256; }

    FieldSpec spec_;
    unsigned bits_ = 8;
    uint8_t mask_ = 0xff;
    std::vector<uint8_t> mul_;    // order x order products
    std::vector<uint8_t> inv_;    // order entries, inv_[0] unused
    std::vector<uint8_t> log_;    // GF(256) only
    std::vector<uint8_t> exp_;    // GF(256) only
    std::vector<uint8_t> scale_;  // order x 256: packed-byte scaling
};

namespace detail {
// Carry-less multiply of a and b reduced by poly; the construction-time
// reference the lookup tables are built from.
uint8_t peasant_mul(unsigned a, unsigned b, unsigned poly, unsigned degree);
bool poly_irreducible(unsigned poly, unsigned degree);
}  // namespace detail

}  // namespace rlnc
