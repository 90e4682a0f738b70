#include "rlnc/field.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace rlnc {

namespace detail {

uint8_t peasant_mul(unsigned a, unsigned b, unsigned poly, unsigned degree) {
    const unsigned carry = 1u << degree;
    unsigned result = 0;
    while (b != 0) {
        if (b & 1u) result ^= a;
        b >>= 1;
        a <<= 1;
        if (a & carry) a ^= poly;
    }
    return static_cast<uint8_t>(result);
}

// Remainder of carry-less division a mod b.
static unsigned clmod(unsigned a, unsigned b) {
    const int db = std::bit_width(b);
    for (int da = std::bit_width(a); da >= db; da = std::bit_width(a)) {
        a ^= b << (da - db);
    }
    return a;
}

bool poly_irreducible(unsigned poly, unsigned degree) {
    if (std::bit_width(poly) != degree + 1) return false;
    for (unsigned d = 2; d < (2u << (degree / 2)); ++d) {
        if (clmod(poly, d) == 0) return false;
    }
    return true;
}

}  // namespace detail

unsigned default_reduction_poly(unsigned order) {
    switch (order) {
        case 2: return 0x3;      // x + 1, unused in practice
        case 4: return 0x7;      // x^2 + x + 1
        case 16: return 0x13;    // x^4 + x + 1
        case 256: return 0x11b;  // x^8 + x^4 + x^3 + x + 1
        default: throw std::invalid_argument("unsupported field order " + std::to_string(order));
    }
}

GaloisField::GaloisField(FieldSpec spec) : spec_(spec) {
    switch (spec_.order) {
        case 2: bits_ = 1; break;
        case 4: bits_ = 2; break;
        case 16: bits_ = 4; break;
        case 256: bits_ = 8; break;
        default: throw std::invalid_argument("unsupported field order " + std::to_string(spec_.order));
    }
    if (spec_.reduction_poly == 0) spec_.reduction_poly = default_reduction_poly(spec_.order);
    mask_ = static_cast<uint8_t>(spec_.order - 1);

    const unsigned q = spec_.order;
    const unsigned poly = spec_.reduction_poly;
    if (q > 2 && !detail::poly_irreducible(poly, bits_)) {
        throw std::invalid_argument("reduction polynomial is not irreducible of degree " +
                                    std::to_string(bits_));
    }

    mul_.assign(size_t(q) * q, 0);
    if (q == 256) {
        // Find a generator, then build log/antilog tables and expand them
        // into the full product table used by mul() and the scale rows.
        unsigned generator = 0;
        for (unsigned g = 2; g < q && generator == 0; ++g) {
            unsigned x = 1, order_of_g = 0;
            do {
                x = detail::peasant_mul(x, g, poly, bits_);
                ++order_of_g;
            } while (x != 1);
            if (order_of_g == q - 1) generator = g;
        }
        if (generator == 0) throw std::invalid_argument("no generator found; polynomial not irreducible");

        log_.assign(q, 0);
        exp_.assign(2 * (q - 1), 0);
        unsigned x = 1;
        for (unsigned i = 0; i < q - 1; ++i) {
            exp_[i] = static_cast<uint8_t>(x);
            exp_[i + q - 1] = static_cast<uint8_t>(x);
            log_[x] = static_cast<uint8_t>(i);
            x = detail::peasant_mul(x, generator, poly, bits_);
        }
        for (unsigned a = 1; a < q; ++a)
            for (unsigned b = 1; b < q; ++b)
                mul_[size_t(a) * q + b] = exp_[unsigned(log_[a]) + log_[b]];
    } else {
        for (unsigned a = 0; a < q; ++a)
            for (unsigned b = 0; b < q; ++b)
                mul_[size_t(a) * q + b] = detail::peasant_mul(a, b, poly, bits_);
    }

    inv_.assign(q, 0);
    for (unsigned a = 1; a < q; ++a) {
        for (unsigned b = 1; b < q; ++b) {
            if (mul_[size_t(a) * q + b] == 1) {
                inv_[a] = static_cast<uint8_t>(b);
                break;
            }
        }
    }

    // Per-scalar packed-byte scale table: scale_[c][byte] applies c to every
    // symbol packed in the byte. For q = 256 this is just the product table.
    scale_.assign(size_t(q) * 256, 0);
    const unsigned spb = symbols_per_byte();
    for (unsigned c = 0; c < q; ++c) {
        uint8_t* row = scale_.data() + size_t(c) * 256;
        for (unsigned byte = 0; byte < 256; ++byte) {
            unsigned out = 0;
            for (unsigned s = 0; s < spb; ++s) {
                const unsigned sym = (byte >> (s * bits_)) & mask_;
                out |= unsigned(mul_[size_t(c) * q + sym]) << (s * bits_);
            }
            row[byte] = static_cast<uint8_t>(out);
        }
    }
}

const GaloisField& GaloisField::get(unsigned order) {
    static std::mutex mu;
    static std::map<unsigned, GaloisField> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, GaloisField(FieldSpec(order))).first;
    return it->second;
}

void GaloisField::check_symbol(uint8_t a) const {
    if (a >= spec_.order)
        throw std::invalid_argument("symbol " + std::to_string(a) + " out of range for GF(" +
                                    std::to_string(spec_.order) + ")");
}

uint8_t GaloisField::inv(uint8_t a) const {
    check_symbol(a);
    if (a == 0) throw std::invalid_argument("zero has no multiplicative inverse");
    return inv_[a];
}

void GaloisField::axpy(uint8_t coeff, std::span<const uint8_t> src, std::span<uint8_t> dst) const {
    check_symbol(coeff);
    if (src.size() != dst.size()) throw std::invalid_argument("axpy: row length mismatch");
    if (coeff == 0) return;
    const uint8_t* row = scale_row(coeff);
    for (size_t i = 0; i < src.size(); ++i) dst[i] ^= row[src[i]];
}

void GaloisField::scale(uint8_t coeff, std::span<uint8_t> row) const {
    check_symbol(coeff);
    const uint8_t* table = scale_row(coeff);
    for (auto& b : row) b = table[b];
}

}  // namespace rlnc
