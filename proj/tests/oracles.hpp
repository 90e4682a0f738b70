// Independent reference implementations the unit and acceptance tests check
// the library against. Everything here is deliberately written on a
// different route than the library: long-division polynomial reduction
// instead of interleaved reduce, batch fraction-free elimination instead of
// incremental reduce-on-arrival, and so on.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

// Carry-less product followed by explicit polynomial long division.
inline unsigned gf_mul(unsigned a, unsigned b, unsigned poly, unsigned degree) {
    // full carry-less multiply, up to degree 2*degree-2
    unsigned wide = 0;
    for (unsigned bit = 0; bit < degree; ++bit)
        if (b & (1u << bit)) wide ^= a << bit;
    // long division by the reduction polynomial
    for (int shift = int(degree) - 2 + int(degree); shift >= int(degree); --shift) {
        // leading term at position shift corresponds to x^shift
        if (wide & (1u << shift)) wide ^= poly << (shift - int(degree));
    }
    return wide & ((1u << degree) - 1);
}

inline unsigned gf_inv(unsigned a, unsigned poly, unsigned degree) {
    if (a == 0) throw std::invalid_argument("zero has no inverse");
    const unsigned q = 1u << degree;
    for (unsigned b = 1; b < q; ++b)
        if (gf_mul(a, b, poly, degree) == 1) return b;
    throw std::logic_error("no inverse found; field tables are broken");
}

inline unsigned degree_of_order(unsigned q) {
    switch (q) {
        case 2: return 1;
        case 4: return 2;
        case 16: return 4;
        case 256: return 8;
    }
    throw std::invalid_argument("unsupported order");
}

inline unsigned poly_of_order(unsigned q) {
    switch (q) {
        case 2: return 0x3;
        case 4: return 0x7;
        case 16: return 0x13;
        case 256: return 0x11b;
    }
    throw std::invalid_argument("unsupported order");
}

// Rank of a matrix over GF(q) by batch forward elimination; rows are
// one-symbol-per-byte vectors.
inline unsigned matrix_rank(std::vector<std::vector<uint8_t>> rows, unsigned q) {
    const unsigned degree = degree_of_order(q);
    const unsigned poly = poly_of_order(q);
    if (rows.empty()) return 0;
    const size_t cols = rows[0].size();
    unsigned rank = 0;
    size_t pivot_col = 0;
    for (size_t r = 0; r < rows.size() && pivot_col < cols; ++pivot_col) {
        size_t pivot = r;
        while (pivot < rows.size() && rows[pivot][pivot_col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[r], rows[pivot]);
        const unsigned inv = gf_inv(rows[r][pivot_col], poly, degree);
        for (size_t c = 0; c < cols; ++c)
            rows[r][c] = static_cast<uint8_t>(gf_mul(rows[r][c], inv, poly, degree));
        for (size_t other = 0; other < rows.size(); ++other) {
            if (other == r || rows[other][pivot_col] == 0) continue;
            const unsigned factor = rows[other][pivot_col];
            for (size_t c = 0; c < cols; ++c)
                rows[other][c] ^= static_cast<uint8_t>(gf_mul(rows[r][c], factor, poly, degree));
        }
        ++r;
        ++rank;
    }
    return rank;
}

// Exact probability that a uniformly random n x k matrix over GF(q) has full
// column rank, by exhausting all q^(n*k) matrices. Returns a numerator over
// denominator q^(n*k); both are exact in double for the sizes the tests use.
struct RationalProb {
    double numerator;
    double denominator;
    double value() const { return numerator / denominator; }
};

inline RationalProb full_rank_probability_exhaustive(unsigned n, unsigned k, unsigned q) {
    uint64_t cells = uint64_t(n) * k;
    uint64_t total = 1;
    for (uint64_t i = 0; i < cells; ++i) total *= q;
    uint64_t full = 0;
    std::vector<std::vector<uint8_t>> rows(n, std::vector<uint8_t>(k, 0));
    for (uint64_t code = 0; code < total; ++code) {
        uint64_t v = code;
        for (unsigned r = 0; r < n; ++r)
            for (unsigned c = 0; c < k; ++c) {
                rows[r][c] = static_cast<uint8_t>(v % q);
                v /= q;
            }
        if (matrix_rank(rows, q) == k) ++full;
    }
    return {double(full), double(total)};
}

// Normal-approximation frequency check: |observed/n - p| <= sigmas * sqrt(p(1-p)/n).
inline bool within_sigmas(double observed_count, double trials, double p, double sigmas) {
    const double se = std::sqrt(p * (1.0 - p) / trials);
    return std::abs(observed_count / trials - p) <= sigmas * se;
}

// Upper critical value of the chi-square distribution by the Wilson-Hilferty
// approximation; plenty for the goodness-of-fit gates used here.
inline double chi2_critical(double dof, double z) {
    const double a = 2.0 / (9.0 * dof);
    const double t = 1.0 - a + z * std::sqrt(a);
    return dof * t * t * t;
}

inline constexpr double kZ999 = 3.090232306;  // Phi^-1(0.999)

}  // namespace oracle
