#include "core/hash128.hpp"

namespace permap {

namespace {

// 128-bit multiply modulo 2^128 using 64-bit limbs.
Hash128 mul128(const Hash128& a, const Hash128& b) {
    const std::uint64_t a_lo_lo = a.lo & 0xffffffffULL;
    const std::uint64_t a_lo_hi = a.lo >> 32;
    const std::uint64_t b_lo_lo = b.lo & 0xffffffffULL;
    const std::uint64_t b_lo_hi = b.lo >> 32;

    const std::uint64_t p0 = a_lo_lo * b_lo_lo;
    const std::uint64_t p1 = a_lo_lo * b_lo_hi;
    const std::uint64_t p2 = a_lo_hi * b_lo_lo;
    const std::uint64_t p3 = a_lo_hi * b_lo_hi;

    const std::uint64_t mid = (p0 >> 32) + (p1 & 0xffffffffULL) + (p2 & 0xffffffffULL);
    const std::uint64_t lo = (p0 & 0xffffffffULL) | (mid << 32);
    const std::uint64_t carry = p3 + (p1 >> 32) + (p2 >> 32) + (mid >> 32);

    Hash128 r;
    r.lo = lo;
    r.hi = carry + a.lo * b.hi + a.hi * b.lo;
    return r;
}

} // namespace

Hash128 fnv1a_128(std::string_view data) {
    // FNV-1a 128-bit offset basis and prime.
    Hash128 h{0x6c62272e07bb0142ULL, 0x62b821756295c58dULL};
    const Hash128 prime{0x0000000001000000ULL, 0x000000000000013bULL};
    for (unsigned char c : data) {
        h.lo ^= c;
        h = mul128(h, prime);
    }
    return h;
}

std::string to_hex(const Hash128& h) {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; ++i) {
        out[15 - i] = digits[(h.hi >> (i * 4)) & 0xf];
        out[31 - i] = digits[(h.lo >> (i * 4)) & 0xf];
    }
    return out;
}

} // namespace permap
