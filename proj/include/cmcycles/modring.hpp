#pragma once

#include <cstdint>
#include <optional>

#include "cmcycles/errors.hpp"

namespace cmc {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Largest prime accepted for machine-word residue arithmetic. Every
// computation in this artifact has p < 1000; the bound leaves headroom
// while keeping p^N products inside 128-bit intermediates.
inline constexpr u64 kMaxPrime = 8191;

bool is_prime_u64(u64 n);
u64 pow_mod(u64 base, u64 exp, u64 mod);
u64 inv_mod(u64 a, u64 mod);  // a must be a unit
// Legendre symbol (a|p) in {-1,0,1} for odd prime p.
int legendre(u64 a, u64 p);
// Square root mod an odd prime, if one exists (generic Tonelli-Shanks).
std::optional<u64> sqrt_mod_prime(u64 a, u64 p);

// The ring Z/p^N for an odd prime p, with all elements stored as u64.
// Rejects parameters whose modulus would not fit in 63 bits, so every
// product of two reduced elements fits in a u128 exactly.
class Zq {
public:
    Zq(u64 p, int N);

    u64 p() const { return p_; }
    int N() const { return N_; }
    u64 modulus() const { return q_; }
    u64 pow_p(int k) const;  // p^k for 0 <= k <= N

    u64 reduce_ll(long long v) const;
    u64 add(u64 a, u64 b) const { return sub_raw(add_raw(a, b), q_); }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }
    u64 mul(u64 a, u64 b) const { return (u64)((u128)a * b % q_); }
    u64 pow(u64 a, u64 e) const;
    // Inverse of a unit; throws zero_divisor otherwise.
    u64 inv(u64 a) const;
    bool is_unit(u64 a) const { return a % p_ != 0; }

    // p-adic valuation of the representative, capped at N (val(0) = N).
    int val(u64 a) const;
    // a / p^k, requiring p^k | a.
    u64 div_pk(u64 a, int k) const;
    // Truncate to k digits: a mod p^k.
    u64 trunc(u64 a, int k) const { return a % pow_p(k); }

    // Square root of a unit c with (c mod p | p) = 1, lifted to mod p^N.
    // Deterministic: of the two roots r, q - r, returns the one whose
    // residue mod p is smaller. Throws non_residue / zero_divisor.
    u64 sqrt_unit(u64 c) const;

private:
    u64 add_raw(u64 a, u64 b) const { return a + b; }
    static u64 sub_raw(u64 a, u64 q) { return a >= q ? a - q : a; }
    u64 p_;
    int N_;
    u64 q_;
    u64 ppow_[17];
};

}  // namespace cmc
