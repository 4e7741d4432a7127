#include "cmcycles/modring.hpp"

namespace cmc {

const char* errc_name(errc c) {
    switch (c) {
        case errc::inert_prime: return "InertPrime";
        case errc::ramified_prime: return "RamifiedPrime";
        case errc::non_residue: return "NonResidue";
        case errc::zero_divisor: return "ZeroDivisor";
        case errc::precision_exceeded: return "PrecisionExceeded";
        case errc::non_unit_slope: return "NonUnitSlope";
        case errc::two_torsion: return "TwoTorsion";
        case errc::unsupported_d: return "UnsupportedD";
        case errc::non_split_prime: return "NonSplitPrime";
        case errc::supersingular_fiber: return "SupersingularFiber";
        case errc::family_mismatch: return "FamilyMismatch";
        case errc::not_admissible: return "NotAdmissible";
        case errc::internal_ambiguity: return "InternalAmbiguity";
        case errc::oracle_too_large: return "OracleTooLarge";
        case errc::homogeneity_violation: return "HomogeneityViolation";
        case errc::not_a_torsion_residue: return "NotATorsionResidue";
        case errc::missing_second_digit: return "MissingSecondDigit";
        case errc::odd_negative_valuation: return "OddNegativeValuation";
        case errc::no_matching_root: return "NoMatchingRoot";
        case errc::branch_mismatch: return "BranchMismatch";
        case errc::not_split: return "NotSplit";
        case errc::degenerate_quadratic: return "DegenerateQuadratic";
        case errc::profile_too_large: return "ProfileTooLarge";
        case errc::generator_fails_criterion: return "GeneratorFailsCriterion";
        case errc::bad_point: return "BadPoint";
        case errc::cache_error: return "CacheError";
        case errc::parse_error: return "ParseError";
    }
    return "Error";
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (u64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

u64 pow_mod(u64 base, u64 exp, u64 mod) {
    u64 r = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) r = (u64)((u128)r * base % mod);
        base = (u64)((u128)base * base % mod);
        exp >>= 1;
    }
    return r;
}

u64 inv_mod(u64 a, u64 mod) {
    // Extended Euclid over signed 128-bit; valid for any unit a.
    long long r0 = (long long)mod, r1 = (long long)(a % mod);
    long long s0 = 0, s1 = 1;
    while (r1 != 0) {
        long long qt = r0 / r1;
        long long r2 = r0 - qt * r1;
        long long s2 = s0 - qt * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1) fail(errc::zero_divisor, "inverse of a non-unit");
    long long s = s0 % (long long)mod;
    if (s < 0) s += (long long)mod;
    return (u64)s;
}

int legendre(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    u64 t = pow_mod(a, (p - 1) / 2, p);
    return t == 1 ? 1 : -1;
}

std::optional<u64> sqrt_mod_prime(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    if (legendre(a, p) != 1) return std::nullopt;
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    // Tonelli-Shanks: p - 1 = q * 2^s with q odd.
    u64 q = p - 1;
    int s = 0;
    while (q % 2 == 0) { q /= 2; ++s; }
    u64 z = 2;
    while (legendre(z, p) != -1) ++z;
    u64 m = (u64)s;
    u64 c = pow_mod(z, q, p);
    u64 t = pow_mod(a, q, p);
    u64 r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 t2 = t;
        u64 i = 0;
        while (t2 != 1) { t2 = (u64)((u128)t2 * t2 % p); ++i; }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = (u64)((u128)b * b % p);
        m = i;
        c = (u64)((u128)b * b % p);
        t = (u64)((u128)t * c % p);
        r = (u64)((u128)r * b % p);
    }
    return r;
}

Zq::Zq(u64 p, int N) : p_(p), N_(N) {
    if (N < 1 || N > 16) fail(errc::precision_exceeded, "precision out of range");
    if (p < 3 || p > kMaxPrime || !is_prime_u64(p))
        fail(errc::precision_exceeded, "p must be an odd prime <= 8191");
    u128 q = 1;
    for (int i = 0; i <= N; ++i) {
        ppow_[i] = (u64)q;
        if (i < N) {
            q *= p;
            if (q >= ((u128)1 << 63))
                fail(errc::precision_exceeded, "p^N exceeds machine-word range");
        }
    }
    q_ = ppow_[N];
}

u64 Zq::pow_p(int k) const {
    if (k < 0 || k > N_) fail(errc::precision_exceeded, "p-power index out of range");
    return ppow_[k];
}

u64 Zq::reduce_ll(long long v) const {
    long long m = v % (long long)q_;
    if (m < 0) m += (long long)q_;
    return (u64)m;
}

u64 Zq::pow(u64 a, u64 e) const { return pow_mod(a, e, q_); }

u64 Zq::inv(u64 a) const {
    if (!is_unit(a)) fail(errc::zero_divisor, "inverse of a non-unit residue");
    return inv_mod(a, q_);
}

int Zq::val(u64 a) const {
    if (a == 0) return N_;
    int v = 0;
    while (a % p_ == 0) { a /= p_; ++v; }
    return v;
}

u64 Zq::div_pk(u64 a, int k) const {
    u64 pk = pow_p(k);
    if (a % pk != 0) fail(errc::zero_divisor, "inexact division by p^k");
    return a / pk;
}

u64 Zq::sqrt_unit(u64 c) const {
    c %= q_;
    if (c % p_ == 0) fail(errc::zero_divisor, "sqrt of a non-unit");
    auto r0 = sqrt_mod_prime(c % p_, p_);
    if (!r0) fail(errc::non_residue, "not a quadratic residue mod p");
    // Newton lift r -> (r + c/r) / 2, doubling correct digits each step.
    u64 r = *r0;
    int known = 1;
    u64 half = inv(2 % q_);
    while (known < N_) {
        r = mul(half, add(r, mul(c, inv(r))));
        known *= 2;
    }
    // Canonical choice: smaller residue mod p.
    if (r % p_ > p_ - (r % p_)) r = q_ - r;
    return r;
}

}  // namespace cmc
