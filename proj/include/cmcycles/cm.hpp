#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmcycles/arith.hpp"
#include "cmcycles/curve.hpp"

namespace cmc {

// The one-parameter family y^2 = f_a(x) of curves with CM by O_K:
//   x^3 + a x          (D = 1)
//   x^3 + a            (D = 3)
//   x^3 + n a^2 x + m a^3   otherwise,
// with (n, m) = (3 j (1728 - j), 2 j (1728 - j)^2) for the CM j-invariant.
struct CMFamily {
    long D;
    int w;  // |O_K^x| / 2: 2 for D=1, 3 for D=3, 1 otherwise
    mpz_class j;
    mpz_class n, m;  // unused for D in {1, 3}

    std::string shape() const;
    // Exact fiber coefficients at parameter a.
    std::pair<KNumber, KNumber> fiber_exact(const KNumber& a) const;
    CurveFp fiber_fp(long p, u64 a0) const;
    // Recover the parameter from fiber coefficients; throws family_mismatch
    // when (A, B) is not a fiber of this family.
    KNumber param_from_curve(const KNumber& A, const KNumber& B) const;
};

CMFamily family(long D);

// All units of O_K (2, 4, or 6 of them).
std::vector<QuadInt> unit_group(const QuadField& K);

bool splits(long D, long p);

// Ascending residues a0 in F_p^* whose fiber order is divisible by p.
// Errors: non_split_prime.
std::vector<u64> admissible_residues(long D, long p);

// Ascending primes 5 <= p <= pmax admitting an admissible tuple. Uses the
// trace-1 norm equation 4p = 1 + D c^2 (plus the lone cofactor-2 case at
// (D=1, p=5)) and cross-checks against the exhaustive residue scan.
std::vector<long> admissible_primes(long D, long pmax, int jobs = 1);

struct AdmissibleTuple {
    long D;
    long p;
    u64 a0;
    long d;  // prime-to-p cofactor of the fiber order: 2 at (D=1, p=5), else 1
};

// Classify (D, p, a0); throws not_admissible if p does not divide the
// fiber order.
AdmissibleTuple make_admissible_tuple(long D, long p, u64 a0);

// Attach the Frobenius orientation to a split prime: find the associate
// of pi whose trace t satisfies |fiber(F_p)| = p + 1 - t, and record which
// generator is etale. Errors: supersingular_fiber when p | t.
SplitPrime orient_frobenius(const CurveFp& fiber, const SplitPrime& sp,
                            std::optional<long> a0 = std::nullopt);

// Embedded unit of the etale generator mod p^k (requires orientation).
u64 etale_unit(const SplitPrime& sp, int k);

}  // namespace cmc
