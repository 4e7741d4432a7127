#pragma once

#include <string>
#include <vector>

#include "cmcycles/cm.hpp"
#include "cmcycles/curve.hpp"

namespace cmc {

// x-coordinates of the etale p-torsion, each known as x0 + x1*p (mod p^2).
struct TorsionRoot {
    u64 x0 = 0, x1 = 0;
    bool operator==(const TorsionRoot& o) const { return x0 == o.x0 && x1 == o.x1; }
    bool operator<(const TorsionRoot& o) const { return x0 < o.x0 || (x0 == o.x0 && x1 < o.x1); }
};

struct TorsionTable {
    long D = 0;
    long p = 0;
    u64 A3 = 0, B3 = 0;  // curve coefficients mod p^3
    long d = 1;          // prime-to-p cofactor of the fiber order
    u64 pibar_unit = 0;  // embedded etale generator mod p^2
    std::vector<TorsionRoot> roots;  // sorted by x0; exactly (p-1)/2 entries

    bool operator==(const TorsionTable& o) const;
    // The root whose residue matches x0 (mod p), if any.
    std::optional<TorsionRoot> root_above(u64 x0_mod_p) const;
    std::string to_json() const;
    static TorsionTable from_json(const std::string& text);
};

// The weighted-homogeneous two-variable kernel polynomial mod p^2:
//   Phi(x, a) = sum_k coeffs[k] * x^(e - w k) * a^k,  e = (p-1)/2,
// with coeffs[0] the embedded etale generator.
struct KernelPoly {
    long D = 0;
    long p = 0;
    int w = 1;
    u64 pibar_unit = 0;
    std::vector<u64> coeffs;  // mod p^2, k = 0 .. floor(e / w)

    long x_degree() const { return (p - 1) / 2; }
    // Phi(x, a) mod p^k for k in {1, 2}.
    u64 eval(u64 x, u64 a, int k) const;
    u64 eval_dx(u64 x, u64 a) const;  // d/dx mod p
    u64 eval_da(u64 x, u64 a) const;  // d/da mod p
    bool operator==(const KernelPoly& o) const;
    std::string to_json() const;
    static KernelPoly from_json(const std::string& text);
};

// Compute the x-coordinates of the etale p-torsion to O(p^2) by group
// lifting: an order-p point of the reduction supplies the residues; the
// unique second digit above each residue is the one whose y-lift passes
// the order-p test mod p^3. Requires an oriented split prime.
// Errors: not_admissible; internal_ambiguity if the digit is not unique.
TorsionTable etale_torsion_x(const CurveRing& C, const SplitPrime& sp, long d, int jobs = 1);

// Independent oracle: enumerate every x in Z/p^3 with a y-lift, keep the
// points passing the order-p test above exact-order-p reductions, truncate
// mod p^2. Must equal etale_torsion_x as a set. Errors: oracle_too_large
// for p > 13.
TorsionTable brute_force_torsion_x(const CurveRing& C, const SplitPrime& sp, long d);

// Recover Phi(x, a) mod p^2 from one fiber's torsion table via weighted
// homogeneity: c_k = pibar * [coeff of x^(e-wk) in prod(x - r_i)] / a^k.
// Asserts that every off-weight elementary symmetric function of the
// roots vanishes mod p^2 (homogeneity_violation otherwise).
KernelPoly reconstruct_family_poly(const TorsionTable& table, const KNumber& a,
                                   const SplitPrime& sp, const CMFamily& fam);

// Phi(b0,a0)/p + b1 dPhi/dx(b0,a0) + a1 dPhi/da(b0,a0) mod p.
// Errors: not_a_torsion_residue when p does not divide Phi(b0, a0).
u64 taylor_criterion_value(const KernelPoly& kp, u64 b0, u64 b1, u64 a0, u64 a1);

// Specialization Phi(x, a_src) mod p^2 divides psi_p with zero remainder;
// exposed for the property suites.
bool kernel_divides_division_poly(const KernelPoly& kp, const TorsionTable& table,
                                  const KNumber& a, const SplitPrime& sp);

}  // namespace cmc
