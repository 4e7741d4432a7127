#pragma once

#include <vector>

#include "cmcycles/arith.hpp"
#include "cmcycles/modring.hpp"

namespace cmc {

// ---------------------------------------------------------------------------
// Curves over F_p (short Weierstrass y^2 = x^3 + Ax + B, good reduction).

struct PointFp {
    u64 x = 0, y = 0;
    bool inf = true;
    static PointFp infinity() { return {}; }
    static PointFp affine(u64 x, u64 y) { return {x, y, false}; }
    bool operator==(const PointFp& o) const {
        return inf == o.inf && (inf || (x == o.x && y == o.y));
    }
};

class CurveFp {
public:
    CurveFp(u64 p, u64 A, u64 B);
    u64 p() const { return p_; }
    u64 A() const { return A_; }
    u64 B() const { return B_; }
    u64 f(u64 x) const;  // x^3 + Ax + B
    bool on_curve(const PointFp& P) const;

    PointFp neg(const PointFp& P) const;
    PointFp add(const PointFp& P, const PointFp& Q) const;
    PointFp dbl(const PointFp& P) const;
    PointFp mul(u64 k, const PointFp& P) const;
    u64 order_of(const PointFp& P, u64 group_order) const;

private:
    u64 p_, A_, B_;
};

// |E(F_p)| by the quadratic character sum: p + 1 + sum_x chi(f(x)).
u64 count_points(const CurveFp& C);

// ---------------------------------------------------------------------------
// Curves over Z/p^N.

struct PointR {
    u64 x = 0, y = 0;
    bool inf = true;
    static PointR infinity() { return {}; }
    static PointR affine(u64 x, u64 y) { return {x, y, false}; }
    bool operator==(const PointR& o) const {
        return inf == o.inf && (inf || (x == o.x && y == o.y));
    }
};

class CurveRing {
public:
    CurveRing(Zq R, u64 A, u64 B);
    const Zq& ring() const { return R_; }
    u64 A() const { return A_; }
    u64 B() const { return B_; }
    u64 f(u64 x) const;
    bool on_curve(const PointR& P) const;
    CurveFp reduction() const;

    PointR neg(const PointR& P) const;
    // Affine chord addition. The slope denominator must be a unit: adding
    // two points that collide mod p (other than exact doubling / exact
    // inverse) raises non_unit_slope instead of silently wrapping.
    PointR add(const PointR& P, const PointR& Q) const;
    PointR dbl(const PointR& P) const;
    // Double-and-add. Safe whenever the base point reduces to a point of
    // exact odd order n mod p and k <= (n+1)/2: the chain only ever adds
    // [m]P + P with 2 <= m <= (n-1)/2, and m == +-1 (mod n) is impossible
    // in that range, so no chord step collides mod p; doubling steps are
    // safe because an odd-order reduction has unit y.
    PointR mul(u64 k, const PointR& P) const;

private:
    Zq R_;
    u64 A_, B_;
};

// Hensel lift of a mod-p point: keeps the integer representative of x and
// lifts y to mod p^N. Requires y != 0 mod p (throws two_torsion).
PointR lift_point(const PointFp& Pbar, const CurveRing& C);

// Whether [p]P = O in E(Z/p^3). Correctness: E(Z/p^3) sits in an extension
// of E(F_p) by the formal kernel, which at level p^3 is cyclic of order
// p^2. A point whose reduction has exact order p therefore has order p
// iff [(p+1)/2]P = -[(p-1)/2]P; both multiples stay inside the safe
// addition-chain range, so every slope is a unit. Requires N = 3.
bool order_p_test(const CurveRing& C, const PointR& P);

// ---------------------------------------------------------------------------
// Division polynomials. Coefficients over any commutative ring presented
// by a small adapter (see RingZqAdapter / RingQAdapter below).

template <class Ring>
std::vector<typename Ring::value_type> division_poly(long m, const typename Ring::value_type& A,
                                                     const typename Ring::value_type& B,
                                                     const Ring& ring);

struct RingZqAdapter {
    using value_type = u64;
    const Zq* R;
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type from_long(long v) const { return R->reduce_ll(v); }
    value_type add(value_type a, value_type b) const { return R->add(a, b); }
    value_type sub(value_type a, value_type b) const { return R->sub(a, b); }
    value_type mul(value_type a, value_type b) const { return R->mul(a, b); }
    bool is_zero(value_type a) const { return a == 0; }
    value_type half(value_type a) const { return R->mul(a, R->inv(2 % R->modulus())); }
};

struct RingQAdapter {
    using value_type = BigRat;
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type from_long(long v) const { return v; }
    value_type add(const value_type& a, const value_type& b) const { return a + b; }
    value_type sub(const value_type& a, const value_type& b) const { return a - b; }
    value_type mul(const value_type& a, const value_type& b) const { return a * b; }
    bool is_zero(const value_type& a) const { return a == 0; }
    value_type half(const value_type& a) const { return a / 2; }
};

struct RingKAdapter {
    using value_type = KNumber;
    const QuadField* K;
    value_type zero() const { return KNumber(*K, 0, 0); }
    value_type one() const { return KNumber(*K, 1, 0); }
    value_type from_long(long v) const { return KNumber(*K, v, 0); }
    value_type add(const value_type& a, const value_type& b) const { return a + b; }
    value_type sub(const value_type& a, const value_type& b) const { return a - b; }
    value_type mul(const value_type& a, const value_type& b) const { return a * b; }
    bool is_zero(const value_type& a) const { return a.is_zero(); }
    value_type half(const value_type& a) const {
        return KNumber(*K, a.u() / 2, a.v() / 2);
    }
};

// Dense polynomial helpers over Zq (coefficient index = degree).
using ZqPoly = std::vector<u64>;
ZqPoly poly_trim(const Zq& R, ZqPoly a);
long poly_degree(const ZqPoly& a);  // -1 for the zero polynomial
ZqPoly poly_add(const Zq& R, const ZqPoly& a, const ZqPoly& b);
ZqPoly poly_sub(const Zq& R, const ZqPoly& a, const ZqPoly& b);
ZqPoly poly_mul(const Zq& R, const ZqPoly& a, const ZqPoly& b);
ZqPoly poly_scale(const Zq& R, u64 c, const ZqPoly& a);
u64 poly_eval(const Zq& R, const ZqPoly& a, u64 x);
// Division by a divisor with unit leading coefficient.
std::pair<ZqPoly, ZqPoly> poly_divrem(const Zq& R, const ZqPoly& a, const ZqPoly& b);

}  // namespace cmc
