#include "cmcycles/curve.hpp"

#include <algorithm>

namespace cmc {

CurveFp::CurveFp(u64 p, u64 A, u64 B) : p_(p), A_(A % p), B_(B % p) {
    if (!is_prime_u64(p) || p < 3 || p > kMaxPrime)
        fail(errc::precision_exceeded, "p must be an odd prime <= 8191");
    // disc = -16(4A^3 + 27B^2) must be nonzero mod p.
    u64 d = ((u128)4 * A_ % p * A_ % p * A_ + (u128)27 * B_ % p * B_) % p;
    if (d == 0) fail(errc::bad_point, "singular curve mod p");
}

u64 CurveFp::f(u64 x) const {
    x %= p_;
    return (u64)(((u128)x * x % p_ * x + (u128)A_ * x + B_) % p_);
}

bool CurveFp::on_curve(const PointFp& P) const {
    if (P.inf) return true;
    return (u64)((u128)P.y * P.y % p_) == f(P.x);
}

PointFp CurveFp::neg(const PointFp& P) const {
    if (P.inf) return P;
    return PointFp::affine(P.x, P.y == 0 ? 0 : p_ - P.y);
}

PointFp CurveFp::add(const PointFp& P, const PointFp& Q) const {
    if (P.inf) return Q;
    if (Q.inf) return P;
    u64 lam;
    if (P.x == Q.x) {
        if ((P.y + Q.y) % p_ == 0) return PointFp::infinity();
        // P == Q with y != 0: tangent slope.
        u64 num = (u64)(((u128)3 * P.x % p_ * P.x + A_) % p_);
        lam = (u64)((u128)num * inv_mod(2 * P.y % p_, p_) % p_);
    } else {
        u64 dy = (Q.y + p_ - P.y) % p_;
        u64 dx = (Q.x + p_ - P.x) % p_;
        lam = (u64)((u128)dy * inv_mod(dx, p_) % p_);
    }
    u64 x3 = (u64)(((u128)lam * lam + 2 * p_ - P.x + p_ - Q.x) % p_);
    u64 y3 = (u64)(((u128)lam * ((P.x + p_ - x3) % p_) + p_ - P.y) % p_);
    return PointFp::affine(x3, y3);
}

PointFp CurveFp::dbl(const PointFp& P) const { return add(P, P); }

PointFp CurveFp::mul(u64 k, const PointFp& P) const {
    PointFp acc = PointFp::infinity();
    PointFp base = P;
    while (k) {
        if (k & 1) acc = add(acc, base);
        base = dbl(base);
        k >>= 1;
    }
    return acc;
}

u64 CurveFp::order_of(const PointFp& P, u64 group_order) const {
    if (P.inf) return 1;
    for (u64 d = 1; d <= group_order; ++d) {
        if (group_order % d != 0) continue;
        if (mul(d, P).inf) return d;
    }
    fail(errc::internal_ambiguity, "point order does not divide the group order");
}

u64 count_points(const CurveFp& C) {
    u64 p = C.p();
    // chi table via the set of nonzero squares.
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (u64 x = 1; x <= (p - 1) / 2; ++x) chi[(u64)((u128)x * x % p)] = 1;
    long long sum = 0;
    for (u64 x = 0; x < p; ++x) sum += chi[C.f(x)];
    return (u64)((long long)p + 1 + sum);
}

// ---------------------------------------------------------------------------

CurveRing::CurveRing(Zq R, u64 A, u64 B) : R_(std::move(R)), A_(A % R_.modulus()), B_(B % R_.modulus()) {
    u64 d = R_.add(R_.mul(4, R_.mul(A_, R_.mul(A_, A_))), R_.mul(27, R_.mul(B_, B_)));
    if (!R_.is_unit(d)) fail(errc::bad_point, "discriminant not a unit mod p");
}

u64 CurveRing::f(u64 x) const {
    return R_.add(R_.mul(x, R_.mul(x, x)), R_.add(R_.mul(A_, x), B_));
}

bool CurveRing::on_curve(const PointR& P) const {
    if (P.inf) return true;
    return R_.mul(P.y, P.y) == f(P.x);
}

CurveFp CurveRing::reduction() const {
    return CurveFp(R_.p(), A_ % R_.p(), B_ % R_.p());
}

PointR CurveRing::neg(const PointR& P) const {
    if (P.inf) return P;
    return PointR::affine(P.x, R_.neg(P.y));
}

PointR CurveRing::add(const PointR& P, const PointR& Q) const {
    if (P.inf) return Q;
    if (Q.inf) return P;
    if (P.x == Q.x) {
        if (R_.add(P.y, Q.y) == 0) return PointR::infinity();
        if (P.y == Q.y) return dbl(P);
        fail(errc::non_unit_slope, "distinct points sharing an x-coordinate mod p^N");
    }
    u64 dx = R_.sub(Q.x, P.x);
    if (!R_.is_unit(dx))
        fail(errc::non_unit_slope, "chord slope denominator not a unit (points collide mod p)");
    u64 lam = R_.mul(R_.sub(Q.y, P.y), R_.inv(dx));
    u64 x3 = R_.sub(R_.sub(R_.mul(lam, lam), P.x), Q.x);
    u64 y3 = R_.sub(R_.mul(lam, R_.sub(P.x, x3)), P.y);
    return PointR::affine(x3, y3);
}

PointR CurveRing::dbl(const PointR& P) const {
    if (P.inf) return P;
    if (P.y == 0) return PointR::infinity();  // exact 2-torsion
    if (!R_.is_unit(P.y))
        fail(errc::non_unit_slope, "doubling a point whose y is not a unit");
    u64 num = R_.add(R_.mul(3, R_.mul(P.x, P.x)), A_);
    u64 lam = R_.mul(num, R_.inv(R_.mul(2, P.y)));
    u64 x3 = R_.sub(R_.sub(R_.mul(lam, lam), P.x), P.x);
    u64 y3 = R_.sub(R_.mul(lam, R_.sub(P.x, x3)), P.y);
    return PointR::affine(x3, y3);
}

PointR CurveRing::mul(u64 k, const PointR& P) const {
    if (k == 0 || P.inf) return PointR::infinity();
    int top = 63;
    while (top > 0 && !((k >> top) & 1)) --top;
    PointR acc = P;
    for (int i = top - 1; i >= 0; --i) {
        acc = dbl(acc);
        if ((k >> i) & 1) acc = add(acc, P);
    }
    return acc;
}

PointR lift_point(const PointFp& Pbar, const CurveRing& C) {
    if (Pbar.inf) return PointR::infinity();
    const Zq& R = C.ring();
    if (Pbar.y == 0) fail(errc::two_torsion, "cannot Hensel-lift a 2-torsion point");
    u64 c = C.f(Pbar.x);
    // Newton on y^2 - c with seed y0 = Pbar.y (a unit).
    u64 y = Pbar.y % R.modulus();
    u64 half = R.inv(2 % R.modulus());
    int known = 1;
    while (known < R.N()) {
        y = R.mul(half, R.add(y, R.mul(c, R.inv(y))));
        known *= 2;
    }
    return PointR::affine(Pbar.x % R.modulus(), y);
}

bool order_p_test(const CurveRing& C, const PointR& P) {
    const Zq& R = C.ring();
    if (R.N() != 3) fail(errc::precision_exceeded, "order test is fixed at N = 3");
    u64 p = R.p();
    PointR Q1 = C.mul((p - 1) / 2, P);
    PointR Q2 = C.mul((p + 1) / 2, P);
    if (Q1.inf || Q2.inf) return false;  // reduction order was not exactly p
    return Q1.x == Q2.x && Q1.y == R.neg(Q2.y);
}

// ---------------------------------------------------------------------------
// Division polynomials.

namespace {

template <class Ring>
using Coeffs = std::vector<typename Ring::value_type>;

template <class Ring>
Coeffs<Ring> ptrim(const Ring& ring, Coeffs<Ring> a) {
    while (!a.empty() && ring.is_zero(a.back())) a.pop_back();
    return a;
}

template <class Ring>
Coeffs<Ring> pmul(const Ring& ring, const Coeffs<Ring>& a, const Coeffs<Ring>& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs<Ring> c(a.size() + b.size() - 1, ring.zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (ring.is_zero(a[i])) continue;
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = ring.add(c[i + j], ring.mul(a[i], b[j]));
    }
    return ptrim(ring, std::move(c));
}

template <class Ring>
Coeffs<Ring> psub(const Ring& ring, const Coeffs<Ring>& a, const Coeffs<Ring>& b) {
    Coeffs<Ring> c(std::max(a.size(), b.size()), ring.zero());
    for (size_t i = 0; i < c.size(); ++i) {
        auto av = i < a.size() ? a[i] : ring.zero();
        auto bv = i < b.size() ? b[i] : ring.zero();
        c[i] = ring.sub(av, bv);
    }
    return ptrim(ring, std::move(c));
}

template <class Ring>
Coeffs<Ring> phalf(const Ring& ring, Coeffs<Ring> a) {
    for (auto& c : a) c = ring.half(c);
    return a;
}

}  // namespace

// psi_m with y eliminated: stores E_m where psi_m = E_m for m odd and
// psi_m = y * E_m for m even (so E_2 = 2).
template <class Ring>
std::vector<typename Ring::value_type> division_poly(long m, const typename Ring::value_type& A,
                                                     const typename Ring::value_type& B,
                                                     const Ring& ring) {
    if (m < 1 || m % 2 == 0) fail(errc::parse_error, "division_poly expects odd m >= 1");
    using P = Coeffs<Ring>;
    const P fpoly = ptrim(ring, P{B, A, ring.zero(), ring.one()});  // x^3 + Ax + B
    const P f2 = pmul(ring, fpoly, fpoly);

    std::vector<P> E((size_t)std::max<long>(m + 3, 5));
    E[0] = {};
    E[1] = {ring.one()};
    E[2] = {ring.from_long(2)};
    {
        auto A2 = ring.mul(A, A);
        E[3] = ptrim(ring, P{ring.sub(ring.zero(), A2), ring.mul(ring.from_long(12), B),
                             ring.mul(ring.from_long(6), A), ring.zero(), ring.from_long(3)});
        auto AB = ring.mul(A, B);
        auto B2 = ring.mul(B, B);
        auto A3 = ring.mul(A2, A);
        P e4 = {ring.sub(ring.sub(ring.zero(), ring.mul(ring.from_long(8), B2)), A3),
                ring.sub(ring.zero(), ring.mul(ring.from_long(4), AB)),
                ring.sub(ring.zero(), ring.mul(ring.from_long(5), A2)),
                ring.mul(ring.from_long(20), B),
                ring.mul(ring.from_long(5), A),
                ring.zero(),
                ring.one()};
        for (auto& c : e4) c = ring.mul(c, ring.from_long(4));
        E[4] = ptrim(ring, std::move(e4));
    }
    for (long k = 5; k <= m + 2 && k <= (long)E.size() - 1; ++k) {
        long r = k / 2;
        if (k % 2 == 1) {
            P t1 = pmul(ring, E[(size_t)r + 2], pmul(ring, E[(size_t)r], pmul(ring, E[(size_t)r], E[(size_t)r])));
            P t2 = pmul(ring, E[(size_t)r - 1],
                        pmul(ring, E[(size_t)r + 1], pmul(ring, E[(size_t)r + 1], E[(size_t)r + 1])));
            if (r % 2 == 0)
                E[(size_t)k] = psub(ring, pmul(ring, f2, t1), t2);
            else
                E[(size_t)k] = psub(ring, t1, pmul(ring, f2, t2));
        } else {
            P t1 = pmul(ring, E[(size_t)r + 2], pmul(ring, E[(size_t)r - 1], E[(size_t)r - 1]));
            P t2 = pmul(ring, E[(size_t)r - 2], pmul(ring, E[(size_t)r + 1], E[(size_t)r + 1]));
            E[(size_t)k] = phalf(ring, pmul(ring, E[(size_t)r], psub(ring, t1, t2)));
        }
    }
    return E[(size_t)m];
}

template std::vector<u64> division_poly<RingZqAdapter>(long, const u64&, const u64&,
                                                       const RingZqAdapter&);
template std::vector<BigRat> division_poly<RingQAdapter>(long, const BigRat&, const BigRat&,
                                                         const RingQAdapter&);
template std::vector<KNumber> division_poly<RingKAdapter>(long, const KNumber&, const KNumber&,
                                                          const RingKAdapter&);

// ---------------------------------------------------------------------------
// Dense Zq polynomial helpers.

ZqPoly poly_trim(const Zq&, ZqPoly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

long poly_degree(const ZqPoly& a) { return (long)a.size() - 1; }

ZqPoly poly_add(const Zq& R, const ZqPoly& a, const ZqPoly& b) {
    ZqPoly c(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < c.size(); ++i)
        c[i] = R.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    return poly_trim(R, std::move(c));
}

ZqPoly poly_sub(const Zq& R, const ZqPoly& a, const ZqPoly& b) {
    ZqPoly c(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < c.size(); ++i)
        c[i] = R.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    return poly_trim(R, std::move(c));
}

ZqPoly poly_mul(const Zq& R, const ZqPoly& a, const ZqPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZqPoly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) c[i + j] = R.add(c[i + j], R.mul(a[i], b[j]));
    }
    return poly_trim(R, std::move(c));
}

ZqPoly poly_scale(const Zq& R, u64 c, const ZqPoly& a) {
    ZqPoly r = a;
    for (auto& x : r) x = R.mul(x, c);
    return poly_trim(R, std::move(r));
}

u64 poly_eval(const Zq& R, const ZqPoly& a, u64 x) {
    u64 r = 0;
    for (size_t i = a.size(); i-- > 0;) r = R.add(R.mul(r, x), a[i]);
    return r;
}

std::pair<ZqPoly, ZqPoly> poly_divrem(const Zq& R, const ZqPoly& a, const ZqPoly& b) {
    ZqPoly rem = poly_trim(R, a);
    ZqPoly bb = poly_trim(R, b);
    if (bb.empty()) fail(errc::zero_divisor, "polynomial division by zero");
    if (!R.is_unit(bb.back()))
        fail(errc::zero_divisor, "divisor leading coefficient is not a unit");
    u64 lead_inv = R.inv(bb.back());
    if (rem.size() < bb.size()) return {{}, rem};
    ZqPoly quot(rem.size() - bb.size() + 1, 0);
    for (size_t shift = quot.size(); shift-- > 0;) {
        u64 c = R.mul(rem[shift + bb.size() - 1], lead_inv);
        if (c == 0) continue;
        quot[shift] = c;
        for (size_t j = 0; j < bb.size(); ++j)
            rem[shift + j] = R.sub(rem[shift + j], R.mul(c, bb[j]));
    }
    return {poly_trim(R, std::move(quot)), poly_trim(R, std::move(rem))};
}

}  // namespace cmc
