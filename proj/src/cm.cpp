#include "cmcycles/cm.hpp"

#include <algorithm>

#include "cmcycles/parallel.hpp"

namespace cmc {

namespace {

mpz_class cm_j_invariant(long D) {
    switch (D) {
        case 1: return 1728;
        case 2: return 8000;
        case 3: return 0;
        case 7: return -3375;
        case 11: return -32768;
        case 19: return -884736;
        case 43: return mpz_class("-884736000");
        case 67: return mpz_class("-147197952000");
        case 163: return mpz_class("-262537412640768000");
        default: fail(errc::unsupported_d, "no class-number-1 field with this D");
    }
}

BigRat j_of(const BigRat& A, const BigRat& B) {
    BigRat disc = 4 * A * A * A + 27 * B * B;
    if (disc == 0) fail(errc::bad_point, "singular curve");
    return 1728 * 4 * A * A * A / disc;
}

}  // namespace

std::string CMFamily::shape() const {
    if (D == 1) return "y^2 = x^3 + a*x";
    if (D == 3) return "y^2 = x^3 + a";
    return "y^2 = x^3 + " + n.get_str() + "*a^2*x + " + m.get_str() + "*a^3";
}

std::pair<KNumber, KNumber> CMFamily::fiber_exact(const KNumber& a) const {
    QuadField K(D);
    if (a.is_zero()) fail(errc::bad_point, "fiber parameter must be nonzero");
    if (D == 1) return {a, KNumber(K, 0, 0)};
    if (D == 3) return {KNumber(K, 0, 0), a};
    KNumber nn = KNumber(K, BigRat(n), 0), mm = KNumber(K, BigRat(m), 0);
    return {nn * a * a, mm * a * a * a};
}

CurveFp CMFamily::fiber_fp(long p, u64 a0) const {
    u64 up = (u64)p;
    u64 a = a0 % up;
    if (a == 0) fail(errc::bad_point, "fiber parameter must be a unit");
    if (D == 1) return CurveFp(up, a, 0);
    if (D == 3) return CurveFp(up, 0, a);
    mpz_class np = n % p, mp = m % p;
    if (np < 0) np += p;
    if (mp < 0) mp += p;
    u64 a2 = (u64)((u128)a * a % up), a3 = (u64)((u128)a2 * a % up);
    return CurveFp(up, (u64)((u128)np.get_ui() * a2 % up), (u64)((u128)mp.get_ui() * a3 % up));
}

KNumber CMFamily::param_from_curve(const KNumber& A, const KNumber& B) const {
    QuadField K(D);
    if (D == 1) {
        if (!B.is_zero() || A.is_zero()) fail(errc::family_mismatch, "expected y^2 = x^3 + a*x");
        return A;
    }
    if (D == 3) {
        if (!A.is_zero() || B.is_zero()) fail(errc::family_mismatch, "expected y^2 = x^3 + a");
        return B;
    }
    if (A.is_zero() || B.is_zero()) fail(errc::family_mismatch, "zero coefficient outside D in {1,3}");
    // a = 3B / (2A(1728 - j)); exact whenever j(A, B) equals the CM j.
    BigRat sc(mpz_class(3), mpz_class(2) * (mpz_class(1728) - j));
    sc.canonicalize();
    KNumber a = KNumber(K, sc, 0) * B / A;
    auto [Af, Bf] = fiber_exact(a);
    if (!(Af == A) || !(Bf == B)) fail(errc::family_mismatch, "curve has the wrong j-invariant");
    return a;
}

CMFamily family(long D) {
    QuadField K(D);  // validates D
    CMFamily fam;
    fam.D = D;
    fam.w = D == 1 ? 2 : (D == 3 ? 3 : 1);
    fam.j = cm_j_invariant(D);
    if (D != 1 && D != 3) {
        mpz_class c = 1728 - fam.j;
        fam.n = 3 * fam.j * c;
        fam.m = 2 * fam.j * c * c;
        // Fibers at a = 1, 2 must be nonsingular with j constant.
        for (long a = 1; a <= 2; ++a) {
            BigRat A = BigRat(fam.n) * a * a, B = BigRat(fam.m) * a * a * a;
            if (j_of(A, B) != BigRat(fam.j)) fail(errc::internal_ambiguity, "family j drifted");
        }
    }
    return fam;
}

std::vector<QuadInt> unit_group(const QuadField& K) {
    QuadInt one = QuadInt::one(K);
    std::vector<QuadInt> us = {one, -one};
    if (K.D() == 1) {
        QuadInt i(K, 0, 2);
        us.push_back(i);
        us.push_back(-i);
    } else if (K.D() == 3) {
        QuadInt w(K, 1, 1);  // (1 + sqrt(-3))/2, a sixth root of unity
        QuadInt w2 = w * w;
        us.insert(us.end(), {w, -w, w2, -w2});
    }
    return us;
}

bool splits(long D, long p) {
    if (p < 3 || !is_prime_u64((u64)p)) return false;
    if (D % p == 0) return false;
    return legendre((u64)(((-D) % p + p) % p), (u64)p) == 1;
}

std::vector<u64> admissible_residues(long D, long p) {
    QuadField K(D);
    if (p < 5 || !splits(D, p)) fail(errc::non_split_prime, "p must be >= 5 and split in K");
    CMFamily fam = family(D);
    std::vector<u64> out;
    for (u64 a0 = 1; a0 < (u64)p; ++a0) {
        try {
            CurveFp C = fam.fiber_fp(p, a0);
            if (count_points(C) % (u64)p == 0) out.push_back(a0);
        } catch (const Error& e) {
            if (e.code() != errc::bad_point) throw;  // singular fiber: skip
        }
    }
    return out;
}

namespace {

std::vector<long> admissible_primes_by_norm(long D, long pmax) {
    std::vector<long> out;
    if (D == 1) {
        // Even traces rule out order p; the cofactor-2 analysis leaves p = 5.
        if (pmax >= 5) out.push_back(5);
        return out;
    }
    if (D == 2 || D == 7) return out;
    // Order exactly p needs a trace-1 element: 4p = 1 + D c^2, c odd.
    for (long c = 1; 1 + D * c * c <= 4 * pmax; c += 2) {
        long num = 1 + D * c * c;
        if (num % 4 != 0) continue;
        long q = num / 4;
        if (q >= 5 && is_prime_u64((u64)q)) out.push_back(q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<long> admissible_primes_by_scan(long D, long pmax, int jobs) {
    std::vector<long> candidates;
    for (long p = 5; p <= pmax; ++p)
        if (splits(D, p)) candidates.push_back(p);
    auto hits = parallel_map(
        candidates, [&](long p) { return !admissible_residues(D, p).empty(); }, jobs);
    std::vector<long> out;
    for (size_t i = 0; i < candidates.size(); ++i)
        if (hits[i]) out.push_back(candidates[i]);
    return out;
}

}  // namespace

std::vector<long> admissible_primes(long D, long pmax, int jobs) {
    QuadField K(D);
    if (pmax > (long)kMaxPrime) fail(errc::precision_exceeded, "pmax above machine-word bound");
    auto fast = admissible_primes_by_norm(D, pmax);
    auto scan = admissible_primes_by_scan(D, pmax, jobs);
    if (fast != scan)
        fail(errc::internal_ambiguity, "norm-equation and residue-scan prime lists disagree");
    return fast;
}

AdmissibleTuple make_admissible_tuple(long D, long p, u64 a0) {
    CMFamily fam = family(D);
    CurveFp C = fam.fiber_fp(p, a0);
    u64 M = count_points(C);
    if (p < 5 || !splits(D, p) || M % (u64)p != 0)
        fail(errc::not_admissible, "p does not divide the fiber order");
    long d = (long)(M / (u64)p);
    if (d != 1 && d != 2) fail(errc::internal_ambiguity, "cofactor outside the classification");
    return AdmissibleTuple{D, p, a0, d};
}

SplitPrime orient_frobenius(const CurveFp& fiber, const SplitPrime& sp,
                            std::optional<long> a0) {
    long p = sp.p;
    u64 M = count_points(fiber);
    long t = p + 1 - (long)M;
    if (t % p == 0) fail(errc::supersingular_fiber, "p divides the Frobenius trace");
    std::optional<QuadInt> frob;
    for (const QuadInt& u : unit_group(sp.K)) {
        QuadInt cand = u * sp.pi;
        if (cand.trace() == t) { frob = cand; break; }
    }
    if (!frob)
        fail(errc::internal_ambiguity, "no associate of pi matches the Frobenius trace");
    if (frob->norm() != p || pi_valuation(*frob, sp) != 1 ||
        pi_valuation(frob->conj(), sp) != 0)
        fail(errc::internal_ambiguity, "Frobenius orientation failed its invariants");
    SplitPrime out = sp;
    out.frob_trace = t;
    out.a0 = a0;
    out.frob = *frob;
    out.etale = frob->conj();
    return out;
}

u64 etale_unit(const SplitPrime& sp, int k) {
    if (!sp.etale) fail(errc::internal_ambiguity, "split prime lacks Frobenius orientation");
    PadicNum e = embed_quad(*sp.etale, sp, k);
    if (e.val() != 0) fail(errc::internal_ambiguity, "etale generator embedded with valuation");
    return *e.residue_mod(k);
}

}  // namespace cmc
