#include "cmcycles/torsion.hpp"

#include <algorithm>
#include <set>

#include "cmcycles/parallel.hpp"
#include "json.hpp"

namespace cmc {

namespace {

using nlohmann::json;

CurveRing truncate_to_n3(const CurveRing& C) {
    Zq R3(C.ring().p(), 3);
    return CurveRing(R3, C.A() % R3.modulus(), C.B() % R3.modulus());
}

// Deterministic order-p point on the reduction: first x (ascending) whose
// fiber point survives multiplication by the cofactor.
PointFp find_order_p_point(const CurveFp& Cbar, long d) {
    u64 p = Cbar.p();
    for (u64 x = 0; x < p; ++x) {
        u64 c = Cbar.f(x);
        if (c == 0) continue;  // 2-torsion
        if (legendre(c, p) != 1) continue;
        u64 y = *sqrt_mod_prime(c, p);
        y = std::min(y, p - y);
        PointFp G = Cbar.mul((u64)d, PointFp::affine(x, y));
        if (!G.inf) return G;
    }
    fail(errc::internal_ambiguity, "no order-p point found on the reduction");
}

void require_oriented(const SplitPrime& sp) {
    if (!sp.etale) fail(errc::internal_ambiguity, "split prime lacks Frobenius orientation");
}

u64 check_admissible(const CurveRing& C3, long d) {
    u64 M = count_points(C3.reduction());
    u64 p = C3.ring().p();
    if (M % p != 0 || M != (u64)d * p)
        fail(errc::not_admissible, "fiber order is not d*p");
    return M;
}

}  // namespace

bool TorsionTable::operator==(const TorsionTable& o) const {
    return D == o.D && p == o.p && A3 == o.A3 && B3 == o.B3 && d == o.d &&
           pibar_unit == o.pibar_unit && roots == o.roots;
}

std::optional<TorsionRoot> TorsionTable::root_above(u64 x0_mod_p) const {
    for (const auto& r : roots)
        if (r.x0 == x0_mod_p % (u64)p) return r;
    return std::nullopt;
}

TorsionTable etale_torsion_x(const CurveRing& C, const SplitPrime& sp, long d, int jobs) {
    require_oriented(sp);
    if (C.ring().N() < 3) fail(errc::precision_exceeded, "torsion lifting needs N >= 3");
    CurveRing C3 = truncate_to_n3(C);
    const Zq& R3 = C3.ring();
    u64 p = R3.p();
    check_admissible(C3, d);

    CurveFp Cbar = C3.reduction();
    PointFp G = find_order_p_point(Cbar, d);
    std::vector<u64> residues;
    PointFp Q = G;
    for (u64 k = 1; k <= (p - 1) / 2; ++k) {
        residues.push_back(Q.x);
        Q = Cbar.add(Q, G);
    }
    std::sort(residues.begin(), residues.end());

    auto scan_residue = [&](u64 x0) -> TorsionRoot {
        std::vector<u64> hits;
        for (u64 x1 = 0; x1 < p; ++x1) {
            u64 x = x0 + x1 * p;  // third digit 0; the order test ignores it
            u64 c = C3.f(x);
            u64 y = R3.sqrt_unit(c);
            if (order_p_test(C3, PointR::affine(x, y))) hits.push_back(x1);
        }
        if (hits.size() != 1)
            fail(errc::internal_ambiguity, "second digit above a residue is not unique");
        return TorsionRoot{x0, hits[0]};
    };
    auto roots = parallel_map(residues, scan_residue, jobs);

    TorsionTable t;
    t.D = sp.K.D();
    t.p = (long)p;
    t.A3 = C3.A();
    t.B3 = C3.B();
    t.d = d;
    t.pibar_unit = etale_unit(sp, 2);
    t.roots = std::move(roots);
    return t;
}

TorsionTable brute_force_torsion_x(const CurveRing& C, const SplitPrime& sp, long d) {
    require_oriented(sp);
    CurveRing C3 = truncate_to_n3(C);
    const Zq& R3 = C3.ring();
    u64 p = R3.p();
    if (p > 13) fail(errc::oracle_too_large, "brute-force oracle is limited to p <= 13");
    u64 M = check_admissible(C3, d);
    CurveFp Cbar = C3.reduction();

    std::set<TorsionRoot> found;
    for (u64 x = 0; x < R3.modulus(); ++x) {
        u64 c = C3.f(x);
        if (c % p == 0) continue;  // y not a unit: reduction is 2-torsion
        if (legendre(c % p, p) != 1) continue;
        u64 y = R3.sqrt_unit(c);
        PointFp Pbar = PointFp::affine(x % p, y % p);
        if (Cbar.order_of(Pbar, M) != p) continue;
        if (order_p_test(C3, PointR::affine(x, y)))
            found.insert(TorsionRoot{x % p, (x / p) % p});
    }

    TorsionTable t;
    t.D = sp.K.D();
    t.p = (long)p;
    t.A3 = C3.A();
    t.B3 = C3.B();
    t.d = d;
    t.pibar_unit = etale_unit(sp, 2);
    t.roots.assign(found.begin(), found.end());
    if (t.roots.size() != (p - 1) / 2)
        fail(errc::internal_ambiguity, "oracle found the wrong number of torsion residues");
    return t;
}

KernelPoly reconstruct_family_poly(const TorsionTable& table, const KNumber& a,
                                   const SplitPrime& sp, const CMFamily& fam) {
    Zq R2((u64)table.p, 2);
    u64 p = (u64)table.p;
    long e = (table.p - 1) / 2;
    PadicNum ae = embed_k(a, sp, 2);
    if (ae.is_zero_class() || ae.val() != 0)
        fail(errc::bad_point, "family parameter must be a unit at p");
    u64 a2 = *ae.residue_mod(2);

    // prod(x - r_i) mod p^2, ascending coefficients.
    ZqPoly prod = {1};
    for (const auto& r : table.roots) {
        u64 rv = R2.add(r.x0 % R2.modulus(), R2.mul(r.x1 % R2.modulus(), p));
        ZqPoly lin = {R2.neg(rv), 1};
        prod = poly_mul(R2, prod, lin);
    }
    for (long jj = 1; jj <= e; ++jj) {
        if (jj % fam.w == 0) continue;
        u64 cj = (size_t)(e - jj) < prod.size() ? prod[(size_t)(e - jj)] : 0;
        if (cj != 0)
            fail(errc::homogeneity_violation,
                 "off-weight symmetric function of the roots is nonzero mod p^2");
    }

    KernelPoly kp;
    kp.D = table.D;
    kp.p = table.p;
    kp.w = fam.w;
    kp.pibar_unit = table.pibar_unit;
    u64 ainv = R2.inv(a2);
    u64 apow = 1;
    for (long k = 0; k * fam.w <= e; ++k) {
        u64 coeff = (size_t)(e - k * fam.w) < prod.size() ? prod[(size_t)(e - k * fam.w)] : 0;
        kp.coeffs.push_back(R2.mul(table.pibar_unit, R2.mul(coeff, apow)));
        apow = R2.mul(apow, ainv);
    }
    return kp;
}

u64 KernelPoly::eval(u64 x, u64 a, int k) const {
    Zq R((u64)p, k);
    u64 acc = 0;
    long e = x_degree();
    for (size_t i = 0; i < coeffs.size(); ++i) {
        long xd = e - (long)i * w;
        u64 term = R.mul(coeffs[i] % R.modulus(), R.pow(x % R.modulus(), (u64)xd));
        term = R.mul(term, R.pow(a % R.modulus(), (u64)i));
        acc = R.add(acc, term);
    }
    return acc;
}

u64 KernelPoly::eval_dx(u64 x, u64 a) const {
    Zq R((u64)p, 1);
    u64 acc = 0;
    long e = x_degree();
    for (size_t i = 0; i < coeffs.size(); ++i) {
        long xd = e - (long)i * w;
        if (xd == 0) continue;
        u64 term = R.mul(coeffs[i] % R.modulus(), R.reduce_ll(xd));
        term = R.mul(term, R.pow(x % R.modulus(), (u64)(xd - 1)));
        term = R.mul(term, R.pow(a % R.modulus(), (u64)i));
        acc = R.add(acc, term);
    }
    return acc;
}

u64 KernelPoly::eval_da(u64 x, u64 a) const {
    Zq R((u64)p, 1);
    u64 acc = 0;
    long e = x_degree();
    for (size_t i = 1; i < coeffs.size(); ++i) {
        long xd = e - (long)i * w;
        u64 term = R.mul(coeffs[i] % R.modulus(), R.reduce_ll((long)i));
        term = R.mul(term, R.pow(x % R.modulus(), (u64)xd));
        term = R.mul(term, R.pow(a % R.modulus(), (u64)(i - 1)));
        acc = R.add(acc, term);
    }
    return acc;
}

bool KernelPoly::operator==(const KernelPoly& o) const {
    return D == o.D && p == o.p && w == o.w && pibar_unit == o.pibar_unit && coeffs == o.coeffs;
}

u64 taylor_criterion_value(const KernelPoly& kp, u64 b0, u64 b1, u64 a0, u64 a1) {
    u64 p = (u64)kp.p;
    u64 v2 = kp.eval(b0, a0, 2);
    if (v2 % p != 0)
        fail(errc::not_a_torsion_residue, "Phi(b0, a0) is not divisible by p");
    u64 lead = (v2 / p) % p;
    u64 t1 = (u64)((u128)(b1 % p) * kp.eval_dx(b0, a0) % p);
    u64 t2 = (u64)((u128)(a1 % p) * kp.eval_da(b0, a0) % p);
    return (lead + t1 + t2) % p;
}

bool kernel_divides_division_poly(const KernelPoly& kp, const TorsionTable& table,
                                  const KNumber& a, const SplitPrime& sp) {
    Zq R2((u64)kp.p, 2);
    PadicNum ae = embed_k(a, sp, 2);
    u64 a2 = *ae.residue_mod(2);
    // Specialize Phi at the source parameter.
    ZqPoly phi(kp.x_degree() + 1, 0);
    u64 apow = 1;
    long e = kp.x_degree();
    for (size_t i = 0; i < kp.coeffs.size(); ++i) {
        phi[(size_t)(e - (long)i * kp.w)] = R2.mul(kp.coeffs[i], apow);
        apow = R2.mul(apow, a2);
    }
    phi = poly_trim(R2, std::move(phi));
    RingZqAdapter ring{&R2};
    auto psi = division_poly(kp.p, table.A3 % R2.modulus(), table.B3 % R2.modulus(), ring);
    auto [q, r] = poly_divrem(R2, psi, phi);
    (void)q;
    return r.empty();
}

// ---------------------------------------------------------------------------
// Serialization.

std::string TorsionTable::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["type"] = "torsion_table";
    j["D"] = D;
    j["p"] = p;
    j["A"] = A3;
    j["B"] = B3;
    j["d"] = d;
    j["pibar_unit"] = pibar_unit;
    json roots_j = json::array();
    for (const auto& r : roots) roots_j.push_back({r.x0, r.x1});
    j["roots"] = roots_j;
    return j.dump(2);
}

TorsionTable TorsionTable::from_json(const std::string& text) {
    json j = json::parse(text);
    TorsionTable t;
    t.D = j.at("D").get<long>();
    t.p = j.at("p").get<long>();
    t.A3 = j.at("A").get<u64>();
    t.B3 = j.at("B").get<u64>();
    t.d = j.at("d").get<long>();
    t.pibar_unit = j.at("pibar_unit").get<u64>();
    for (const auto& r : j.at("roots")) t.roots.push_back({r[0].get<u64>(), r[1].get<u64>()});
    return t;
}

std::string KernelPoly::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["type"] = "kernel_poly";
    j["D"] = D;
    j["p"] = p;
    j["w"] = w;
    j["pibar_unit"] = pibar_unit;
    j["coeffs"] = coeffs;
    return j.dump(2);
}

KernelPoly KernelPoly::from_json(const std::string& text) {
    json j = json::parse(text);
    KernelPoly kp;
    kp.D = j.at("D").get<long>();
    kp.p = j.at("p").get<long>();
    kp.w = j.at("w").get<int>();
    kp.pibar_unit = j.at("pibar_unit").get<u64>();
    kp.coeffs = j.at("coeffs").get<std::vector<u64>>();
    return kp;
}

}  // namespace cmc
