#include "cmcycles/families.hpp"

#include "cmcycles/parallel.hpp"
#include "json.hpp"

namespace cmc {

namespace {
using nlohmann::json;
}

AdelicStructure adelic_structure(long D, long p, const FProfile& profile) {
    (void)D;
    if (profile.degree >= p - 1)
        fail(errc::profile_too_large, "[F:K] must stay below p - 1");
    AdelicStructure s;
    if (profile.degenerate) {
        s.m = 1;
    } else if (profile.degree == 2) {
        s.m = profile.v_splits ? 2 : 1;
    } else {
        s.m = profile.v_splits ? (int)profile.degree : 1;
    }
    s.description = "local group (Z/" + std::to_string(p) + ")^" + std::to_string(s.m) +
                    " across the places above v; the obstruction pairing on it vanishes "
                    "under these hypotheses (external result, recorded not recomputed)";
    return s;
}

namespace {

std::string l_profile_description(long p) {
    return "L = F(E[pi]) of degree " + std::to_string(p - 1) +
           " over F, totally ramified at the places above v and unramified elsewhere";
}

ExtensionCertificate build_certificate(const CriteriaContext& ctx, const KNumber& gen_x,
                                       const KNumber& gen_y, const SymbolReport& gen_rep,
                                       const KNumber& b, const SplitReport& split,
                                       const SymbolReport& b_rep) {
    ExtensionCertificate cert;
    cert.D = ctx.tuple.D;
    cert.p = ctx.tuple.p;
    cert.curve_A = rational_str(ctx.E.A.u());
    cert.curve_B = rational_str(ctx.E.B.u());
    cert.pi = ctx.sp.pi.str();
    cert.pibar_unit = ctx.table.pibar_unit;
    cert.gen_x = rational_str(gen_x.u());
    cert.gen_y = rational_str(gen_y.u());
    cert.gen_report = gen_rep.to_json();
    cert.b = rational_str(b.u());
    cert.split_report = split.to_json();
    cert.b_report = b_rep.to_json();
    cert.f_radicand = ctx.E.f(b).str();
    cert.l_description = l_profile_description(ctx.tuple.p);
    cert.adelic_rank = adelic_structure(ctx.tuple.D, ctx.tuple.p,
                                        FProfile{2, true, false})
                           .m;
    cert.hypotheses = {
        "generator symbol is locally nontrivial mod p",
        "quadratic-point symbol is locally nontrivial mod p",
        "v splits in F/K",
        "F != K (f(b) is not a square in K)",
    };
    cert.independence = true;
    return cert;
}

}  // namespace

ScanResult scan_b_candidates(const CriteriaContext& ctx, const KNumber& gen_x,
                             const KNumber& gen_y, const BScan& scan, int jobs) {
    ScanResult result;
    PointData gen = PointData::exact(ctx.E, gen_x, gen_y, ctx.sp, ctx.N);
    result.gen_report = check_symbol(gen, ctx);
    result.generator_ok = result.gen_report.nontrivial;
    if (!result.generator_ok) {
        result.diagnostic =
            std::string(errc_name(errc::generator_fails_criterion)) +
            ": the generator's own symbol is trivial, so no certificate can be emitted";
        return result;
    }

    std::vector<long> ks;
    for (long k = 0; k < scan.count; ++k) ks.push_back(k);
    auto certs = parallel_map(
        ks,
        [&](long k) -> std::optional<ExtensionCertificate> {
            KNumber b =
                KNumber::from_rational(ctx.K, scan.start + BigRat(k) * scan.step);
            SplitReport split = quadratic_split_test(b, ctx);
            if (!split.splits || split.degenerate) return std::nullopt;
            SymbolReport rep = naive_quadratic_symbol(b, ctx);
            if (!rep.nontrivial) return std::nullopt;
            return build_certificate(ctx, gen_x, gen_y, result.gen_report, b, split, rep);
        },
        jobs);
    for (auto& c : certs)
        if (c) result.certificates.push_back(std::move(*c));
    return result;
}

bool revalidate_certificate(const ExtensionCertificate& cert, int N) {
    CriteriaContext ctx = make_context(cert.D, parse_rational(cert.curve_A),
                                       parse_rational(cert.curve_B), cert.p, N);
    KNumber gx = KNumber::from_rational(ctx.K, parse_rational(cert.gen_x));
    KNumber gy = KNumber::from_rational(ctx.K, parse_rational(cert.gen_y));
    KNumber b = KNumber::from_rational(ctx.K, parse_rational(cert.b));

    PointData gen = PointData::exact(ctx.E, gx, gy, ctx.sp, ctx.N);
    SymbolReport gen_rep = check_symbol(gen, ctx);
    if (!gen_rep.nontrivial) return false;
    SplitReport split = quadratic_split_test(b, ctx);
    if (!split.splits || split.degenerate) return false;
    SymbolReport b_rep = naive_quadratic_symbol(b, ctx);
    if (!b_rep.nontrivial) return false;

    ExtensionCertificate fresh =
        build_certificate(ctx, gx, gy, gen_rep, b, split, b_rep);
    return fresh.to_json() == cert.to_json();
}

DensityReport density_report(const CriteriaContext& ctx) {
    long p = ctx.tuple.p;
    DensityReport rep;
    rep.density = BigRat(p - 1, p);
    for (const auto& root : ctx.table.roots) {
        u64 failing;
        if (ctx.tuple.d == 1) {
            // Solve lead + b1 * phi_x = 0 (mod p) for b1.
            u64 base = taylor_criterion_value(ctx.kpoly, root.x0, 0, ctx.a0, ctx.a1);
            u64 phix = ctx.kpoly.eval_dx(root.x0, ctx.a0);
            if (phix == 0)
                fail(errc::internal_ambiguity, "dPhi/dx vanished at a torsion root");
            failing = (u64)((u128)(p - (long)base % p) % (u64)p * inv_mod(phix, (u64)p) % (u64)p);
        } else {
            const auto eps = regenerate_epsilon(0);
            failing = (root.x0 * ctx.a1 + eps[root.x0 - 1]) % (u64)p;
        }
        rep.per_root.push_back({root.x0, failing});
    }
    return rep;
}

std::string DensityReport::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["density"] = rational_str(density);
    json arr = json::array();
    for (const auto& r : per_root) arr.push_back({{"b0", r.b0}, {"failing_b1", r.failing_b1}});
    j["per_root"] = arr;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Certificate serialization.

std::string ExtensionCertificate::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["inputs"] = {{"D", D},
                   {"p", p},
                   {"curve", {{"A", curve_A}, {"B", curve_B}}},
                   {"pi", pi},
                   {"pibar_unit", pibar_unit},
                   {"generator", {{"x", gen_x}, {"y", gen_y}}},
                   {"b", b}};
    j["reports"] = {{"generator", json::parse(gen_report)},
                    {"split", json::parse(split_report)},
                    {"quadratic_point", json::parse(b_report)}};
    j["fields"] = {{"F_radicand", f_radicand}, {"L", l_description}};
    j["adelic_rank"] = adelic_rank;
    j["hypotheses"] = hypotheses;
    j["conclusion"] = {{"independence", independence}};
    return j.dump(2);
}

ExtensionCertificate ExtensionCertificate::from_json(const std::string& text) {
    json j = json::parse(text);
    ExtensionCertificate c;
    c.schema_version = j.at("schema_version").get<int>();
    const auto& in = j.at("inputs");
    c.D = in.at("D").get<long>();
    c.p = in.at("p").get<long>();
    c.curve_A = in.at("curve").at("A").get<std::string>();
    c.curve_B = in.at("curve").at("B").get<std::string>();
    c.pi = in.at("pi").get<std::string>();
    c.pibar_unit = in.at("pibar_unit").get<u64>();
    c.gen_x = in.at("generator").at("x").get<std::string>();
    c.gen_y = in.at("generator").at("y").get<std::string>();
    c.b = in.at("b").get<std::string>();
    c.gen_report = j.at("reports").at("generator").dump(2);
    c.split_report = j.at("reports").at("split").dump(2);
    c.b_report = j.at("reports").at("quadratic_point").dump(2);
    c.f_radicand = j.at("fields").at("F_radicand").get<std::string>();
    c.l_description = j.at("fields").at("L").get<std::string>();
    c.adelic_rank = j.at("adelic_rank").get<int>();
    c.hypotheses = j.at("hypotheses").get<std::vector<std::string>>();
    c.independence = j.at("conclusion").at("independence").get<bool>();
    return c;
}

std::string ExtensionCertificate::to_text() const {
    std::string out;
    out += "certificate (D = " + std::to_string(D) + ", p = " + std::to_string(p) + ")\n";
    out += "  curve: y^2 = x^3 + " + curve_A + "*x + " + curve_B + "\n";
    out += "  pi = " + pi + ", etale unit mod p^2 = " + std::to_string(pibar_unit) + "\n";
    out += "  generator P = (" + gen_x + ", " + gen_y + ")\n";
    out += "  b = " + b + ", F = K(sqrt(" + f_radicand + "))\n";
    out += "  " + l_description + "\n";
    out += "  adelic rank m = " + std::to_string(adelic_rank) + "\n";
    out += "  hypotheses verified:\n";
    for (const auto& h : hypotheses) out += "    - " + h + "\n";
    out += std::string("  independence: ") + (independence ? "true" : "false") + "\n";
    return out;
}

}  // namespace cmc
