// Command-line front end: admissible-tuple search, torsion tables, point
// criteria, and certified extension families for CM self-product cycles.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cmcycles/cache.hpp"
#include "cmcycles/families.hpp"
#include "json.hpp"

using namespace cmc;
using nlohmann::json;

namespace {

struct Config {
    int precision = 4;
    std::string cache_dir = default_cache_dir();
    int jobs = 1;
    bool as_json = false;
};

std::pair<BigRat, BigRat> parse_curve(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        fail(errc::parse_error, "--curve expects 'A,B' with exact rational entries");
    return {parse_rational(s.substr(0, comma)), parse_rational(s.substr(comma + 1))};
}

std::pair<BigRat, BigRat> parse_point(const std::string& s) { return parse_curve(s); }

// A field element: either a rational 'num/den' or a pair 's,t' meaning
// s + t*w in the canonical integral basis {1, w} of O_K.
KNumber parse_k_element(const QuadField& K, const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) return KNumber::from_rational(K, parse_rational(s));
    BigRat a = parse_rational(s.substr(0, comma));
    BigRat b = parse_rational(s.substr(comma + 1));
    if (K.half_basis()) {
        BigRat half_b = b / 2;
        return KNumber(K, a + half_b, half_b);
    }
    return KNumber(K, a, b);
}

int cmd_fields(const Config& cfg) {
    json rows = json::array();
    for (long D : QuadField::all_D()) {
        QuadField K(D);
        CMFamily fam = family(D);
        rows.push_back({{"D", D},
                        {"field", "Q(sqrt(-" + std::to_string(D) + "))"},
                        {"integral_basis", K.half_basis() ? "1, (1+sqrt(-D))/2" : "1, sqrt(-D)"},
                        {"weight", fam.w},
                        {"family", fam.shape()}});
    }
    if (cfg.as_json) {
        std::cout << rows.dump(2) << "\n";
        return 0;
    }
    for (const auto& r : rows)
        std::cout << "D = " << r["D"].get<long>() << "  " << r["field"].get<std::string>()
                  << "  basis {" << r["integral_basis"].get<std::string>() << "}  w = "
                  << r["weight"].get<int>() << "  " << r["family"].get<std::string>() << "\n";
    return 0;
}

int cmd_admissible(const Config& cfg, long D, long maxp) {
    auto primes = admissible_primes(D, maxp, cfg.jobs);
    if (cfg.as_json) {
        json j = {{"D", D}, {"max_p", maxp}, {"primes", primes}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (size_t i = 0; i < primes.size(); ++i)
        std::cout << primes[i] << (i + 1 < primes.size() ? " " : "");
    std::cout << "\n";
    return 0;
}

json torsion_document(const CriteriaContext& ctx) {
    json j;
    j["schema_version"] = 1;
    j["D"] = ctx.tuple.D;
    j["p"] = ctx.tuple.p;
    j["d"] = ctx.tuple.d;
    j["table"] = json::parse(ctx.table.to_json());
    j["kernel_poly"] = json::parse(ctx.kpoly.to_json());
    return j;
}

void print_torsion_text(const CriteriaContext& ctx) {
    long p = ctx.tuple.p;
    std::cout << "torsion x-coordinates mod p^2 (p = " << p << ", d = " << ctx.tuple.d << "):\n";
    for (const auto& r : ctx.table.roots)
        std::cout << "  x = " << r.x0 << " + " << r.x1 << "*" << p << "  (= "
                  << (r.x0 + r.x1 * (u64)p) << " mod " << p * p << ")\n";
    std::cout << "kernel polynomial mod p^2, weight " << ctx.kpoly.w << ":\n  Phi(x,a) =";
    long e = ctx.kpoly.x_degree();
    for (size_t k = 0; k < ctx.kpoly.coeffs.size(); ++k) {
        long xd = e - (long)k * ctx.kpoly.w;
        std::cout << (k ? " + " : " ") << ctx.kpoly.coeffs[k];
        if (xd > 0) std::cout << "*x^" << xd;
        if (k > 0) std::cout << "*a^" << k;
    }
    std::cout << "\n  etale unit mod p^2: " << ctx.kpoly.pibar_unit << "\n";
}

int cmd_torsion(const Config& cfg, long D, long p, const std::string& A_s,
                const std::string& B_s, bool no_cache) {
    BigRat A = parse_rational(A_s), B = parse_rational(B_s);
    Cache cache(cfg.cache_dir);
    TupleKey key = tuple_cache_key(D, A, B, p);

    std::optional<std::string> cached = cache.enabled() ? cache.load(key.str()) : std::nullopt;
    std::string doc;
    if (cached && !no_cache) {
        doc = *cached;
        TorsionTable table = TorsionTable::from_json(json::parse(doc)["table"].dump());
        CriteriaContext ctx = make_context_with_table(D, A, B, p, table, cfg.precision);
        if (torsion_document(ctx).dump(2) != doc)
            fail(errc::cache_error, "cached torsion document failed revalidation");
        if (cfg.as_json) std::cout << doc << "\n";
        else { print_torsion_text(ctx); std::cout << "(served from cache)\n"; }
        return 0;
    }

    CriteriaContext ctx = make_context(D, A, B, p, cfg.precision, cfg.jobs);
    doc = torsion_document(ctx).dump(2);
    if (cached && *cached != doc)
        fail(errc::cache_error, "cache contents differ from fresh recomputation");
    if (!no_cache) cache.store(key.str(), doc);
    if (cfg.as_json) std::cout << doc << "\n";
    else print_torsion_text(ctx);
    return 0;
}

int cmd_check_point(const Config& cfg, long D, long p, const std::string& curve,
                    const std::string& x_s, const std::string& y_s) {
    auto [A, B] = parse_curve(curve);
    CriteriaContext ctx = make_context(D, A, B, p, cfg.precision, cfg.jobs);
    KNumber x = parse_k_element(ctx.K, x_s);
    KNumber y = parse_k_element(ctx.K, y_s);
    PointData P = PointData::exact(ctx.E, x, y, ctx.sp, ctx.N);
    SymbolReport rep = check_symbol(P, ctx);
    if (cfg.as_json) {
        std::cout << rep.to_json() << "\n";
    } else {
        std::cout << "rule: " << rep.rule << "\n";
        for (const auto& t : rep.trace) std::cout << "  " << t << "\n";
        std::cout << "nontrivial: " << (rep.nontrivial ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_split_test(const Config& cfg, long D, long p, const std::string& curve,
                   const std::string& b_s) {
    auto [A, B] = parse_curve(curve);
    CriteriaContext ctx = make_context(D, A, B, p, cfg.precision, cfg.jobs);
    KNumber b = parse_k_element(ctx.K, b_s);
    SplitReport rep = quadratic_split_test(b, ctx);
    if (cfg.as_json) {
        std::cout << rep.to_json() << "\n";
    } else {
        std::cout << "branch: " << rep.branch << "\nsplits: " << (rep.splits ? "true" : "false")
                  << "\ndegenerate: " << (rep.degenerate ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_family(const Config& cfg, long D, long p, const std::string& curve,
               const std::string& gen, const std::string& b_start, const std::string& b_step,
               long count) {
    auto [A, B] = parse_curve(curve);
    auto [gx, gy] = parse_point(gen);
    CriteriaContext ctx = make_context(D, A, B, p, cfg.precision, cfg.jobs);
    BScan scan{parse_rational(b_start), parse_rational(b_step), count};
    ScanResult res = scan_b_candidates(ctx, KNumber::from_rational(ctx.K, gx),
                                       KNumber::from_rational(ctx.K, gy), scan, cfg.jobs);
    if (cfg.as_json) {
        json j;
        j["schema_version"] = 1;
        j["generator_ok"] = res.generator_ok;
        j["generator_report"] = json::parse(res.gen_report.to_json());
        if (!res.diagnostic.empty()) j["diagnostic"] = res.diagnostic;
        json arr = json::array();
        for (const auto& c : res.certificates) arr.push_back(json::parse(c.to_json()));
        j["certificates"] = arr;
        std::cout << j.dump(2) << "\n";
    } else {
        if (!res.generator_ok) {
            std::cout << res.diagnostic << "\n";
            return 0;
        }
        std::cout << res.certificates.size() << " certificate(s)\n\n";
        for (const auto& c : res.certificates) std::cout << c.to_text() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locally non-trivial zero-cycles on self-products of CM elliptic curves"};
    app.require_subcommand(1);
    Config cfg;
    app.add_option("--precision", cfg.precision, "working p-adic precision (3..8)")
        ->check(CLI::Range(3, 8));
    app.add_option("--cache-dir", cfg.cache_dir, "cache directory (env CMCYCLES_CACHE_DIR)");
    app.add_option("--jobs", cfg.jobs, "parallelism width")->check(CLI::PositiveNumber);
    app.add_flag("--json", cfg.as_json, "emit JSON instead of text");

    auto* fields = app.add_subcommand("fields", "list the nine CM fields");

    auto* adm = app.add_subcommand("admissible", "admissible primes for a field");
    long adm_D = 0, adm_maxp = 1000;
    adm->add_option("--D", adm_D, "field discriminant parameter")->required();
    adm->add_option("--max-p", adm_maxp, "upper bound for the prime scan");

    auto* tor = app.add_subcommand("torsion", "etale torsion table and kernel polynomial");
    long tor_D = 0, tor_p = 0;
    std::string tor_A, tor_B;
    bool tor_nocache = false;
    tor->add_option("--D", tor_D)->required();
    tor->add_option("--p", tor_p)->required();
    tor->add_option("--A", tor_A, "curve coefficient A (exact rational)")->required();
    tor->add_option("--B", tor_B, "curve coefficient B (exact rational)")->required();
    tor->add_flag("--no-cache", tor_nocache, "recompute and compare against any cached copy");

    auto* chk = app.add_subcommand("check-point", "non-triviality criterion for a point");
    long chk_D = 0, chk_p = 0;
    std::string chk_curve, chk_x, chk_y;
    chk->add_option("--curve", chk_curve, "A,B")->required();
    chk->add_option("--D", chk_D)->required();
    chk->add_option("--p", chk_p)->required();
    chk->add_option("--x", chk_x)->required();
    chk->add_option("--y", chk_y)->required();

    auto* spl = app.add_subcommand("split-test", "splitting of v in K(sqrt(f(b)))/K");
    long spl_D = 0, spl_p = 0;
    std::string spl_curve, spl_b;
    spl->add_option("--curve", spl_curve, "A,B")->required();
    spl->add_option("--D", spl_D)->required();
    spl->add_option("--p", spl_p)->required();
    spl->add_option("--b", spl_b, "rational, or 's,t' in the integral basis")->required();

    auto* famc = app.add_subcommand("family", "scan b-candidates and emit certificates");
    long fam_D = 0, fam_p = 0, fam_count = 0;
    std::string fam_curve, fam_gen, fam_bstart, fam_bstep;
    famc->add_option("--curve", fam_curve, "A,B")->required();
    famc->add_option("--D", fam_D)->required();
    famc->add_option("--p", fam_p)->required();
    famc->add_option("--gen", fam_gen, "generator point x,y")->required();
    famc->add_option("--b-start", fam_bstart)->required();
    famc->add_option("--b-step", fam_bstep)->required();
    famc->add_option("--count", fam_count)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fields) return cmd_fields(cfg);
        if (*adm) return cmd_admissible(cfg, adm_D, adm_maxp);
        if (*tor) return cmd_torsion(cfg, tor_D, tor_p, tor_A, tor_B, tor_nocache);
        if (*chk) return cmd_check_point(cfg, chk_D, chk_p, chk_curve, chk_x, chk_y);
        if (*spl) return cmd_split_test(cfg, spl_D, spl_p, spl_curve, spl_b);
        if (*famc)
            return cmd_family(cfg, fam_D, fam_p, fam_curve, fam_gen, fam_bstart, fam_bstep,
                              fam_count);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == errc::parse_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
