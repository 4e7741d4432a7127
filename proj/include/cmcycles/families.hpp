#pragma once

#include <string>
#include <vector>

#include "cmcycles/criteria.hpp"

namespace cmc {

// Splitting profile of the quadratic extension F = K(sqrt(f(b))).
struct FProfile {
    long degree = 2;        // [F:K]; 1 when degenerate
    bool v_splits = false;
    bool degenerate = false;  // F = K
};

struct AdelicStructure {
    int m = 0;  // number of places of F above v
    std::string description;
};

// (Z/p)^m with m the number of places above v. Errors: profile_too_large
// when [F:K] >= p - 1.
AdelicStructure adelic_structure(long D, long p, const FProfile& profile);

struct ExtensionCertificate {
    int schema_version = 1;
    long D = 0, p = 0;
    std::string curve_A, curve_B;   // exact rationals
    std::string pi;                 // canonical formal generator
    u64 pibar_unit = 0;             // embedded etale generator mod p^2
    std::string gen_x, gen_y;       // exact generator coordinates
    std::string gen_report;         // SymbolReport JSON
    std::string b;                  // exact parameter of the quadratic point
    std::string split_report;       // SplitReport JSON
    std::string b_report;           // SymbolReport JSON
    std::string f_radicand;         // exact f(b): F = K(sqrt(f(b)))
    std::string l_description;      // ramification profile of L = F(E[pi])
    int adelic_rank = 0;
    std::vector<std::string> hypotheses;
    bool independence = false;

    std::string to_json() const;
    static ExtensionCertificate from_json(const std::string& text);
    std::string to_text() const;
};

struct BScan {
    BigRat start = 0;
    BigRat step = 1;
    long count = 0;
};

struct ScanResult {
    bool generator_ok = false;
    SymbolReport gen_report;
    std::string diagnostic;  // set when the generator fails its criterion
    std::vector<ExtensionCertificate> certificates;
};

// Walk b = start + k*step for k = 0..count-1; emit a certificate for each
// b satisfying all four independence hypotheses. Deterministic order.
ScanResult scan_b_candidates(const CriteriaContext& ctx, const KNumber& gen_x,
                             const KNumber& gen_y, const BScan& scan, int jobs = 1);

// Re-run every check recorded in a certificate from its serialized inputs;
// true when the regenerated certificate is byte-identical.
bool revalidate_certificate(const ExtensionCertificate& cert, int N = 4);

struct DensityReport {
    struct PerRoot {
        u64 b0 = 0;          // root residue
        u64 failing_b1 = 0;  // the unique digit that kills the criterion
    };
    std::vector<PerRoot> per_root;
    BigRat density;  // exactly (p-1)/p
    std::string to_json() const;
};

// Per-root failure census for an admissible tuple.
DensityReport density_report(const CriteriaContext& ctx);

}  // namespace cmc
