#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cmcycles/torsion.hpp"

namespace cmc {

// A curve y^2 = x^3 + Ax + B with exact coefficients in K.
struct CurveK {
    QuadField K;
    KNumber A, B;
    KNumber f(const KNumber& x) const { return x * x * x + A * x + B; }
    bool on_curve(const KNumber& x, const KNumber& y) const { return y * y == f(x); }
    // Exact group law; returns nullopt for the point at infinity.
    struct Pt { KNumber x, y; };
    std::optional<Pt> dbl(const Pt& P) const;
};

// A curve point with p-adic embeddings and, when available, exact
// coordinates (needed only to decide exact-torsion edge cases).
struct PointData {
    bool infinity = false;
    std::optional<KNumber> ex, ey;
    PadicNum px, py;

    static PointData at_infinity(long p, int N);
    static PointData exact(const CurveK& E, const KNumber& x, const KNumber& y,
                           const SplitPrime& sp, int N);
    static PointData padic(PadicNum x, PadicNum y);
};

// Everything the criteria need about one admissible tuple.
struct CriteriaContext {
    CMFamily fam;
    QuadField K;
    CurveK E;          // exact model
    SplitPrime sp;     // oriented
    AdmissibleTuple tuple;
    CurveRing C3;      // reduction mod p^3
    TorsionTable table;
    KernelPoly kpoly;
    KNumber a;         // exact family parameter
    u64 a0 = 0, a1 = 0;  // first two digits of a
    int N = 4;           // embedding precision
};

CriteriaContext make_context(long D, const BigRat& A, const BigRat& B, long p, int N = 4,
                             int jobs = 1);
// Same, but reuse an already computed torsion table (e.g. from the cache).
CriteriaContext make_context_with_table(long D, const BigRat& A, const BigRat& B, long p,
                                        const TorsionTable& table, int N = 4);

// The formal-component valuation of a point: 1, ">= 2", or infinite, plus
// the exact value when it comes from a negative x-valuation.
struct FormalValuation {
    bool infinite = false;
    long value = 0;    // meaningful when !infinite
    bool exact = true; // false marks the ">= value" case
    bool is_one() const { return !infinite && exact && value == 1; }
};

struct SymbolReport {
    std::string rule;  // negative-valuation | taylor | epsilon-table |
                       // positive-valuation | exact-torsion | identity
    std::optional<FormalValuation> formal_valuation;
    std::optional<TorsionRoot> matched_root;
    bool nontrivial = false;
    std::vector<std::string> trace;
    std::string to_json() const;
};

struct SplitReport {
    std::string branch;  // v-negative | generic-residue | d2-unit | d2-positive
    bool splits = false;
    bool degenerate = false;  // f(b) an exact square in K (F = K)
    std::string to_json() const;
};

// u(P-hat) through the torsion table: negative x-valuation gives the exact
// value; otherwise compare x(dP) with the matching root mod p^2.
FormalValuation formal_valuation_of(const PointData& P, const CriteriaContext& ctx,
                                    std::optional<TorsionRoot>* matched = nullptr);

// Evaluate the applicable non-triviality branch and cross-check it against
// the direct formal-valuation computation.
SymbolReport check_symbol(const PointData& P, const CriteriaContext& ctx);

// Splitting of v in K(sqrt(f(b)))/K, classified by v(b) and the cofactor.
SplitReport quadratic_split_test(const KNumber& b, const CriteriaContext& ctx);

// SymbolReport for the point (b, sqrt(f(b))) evaluated purely p-adically.
// Errors: not_split, degenerate_quadratic.
SymbolReport naive_quadratic_symbol(const KNumber& b, const CriteriaContext& ctx);

// The failing second digit for each case of the (D=1, p=5) criterion,
// regenerated from torsion data at the fiber a = 3 + 5*a1: the criterion
// fails exactly at b1 = b0*a1 + eps(b0). Index = b0 - 1.
std::array<u64, 4> regenerate_epsilon(u64 a1 = 0);

// p-adic square root (even valuation, unit part a residue).
PadicNum padic_sqrt(const PadicNum& x);

// Key of the torsion cache entry for one tuple: conjugate-choice changes
// alter the embedded etale unit and therefore never alias.
struct TupleKey {
    long D = 0, p = 0;
    u64 A3 = 0, B3 = 0;
    u64 pibar_unit = 0;
    std::string str() const;
};
TupleKey tuple_cache_key(long D, const BigRat& A, const BigRat& B, long p);

}  // namespace cmc
