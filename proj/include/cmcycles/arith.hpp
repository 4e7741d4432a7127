#pragma once

#include <gmpxx.h>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>

#include "cmcycles/modring.hpp"

namespace cmc {

// Exact rationals, always in lowest terms with positive denominator
// (mpq_class canonicalization maintains both).
using BigRat = mpq_class;

BigRat parse_rational(const std::string& s);       // "num" or "num/den"
std::string rational_str(const BigRat& x);
long padic_valuation(const mpz_class& n, long p);  // n != 0
// Exact p-adic valuation of x (x != 0).
long padic_valuation(const BigRat& x, long p);
bool is_square(const mpz_class& n);
std::optional<BigRat> exact_sqrt(const BigRat& x);

// One of the nine imaginary quadratic fields of class number 1.
class QuadField {
public:
    explicit QuadField(long D);
    long D() const { return D_; }
    // True when the ring of integers is Z[(1+sqrt(-D))/2] (D = 3 mod 4).
    bool half_basis() const { return D_ % 4 == 3; }
    static const std::array<long, 9>& all_D();
    friend bool operator==(const QuadField& a, const QuadField& b) { return a.D_ == b.D_; }

private:
    long D_;
};

// An algebraic integer (s + t*sqrt(-D)) / 2. The parity invariant keeps
// the element inside the maximal order: with basis {1, sqrt(-D)} both s
// and t are even; with the half-integral basis s and t share parity.
class QuadInt {
public:
    QuadInt(const QuadField& K, const mpz_class& s, const mpz_class& t);
    static QuadInt from_basis(const QuadField& K, const mpz_class& a, const mpz_class& b);
    static QuadInt zero(const QuadField& K) { return QuadInt(K, 0, 0); }
    static QuadInt one(const QuadField& K) { return QuadInt(K, 2, 0); }
    static QuadInt from_int(const QuadField& K, const mpz_class& n) { return QuadInt(K, 2 * n, 0); }

    const QuadField& field() const { return K_; }
    const mpz_class& s() const { return s_; }
    const mpz_class& t() const { return t_; }
    bool is_zero() const { return s_ == 0 && t_ == 0; }
    bool is_rational() const { return t_ == 0; }

    QuadInt conj() const { return QuadInt(K_, s_, -t_); }
    QuadInt operator-() const { return QuadInt(K_, -s_, -t_); }
    QuadInt operator+(const QuadInt& o) const;
    QuadInt operator-(const QuadInt& o) const;
    QuadInt operator*(const QuadInt& o) const;
    bool operator==(const QuadInt& o) const { return K_ == o.K_ && s_ == o.s_ && t_ == o.t_; }

    mpz_class norm() const;   // (s^2 + D t^2) / 4, a non-negative integer
    mpz_class trace() const;  // s
    // Exact division by an element whose norm divides ours; throws if inexact.
    QuadInt div_exact(const QuadInt& o) const;
    std::string str() const;

private:
    QuadField K_;
    mpz_class s_, t_;
};

// An element u + v*sqrt(-D) of K with exact rational components.
class KNumber {
public:
    KNumber(const QuadField& K, BigRat u, BigRat v) : K_(K), u_(std::move(u)), v_(std::move(v)) {}
    static KNumber from_rational(const QuadField& K, const BigRat& u) { return KNumber(K, u, 0); }
    static KNumber from_quadint(const QuadInt& q);

    const QuadField& field() const { return K_; }
    const BigRat& u() const { return u_; }
    const BigRat& v() const { return v_; }
    bool is_zero() const { return u_ == 0 && v_ == 0; }
    bool is_rational() const { return v_ == 0; }

    KNumber conj() const { return KNumber(K_, u_, -v_); }
    KNumber operator-() const { return KNumber(K_, -u_, -v_); }
    KNumber operator+(const KNumber& o) const { return KNumber(K_, u_ + o.u_, v_ + o.v_); }
    KNumber operator-(const KNumber& o) const { return KNumber(K_, u_ - o.u_, v_ - o.v_); }
    KNumber operator*(const KNumber& o) const;
    KNumber inverse() const;
    KNumber operator/(const KNumber& o) const { return *this * o.inverse(); }
    bool operator==(const KNumber& o) const { return u_ == o.u_ && v_ == o.v_; }

    BigRat norm() const;  // u^2 + D v^2
    // Exact square root in K, when one exists.
    std::optional<KNumber> sqrt_in_K() const;
    std::string str() const;

private:
    QuadField K_;
    BigRat u_, v_;
};

// A p-adic number to capped relative precision: p^val * unit with the
// unit known mod p^prec (1 <= prec <= N). A value that has vanished to
// the working precision is carried as a "zero class" together with the
// modulus p^abs it is known to be divisible by.
class PadicNum {
public:
    static PadicNum zero(long p, int N);                     // exact zero
    static PadicNum zero_to_precision(long p, int N, long abs_known);
    static PadicNum make(long p, int N, long val, u64 unit, int prec);
    static PadicNum from_integer(long p, int N, const mpz_class& n);

    long p() const { return p_; }
    int N() const { return N_; }
    bool is_zero_class() const { return zero_; }
    bool is_exact_zero() const;
    long val() const;   // throws if zero class
    u64 unit() const;   // throws if zero class
    int prec() const { return prec_; }
    // Absolute precision: the value is known mod p^abs_prec().
    long abs_prec() const;

    PadicNum operator-() const;
    PadicNum operator+(const PadicNum& o) const;
    PadicNum operator-(const PadicNum& o) const { return *this + (-o); }
    PadicNum operator*(const PadicNum& o) const;
    PadicNum operator/(const PadicNum& o) const;
    PadicNum pow_int(long e) const;

    // Value mod p^k as a residue, if val >= 0 and known to that precision.
    std::optional<u64> residue_mod(int k) const;
    // digit(0) = unit residue mod p at valuation offset i.
    std::optional<u64> digit(int i) const;
    bool congruent_mod(const PadicNum& o, int k) const;
    std::string str() const;

    // Placeholder state (p = 0); every factory overwrites it.
    PadicNum() = default;

private:
    void normalize();
    long p_ = 0;
    int N_ = 0;
    bool zero_ = true;
    long val_ = 0;
    u64 unit_ = 0;
    int prec_ = 0;
    long zero_abs_ = 0;  // for zero class; LONG_MAX/2 marks exact zero
};

// A split prime p = pi * conj(pi) of O_K together with the embedding
// O_K -> Z_p that gives pi valuation 1 (fixed by the choice of the
// residue of sqrt(-D) mod p). Frobenius data is attached per fiber by
// cm::orient_frobenius.
struct SplitPrime {
    QuadField K;
    long p;
    QuadInt pi;       // canonical norm-p generator of the formal ideal
    QuadInt pi_bar;   // conj(pi): generates the etale ideal
    long r_mod_p;     // embedded sqrt(-D) mod p; determines the embedding
    // Frobenius orientation, present once a fiber has been analyzed:
    std::optional<long> frob_trace;   // t with |E(F_p)| = p + 1 - t
    std::optional<long> a0;           // family residue it was computed for
    std::optional<QuadInt> frob;      // associate of pi with trace = t
    std::optional<QuadInt> etale;     // conj(frob)

    SplitPrime(const QuadField& K_, long p_, QuadInt pi_, QuadInt pibar_, long r)
        : K(K_), p(p_), pi(std::move(pi_)), pi_bar(std::move(pibar_)), r_mod_p(r) {}

    // sqrt(-D) lifted to mod p^N, consistent with r_mod_p.
    u64 sqrt_minus_d(int N) const;
};

// Canonical irreducible of norm p: minimal non-negative t, then minimal
// s >= 0. Errors: ramified_prime (p | D), inert_prime (norm form does
// not represent p).
QuadInt quad_split_prime(const QuadField& K, long p);

// quad_split_prime + the embedding orientation v(embed(pi)) = 1.
SplitPrime make_split_prime(const QuadField& K, long p);

// r^2 = c mod p^N for a unit c; deterministic root (smaller lift mod p).
u64 hensel_sqrt(u64 c, long p, int N);

PadicNum embed_rational(const BigRat& x, long p, int N);
PadicNum embed_quad(const QuadInt& q, const SplitPrime& sp, int N);
PadicNum embed_k(const KNumber& x, const SplitPrime& sp, int N);
// Exact valuation of q under the embedding (number of pi factors).
long pi_valuation(const QuadInt& q, const SplitPrime& sp);

}  // namespace cmc
