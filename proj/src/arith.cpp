#include "cmcycles/arith.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

namespace cmc {

namespace {
constexpr long kExactZero = LONG_MAX / 2;
}

BigRat parse_rational(const std::string& s) {
    if (s.empty()) fail(errc::parse_error, "empty rational");
    std::string t = s;
    auto slash = t.find('/');
    try {
        if (slash == std::string::npos) {
            mpz_class n(t);
            return BigRat(n);
        }
        mpz_class n(t.substr(0, slash));
        mpz_class d(t.substr(slash + 1));
        if (d == 0) fail(errc::parse_error, "zero denominator");
        BigRat r(n, d);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        fail(errc::parse_error, "malformed rational '" + s + "'");
    }
}

std::string rational_str(const BigRat& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

long padic_valuation(const mpz_class& n, long p) {
    if (n == 0) fail(errc::zero_divisor, "valuation of zero");
    mpz_class a = abs(n);
    long v = 0;
    while (mpz_divisible_ui_p(a.get_mpz_t(), (unsigned long)p)) {
        mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), (unsigned long)p);
        ++v;
    }
    return v;
}

long padic_valuation(const BigRat& x, long p) {
    if (x == 0) fail(errc::zero_divisor, "valuation of zero");
    return padic_valuation(x.get_num(), p) - padic_valuation(x.get_den(), p);
}

bool is_square(const mpz_class& n) {
    if (n < 0) return false;
    return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

std::optional<BigRat> exact_sqrt(const BigRat& x) {
    if (x < 0) return std::nullopt;
    if (!is_square(x.get_num()) || !is_square(x.get_den())) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), x.get_num().get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), x.get_den().get_mpz_t());
    return BigRat(rn, rd);
}

const std::array<long, 9>& QuadField::all_D() {
    static const std::array<long, 9> ds = {1, 2, 3, 7, 11, 19, 43, 67, 163};
    return ds;
}

QuadField::QuadField(long D) : D_(D) {
    const auto& ds = all_D();
    if (std::find(ds.begin(), ds.end(), D) == ds.end())
        fail(errc::unsupported_d, "D must be one of {1,2,3,7,11,19,43,67,163}");
}

QuadInt::QuadInt(const QuadField& K, const mpz_class& s, const mpz_class& t)
    : K_(K), s_(s), t_(t) {
    if (K.half_basis()) {
        if (((s_ - t_) % 2) != 0) fail(errc::parse_error, "parity: s == t (mod 2) required");
    } else {
        if ((s_ % 2) != 0 || (t_ % 2) != 0)
            fail(errc::parse_error, "parity: s, t must be even for this field");
    }
}

QuadInt QuadInt::from_basis(const QuadField& K, const mpz_class& a, const mpz_class& b) {
    if (K.half_basis()) return QuadInt(K, 2 * a + b, b);  // a + b*(1+sqrt(-D))/2
    return QuadInt(K, 2 * a, 2 * b);                      // a + b*sqrt(-D)
}

QuadInt QuadInt::operator+(const QuadInt& o) const { return QuadInt(K_, s_ + o.s_, t_ + o.t_); }
QuadInt QuadInt::operator-(const QuadInt& o) const { return QuadInt(K_, s_ - o.s_, t_ - o.t_); }

QuadInt QuadInt::operator*(const QuadInt& o) const {
    // ((s1 + t1 w)(s2 + t2 w)) / 4 with w^2 = -D; halves stay integral
    // because of the parity invariants.
    mpz_class s = (s_ * o.s_ - mpz_class(K_.D()) * t_ * o.t_) / 2;
    mpz_class t = (s_ * o.t_ + t_ * o.s_) / 2;
    return QuadInt(K_, s, t);
}

mpz_class QuadInt::norm() const {
    return (s_ * s_ + mpz_class(K_.D()) * t_ * t_) / 4;
}

mpz_class QuadInt::trace() const { return s_; }

QuadInt QuadInt::div_exact(const QuadInt& o) const {
    mpz_class n = o.norm();
    if (n == 0) fail(errc::zero_divisor, "division by zero in O_K");
    QuadInt num = *this * o.conj();
    if (num.s_ % n != 0 || num.t_ % n != 0)
        fail(errc::zero_divisor, "inexact division in O_K");
    return QuadInt(K_, num.s_ / n, num.t_ / n);
}

std::string QuadInt::str() const {
    std::ostringstream os;
    os << "(" << s_ << (t_ >= 0 ? "+" : "") << t_ << "*sqrt(-" << K_.D() << "))/2";
    return os.str();
}

KNumber KNumber::from_quadint(const QuadInt& q) {
    BigRat u(q.s(), 2), v(q.t(), 2);
    u.canonicalize();
    v.canonicalize();
    return KNumber(q.field(), u, v);
}

KNumber KNumber::operator*(const KNumber& o) const {
    return KNumber(K_, u_ * o.u_ - K_.D() * v_ * o.v_, u_ * o.v_ + v_ * o.u_);
}

BigRat KNumber::norm() const { return u_ * u_ + K_.D() * v_ * v_; }

KNumber KNumber::inverse() const {
    BigRat n = norm();
    if (n == 0) fail(errc::zero_divisor, "inverse of zero in K");
    return KNumber(K_, u_ / n, -v_ / n);
}

std::optional<KNumber> KNumber::sqrt_in_K() const {
    // beta = x + y sqrt(-D), beta^2 = (x^2 - D y^2) + 2xy sqrt(-D).
    if (v_ == 0) {
        if (auto r = exact_sqrt(u_)) return KNumber(K_, *r, 0);      // rational square
        if (auto r = exact_sqrt(-u_ / K_.D())) return KNumber(K_, 0, *r);  // -D * square
        return std::nullopt;
    }
    auto n = exact_sqrt(norm());  // |beta|^2 = x^2 + D y^2
    if (!n) return std::nullopt;
    // x^2 = (u + |beta|^2) / 2 for one of the two signs of the norm root.
    for (int sgn : {1, -1}) {
        BigRat m = sgn > 0 ? *n : -*n;
        auto x = exact_sqrt((u_ + m) / 2);
        if (!x || *x == 0) continue;
        BigRat y = v_ / (2 * *x);
        KNumber cand(K_, *x, y);
        if (cand * cand == *this) return cand;
    }
    return std::nullopt;
}

std::string KNumber::str() const {
    std::ostringstream os;
    if (v_ == 0) {
        os << u_;
    } else {
        os << u_ << (v_ >= 0 ? "+" : "") << v_ << "*sqrt(-" << K_.D() << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// PadicNum

PadicNum PadicNum::zero(long p, int N) { return zero_to_precision(p, N, kExactZero); }

PadicNum PadicNum::zero_to_precision(long p, int N, long abs_known) {
    PadicNum x;
    x.p_ = p;
    x.N_ = N;
    x.zero_ = true;
    x.zero_abs_ = abs_known;
    return x;
}

PadicNum PadicNum::make(long p, int N, long val, u64 unit, int prec) {
    Zq check((u64)p, N);  // validates p, N, machine-word range
    if (prec < 1 || prec > N) fail(errc::precision_exceeded, "unit precision out of range");
    PadicNum x;
    x.p_ = p;
    x.N_ = N;
    x.zero_ = false;
    x.val_ = val;
    x.unit_ = unit % check.pow_p(prec);
    x.prec_ = prec;
    if (x.unit_ % (u64)p == 0) fail(errc::zero_divisor, "unit part divisible by p");
    return x;
}

PadicNum PadicNum::from_integer(long p, int N, const mpz_class& n) {
    if (n == 0) return zero(p, N);
    long v = padic_valuation(n, p);
    Zq R((u64)p, N);
    mpz_class m = n;
    for (long i = 0; i < v; ++i) mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), (unsigned long)p);
    mpz_class r = m % mpz_class((unsigned long)R.modulus());
    if (r < 0) r += mpz_class((unsigned long)R.modulus());
    return make(p, N, v, r.get_ui(), N);
}

bool PadicNum::is_exact_zero() const { return zero_ && zero_abs_ >= kExactZero; }

long PadicNum::val() const {
    if (zero_) fail(errc::precision_exceeded, "valuation of a vanished value");
    return val_;
}

u64 PadicNum::unit() const {
    if (zero_) fail(errc::precision_exceeded, "unit of a vanished value");
    return unit_;
}

long PadicNum::abs_prec() const {
    if (zero_) return zero_abs_;
    return val_ + prec_;
}

PadicNum PadicNum::operator-() const {
    if (zero_) return *this;
    Zq R((u64)p_, prec_);
    PadicNum x = *this;
    x.unit_ = R.modulus() - unit_;
    return x;
}

PadicNum PadicNum::operator+(const PadicNum& o) const {
    if (p_ != o.p_) fail(errc::parse_error, "mixed primes in p-adic arithmetic");
    int N = std::min(N_, o.N_);
    if (zero_ && o.zero_) return zero_to_precision(p_, N, std::min(zero_abs_, o.zero_abs_));
    if (zero_ || o.zero_) {
        const PadicNum& z = zero_ ? *this : o;
        const PadicNum& y = zero_ ? o : *this;
        if (z.zero_abs_ >= y.abs_prec()) return y;
        long digits = std::min<long>(z.zero_abs_ - y.val_, N);  // surviving unit digits
        if (digits <= 0) return zero_to_precision(p_, N, z.zero_abs_);
        return make(p_, N, y.val_, y.unit_ % Zq((u64)p_, (int)digits).modulus(), (int)digits);
    }
    long v = std::min(val_, o.val_);
    long abs = std::min({abs_prec(), o.abs_prec(), v + (long)N});
    int digits = (int)(abs - v);
    if (digits <= 0) return zero_to_precision(p_, N, abs);
    Zq R((u64)p_, digits);
    u64 a = (val_ - v) >= digits ? 0 : R.mul(unit_ % R.modulus(), R.pow_p((int)(val_ - v)));
    u64 b = (o.val_ - v) >= digits ? 0 : R.mul(o.unit_ % R.modulus(), R.pow_p((int)(o.val_ - v)));
    u64 s = R.add(a, b);
    if (s == 0) return zero_to_precision(p_, N, abs);
    int t = R.val(s);
    return make(p_, N, v + t, R.div_pk(s, t), digits - t);
}

PadicNum PadicNum::operator*(const PadicNum& o) const {
    if (p_ != o.p_) fail(errc::parse_error, "mixed primes in p-adic arithmetic");
    int N = std::min(N_, o.N_);
    if (is_exact_zero() || o.is_exact_zero()) return zero(p_, N);
    if (zero_ || o.zero_) {
        // 0 + O(p^a) times a value of valuation v vanishes to order a + v.
        const PadicNum& z = zero_ ? *this : o;
        const PadicNum& y = zero_ ? o : *this;
        long shift = y.zero_ ? y.zero_abs_ : y.val_;
        return zero_to_precision(p_, N, z.zero_abs_ + shift);
    }
    int prec = std::min({prec_, o.prec_, N});
    Zq R((u64)p_, prec);
    return make(p_, N, val_ + o.val_, R.mul(unit_ % R.modulus(), o.unit_ % R.modulus()), prec);
}

PadicNum PadicNum::operator/(const PadicNum& o) const {
    if (o.zero_) fail(errc::zero_divisor, "p-adic division by a vanished value");
    int N = std::min(N_, o.N_);
    if (zero_) return zero_to_precision(p_, N, zero_abs_ - o.val_);
    int prec = std::min({prec_, o.prec_, N});
    Zq R((u64)p_, prec);
    return make(p_, N, val_ - o.val_, R.mul(unit_ % R.modulus(), R.inv(o.unit_ % R.modulus())), prec);
}

PadicNum PadicNum::pow_int(long e) const {
    if (e < 0) {
        PadicNum inv = PadicNum::make(p_, N_, 0, 1, N_) / *this;
        return inv.pow_int(-e);
    }
    PadicNum acc = PadicNum::make(p_, N_, 0, 1, N_);
    PadicNum b = *this;
    while (e) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

std::optional<u64> PadicNum::residue_mod(int k) const {
    if (abs_prec() < k) return std::nullopt;
    if (zero_) return 0;
    if (val_ < 0) return std::nullopt;
    Zq R((u64)p_, k);
    if (val_ >= k) return 0;
    return R.mul(unit_ % R.modulus(), R.pow_p((int)val_));
}

std::optional<u64> PadicNum::digit(int i) const {
    if (zero_) {
        if (zero_abs_ > i) return 0;
        return std::nullopt;
    }
    if (i < val_) return 0;
    if (i - val_ >= prec_) return std::nullopt;
    u64 u = unit_;
    for (long j = val_; j < i; ++j) u /= (u64)p_;
    return u % (u64)p_;
}

bool PadicNum::congruent_mod(const PadicNum& o, int k) const {
    PadicNum d = *this - o;
    if (d.zero_) {
        if (d.zero_abs_ < k) fail(errc::precision_exceeded, "insufficient precision for comparison");
        return true;
    }
    return d.val_ >= k;
}

std::string PadicNum::str() const {
    std::ostringstream os;
    if (zero_) {
        if (is_exact_zero()) os << "0";
        else os << "O(" << p_ << "^" << zero_abs_ << ")";
        return os.str();
    }
    os << p_ << "^" << val_ << " * " << unit_ << " + O(" << p_ << "^" << (val_ + prec_) << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Split primes and embeddings

QuadInt quad_split_prime(const QuadField& K, long p) {
    if (p < 3 || !is_prime_u64((u64)p)) fail(errc::parse_error, "p must be an odd prime");
    if (K.D() % p == 0) fail(errc::ramified_prime, "p divides D");
    long D = K.D();
    if (K.half_basis()) {
        // s^2 + D t^2 = 4p with s == t (mod 2); minimal t >= 0, then s >= 0.
        for (long t = 0; D * t * t <= 4 * p; ++t) {
            long s2 = 4 * p - D * t * t;
            long s = (long)(std::sqrt((double)s2) + 0.5);
            while (s * s > s2) --s;
            while ((s + 1) * (s + 1) <= s2) ++s;
            if (s * s == s2 && ((s - t) % 2 + 2) % 2 == 0)
                return QuadInt(K, s, t);
        }
    } else {
        // x^2 + D y^2 = p; element x + y sqrt(-D), minimal y >= 0 then x >= 0.
        for (long y = 0; D * y * y <= p; ++y) {
            long x2 = p - D * y * y;
            long x = (long)(std::sqrt((double)x2) + 0.5);
            while (x * x > x2) --x;
            while ((x + 1) * (x + 1) <= x2) ++x;
            if (x * x == x2) return QuadInt(K, 2 * x, 2 * y);
        }
    }
    fail(errc::inert_prime, "p is inert in the field (norm equation unsolvable)");
}

u64 hensel_sqrt(u64 c, long p, int N) {
    Zq R((u64)p, N);
    return R.sqrt_unit(c % R.modulus());
}

u64 SplitPrime::sqrt_minus_d(int N) const {
    Zq R((u64)p, N);
    u64 c = R.reduce_ll(-K.D());
    u64 r = R.sqrt_unit(c);
    if (r % (u64)p != (u64)r_mod_p) r = R.modulus() - r;
    return r;
}

SplitPrime make_split_prime(const QuadField& K, long p) {
    QuadInt pi = quad_split_prime(K, p);
    // Choose the sqrt(-D) residue that lands pi in the maximal ideal:
    // (s + t r) / 2 == 0 (mod p) for exactly one of the two roots.
    auto r0 = sqrt_mod_prime((u64)(((-K.D()) % p + p) % p), (u64)p);
    if (!r0) fail(errc::inert_prime, "-D is a non-residue mod p");
    u64 inv2 = inv_mod(2, (u64)p);
    auto embeds_to_zero = [&](u64 r) {
        mpz_class num = pi.s() + pi.t() * mpz_class((unsigned long)r);
        mpz_class m = num % p;
        if (m < 0) m += p;
        return (m.get_ui() * (u128)inv2) % (u64)p == 0;
    };
    u64 r = *r0;
    if (!embeds_to_zero(r)) {
        r = (u64)p - r;
        if (!embeds_to_zero(r)) fail(errc::internal_ambiguity, "no embedding orients pi");
    }
    return SplitPrime(K, p, pi, pi.conj(), (long)r);
}

PadicNum embed_rational(const BigRat& x, long p, int N) {
    if (x == 0) return PadicNum::zero(p, N);
    long v = padic_valuation(x, p);
    Zq R((u64)p, N);
    mpz_class num = x.get_num(), den = x.get_den();
    const long vn = padic_valuation(num, p), vd = padic_valuation(den, p);
    for (long i = 0; i < vn; ++i)
        mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(), (unsigned long)p);
    for (long i = 0; i < vd; ++i)
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), (unsigned long)p);
    mpz_class q((unsigned long)R.modulus());
    mpz_class nr = num % q; if (nr < 0) nr += q;
    mpz_class dr = den % q; if (dr < 0) dr += q;
    u64 u = R.mul(nr.get_ui(), R.inv(dr.get_ui()));
    return PadicNum::make(p, N, v, u, N);
}

long pi_valuation(const QuadInt& q, const SplitPrime& sp) {
    if (q.is_zero()) fail(errc::zero_divisor, "pi-valuation of zero");
    QuadInt cur = q;
    long v = 0;
    QuadInt pbar = sp.pi_bar;
    // q = pi * x exactly when conj(pi) * q is divisible by p.
    for (;;) {
        QuadInt prod = cur * pbar;
        if (prod.s() % sp.p != 0 || prod.t() % sp.p != 0) return v;
        cur = QuadInt(sp.K, prod.s() / sp.p, prod.t() / sp.p);
        ++v;
    }
}

PadicNum embed_quad(const QuadInt& q, const SplitPrime& sp, int N) {
    if (q.is_zero()) return PadicNum::zero(sp.p, N);
    long v = pi_valuation(q, sp);
    // Strip the pi part exactly. q = pi^v * u with u a unit, and
    // embed(pi) = p / embed(pi_bar), so the unit of embed(q) picks up a
    // factor embed(pi_bar)^{-v}.
    QuadInt unit_part = q;
    for (long i = 0; i < v; ++i) unit_part = unit_part.div_exact(sp.pi);
    Zq R((u64)sp.p, N);
    u64 r = sp.sqrt_minus_d(N);
    mpz_class qmod((unsigned long)R.modulus());
    auto embed_unit = [&](const QuadInt& w) -> u64 {
        mpz_class num = w.s() + w.t() * mpz_class((unsigned long)r);
        mpz_class m = num % qmod;
        if (m < 0) m += qmod;
        return R.mul(m.get_ui(), R.inv(2 % R.modulus()));
    };
    u64 u = embed_unit(unit_part);
    if (v != 0) u = R.mul(u, R.pow(R.inv(embed_unit(sp.pi_bar)), (u64)v));
    if (u % (u64)sp.p == 0) fail(errc::internal_ambiguity, "pi-free part embedded to a non-unit");
    return PadicNum::make(sp.p, N, v, u, N);
}

PadicNum embed_k(const KNumber& x, const SplitPrime& sp, int N) {
    if (x.is_zero()) return PadicNum::zero(sp.p, N);
    // Clear denominators: m x lies in O_K (stored as (2mu + 2mv sqrt(-D))/2),
    // so x = q / m. Valuations of both parts are exact, so N digits of
    // relative precision survive the division.
    mpz_class m = lcm(x.u().get_den(), x.v().get_den());
    BigRat su = x.u() * BigRat(m) * 2, sv = x.v() * BigRat(m) * 2;
    QuadInt q(sp.K, su.get_num(), sv.get_num());  // m x
    PadicNum num = embed_quad(q, sp, N);
    PadicNum den = embed_rational(BigRat(m), sp.p, N);
    return num / den;
}

}  // namespace cmc
