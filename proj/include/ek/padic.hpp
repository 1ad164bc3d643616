#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "ek/numeric.hpp"

namespace ek::padic {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

namespace detail {

inline bool is_prime(long p)
{
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

inline BigInt pow_int(long p, int e)
{
    BigInt acc = 1, b = p;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) acc *= b;
        b *= b;
    }
    return acc;
}

inline BigInt mod_positive(const BigInt &a, const BigInt &m)
{
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

// Inverse mod p^N by extended gcd.
inline BigInt mod_inverse(const BigInt &a, const BigInt &m)
{
    BigInt old_r = mod_positive(a, m), r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = std::move(r);
        r = std::move(t);
        t = old_s - q * s;
        old_s = std::move(s);
        s = std::move(t);
    }
    if (old_r != 1) {
        throw std::domain_error("padic: element not invertible");
    }
    return mod_positive(old_s, m);
}

inline int valuation_of(BigInt &v, long p)
{
    int e = 0;
    while (v != 0 && v % p == 0) {
        v /= p;
        ++e;
    }
    return e;
}

} // namespace detail

/// Capped-precision scalar in Q_p: value = unit * p^valuation known modulo
/// p^{valuation + N}.  Zero is flagged separately and carries the exponent
/// it is known to vanish to.
class PadicNumber {
  public:
    PadicNumber(long p, int valuation, BigInt unit, int precision)
        : prime_(p), val_(valuation), unit_(std::move(unit)), prec_(precision)
    {
        check_prime(p);
        if (prec_ < 1) throw std::invalid_argument("PadicNumber: precision must be >= 1");
        const BigInt m = detail::pow_int(prime_, prec_);
        unit_ = detail::mod_positive(unit_, m);
        if (unit_ == 0 || unit_ % prime_ == 0) {
            throw std::invalid_argument("PadicNumber: unit must be coprime to p");
        }
    }

    static PadicNumber zero(long p, int known_exponent)
    {
        check_prime(p);
        PadicNumber x(p);
        x.zero_ = true;
        x.val_ = known_exponent;
        return x;
    }

    static PadicNumber from_integer(const BigInt &v, long p, int N)
    {
        check_prime(p);
        if (N < 1) throw std::invalid_argument("PadicNumber: precision must be >= 1");
        if (v == 0) return zero(p, N);
        BigInt u = v;
        const int e = detail::valuation_of(u, p);
        return PadicNumber(p, e, u, N);
    }

    static PadicNumber from_rational(const BigRat &v, long p, int N)
    {
        check_prime(p);
        if (v == 0) return zero(p, N);
        BigInt num = boost::multiprecision::numerator(v);
        BigInt den = boost::multiprecision::denominator(v);
        const int en = detail::valuation_of(num, p);
        const int ed = detail::valuation_of(den, p);
        const BigInt m = detail::pow_int(p, N);
        const BigInt u = detail::mod_positive(num, m) * detail::mod_inverse(den, m);
        return PadicNumber(p, en - ed, u, N);
    }

    long prime() const { return prime_; }
    bool is_zero() const { return zero_; }
    int valuation() const
    {
        if (zero_) throw std::domain_error("PadicNumber: valuation of zero");
        return val_;
    }
    const BigInt &unit() const { return unit_; }
    int precision() const { return prec_; }
    /// Exponent k in "value known mod p^k".
    int known_mod_exponent() const { return zero_ ? val_ : val_ + prec_; }

    PadicNumber operator-() const
    {
        if (zero_) return *this;
        const BigInt m = detail::pow_int(prime_, prec_);
        return PadicNumber(prime_, val_, m - unit_, prec_);
    }

    friend PadicNumber operator+(const PadicNumber &a, const PadicNumber &b)
    {
        a.check_same(b);
        const int known = std::min(a.known_mod_exponent(), b.known_mod_exponent());
        if (a.zero_ && b.zero_) return zero(a.prime_, known);
        if (a.zero_) return b.truncated_to_known(known);
        if (b.zero_) return a.truncated_to_known(known);
        const int v = std::min(a.val_, b.val_);
        const int digits = known - v;
        if (digits <= 0) return zero(a.prime_, known);
        const BigInt m = detail::pow_int(a.prime_, digits);
        BigInt s = detail::mod_positive(a.unit_ * detail::pow_int(a.prime_, a.val_ - v) +
                                            b.unit_ * detail::pow_int(a.prime_, b.val_ - v),
                                        m);
        if (s == 0) return zero(a.prime_, known);
        const int e = detail::valuation_of(s, a.prime_);
        return PadicNumber(a.prime_, v + e, s, known - (v + e));
    }

    friend PadicNumber operator-(const PadicNumber &a, const PadicNumber &b) { return a + (-b); }

    friend PadicNumber operator*(const PadicNumber &a, const PadicNumber &b)
    {
        a.check_same(b);
        if (a.zero_ || b.zero_) {
            // zero known mod p^k times |x| <= p^-v vanishes mod p^{k+v}
            if (a.zero_ && b.zero_) return zero(a.prime_, a.val_ + b.val_);
            const PadicNumber &z = a.zero_ ? a : b;
            const PadicNumber &x = a.zero_ ? b : a;
            return zero(a.prime_, z.val_ + x.val_);
        }
        const int N = std::min(a.prec_, b.prec_);
        const BigInt m = detail::pow_int(a.prime_, N);
        return PadicNumber(a.prime_, a.val_ + b.val_, detail::mod_positive(a.unit_ * b.unit_, m), N);
    }

    friend PadicNumber operator/(const PadicNumber &a, const PadicNumber &b)
    {
        a.check_same(b);
        if (b.zero_) throw std::domain_error("PadicNumber: division by zero");
        if (a.zero_) return zero(a.prime_, a.val_ - b.val_);
        const int N = std::min(a.prec_, b.prec_);
        const BigInt m = detail::pow_int(a.prime_, N);
        return PadicNumber(a.prime_, a.val_ - b.val_,
                           detail::mod_positive(a.unit_ * detail::mod_inverse(b.unit_, m), m), N);
    }

    /// Truncate to relative precision at most N.
    PadicNumber truncated(int N) const
    {
        if (zero_ || N >= prec_) return *this;
        if (N < 1) throw std::invalid_argument("PadicNumber: precision must be >= 1");
        return PadicNumber(prime_, val_, unit_ % detail::pow_int(prime_, N), N);
    }

    /// v_p(a - b) >= k, i.e. the two values agree modulo p^k.
    bool congruent(const PadicNumber &b, int k) const
    {
        const PadicNumber d = *this - b;
        return d.zero_ ? d.val_ >= k : d.val_ >= k;
    }

    /// Representative in [0, p^k) of a p-integral value modulo p^k.
    BigInt residue(int k) const
    {
        if (zero_) {
            if (val_ < k) throw std::domain_error("PadicNumber: residue beyond known precision");
            return 0;
        }
        if (val_ < 0) throw std::domain_error("PadicNumber: residue of a non-integral value");
        if (val_ + prec_ < k) throw std::domain_error("PadicNumber: residue beyond known precision");
        return detail::mod_positive(unit_ * detail::pow_int(prime_, val_), detail::pow_int(prime_, k));
    }

    std::string to_string() const
    {
        std::ostringstream os;
        if (zero_) {
            os << "0 (mod " << prime_ << "^" << val_ << ")";
        } else {
            os << unit_ << "*" << prime_ << "^" << val_ << " (mod " << prime_ << "^" << prec_ << ")";
        }
        return os.str();
    }

  private:
    explicit PadicNumber(long p) : prime_(p) {}

    static void check_prime(long p)
    {
        if (p < 5 || !detail::is_prime(p)) {
            throw std::invalid_argument("PadicNumber: p must be a prime >= 5");
        }
    }

    void check_same(const PadicNumber &b) const
    {
        if (prime_ != b.prime_) {
            throw std::invalid_argument("PadicNumber: mixed primes");
        }
    }

    PadicNumber truncated_to_known(int known) const
    {
        if (zero_) return zero(prime_, std::min(val_, known));
        const int N = known - val_;
        if (N <= 0) return zero(prime_, known);
        return truncated(N);
    }

    long prime_;
    bool zero_ = false;
    int val_ = 0;
    BigInt unit_ = 0;
    int prec_ = 1;
};

/// The (p-1)-th root of unity congruent to y mod p, by the stabilizing
/// iteration x -> x^p mod p^N.
inline PadicNumber teichmuller(const BigInt &y, long p, int N)
{
    if (!detail::is_prime(p) || p < 5) {
        throw std::invalid_argument("teichmuller: p must be a prime >= 5");
    }
    if (N < 1) throw std::invalid_argument("teichmuller: precision must be >= 1");
    const BigInt m = detail::pow_int(p, N);
    BigInt x = detail::mod_positive(y, m);
    if (x % p == 0) {
        throw std::domain_error("teichmuller: y must be coprime to p");
    }
    for (std::size_t i = 0; i < max_iterations; ++i) {
        BigInt next = boost::multiprecision::powm(x, BigInt(p), m);
        if (next == x) {
            return PadicNumber(p, 0, x, N);
        }
        x = std::move(next);
    }
    throw std::runtime_error("teichmuller: iteration did not stabilize");
}

/// Iwasawa-branch p-adic logarithm: log_p(p) = 0 and log_p vanishes on
/// Teichmueller roots, so log_p(x) = log of the 1-unit part by the
/// alternating series.
inline PadicNumber padic_log(const PadicNumber &x)
{
    if (x.is_zero()) {
        throw std::domain_error("padic_log: zero input");
    }
    const long p = x.prime();
    const int N = x.precision();
    // Iwasawa branch: the p^valuation factor and the Teichmueller part both
    // map to zero, leaving the 1-unit <x> = unit / omega(unit).
    const PadicNumber omega = teichmuller(x.unit(), p, N);
    const PadicNumber one_unit =
        PadicNumber(p, 0, x.unit(), N) / PadicNumber(p, 0, omega.unit(), N);
    const PadicNumber z = one_unit - PadicNumber(p, 0, BigInt(1), N);
    if (z.is_zero()) {
        return PadicNumber::zero(p, z.known_mod_exponent());
    }
    const int vz = z.valuation();
    const int target = N + vz; // absolute precision of the n = 1 term
    PadicNumber acc = PadicNumber::zero(p, target);
    PadicNumber zpow = z;
    for (std::size_t n = 1; n <= max_iterations; ++n) {
        const PadicNumber term =
            zpow / PadicNumber::from_integer(BigInt(static_cast<long>(n)), p, N);
        acc = (n % 2 == 1) ? acc + term : acc - term;
        // v(z^{n+1}/(n+1)) >= (n+1) vz - v_p(n+1)
        BigInt next = static_cast<long>(n + 1);
        const int vp_next = detail::valuation_of(next, p);
        if (zpow.is_zero() ||
            static_cast<int>(n + 1) * vz - vp_next > acc.known_mod_exponent()) {
            return acc;
        }
        zpow = zpow * z;
    }
    throw std::runtime_error("padic_log: series did not terminate");
}

} // namespace ek::padic
