#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ek::series {

/// Truncated power series as a coefficient vector c[0..M-1], i.e. the class
/// of the series modulo t^M.  Operations are parameterized by a field
/// object F supplying the coefficient arithmetic hooks:
///   typename F::value_type, F.from_long(long), F.is_zero(const value_type&).
/// Both exact rationals and capped-precision p-adic scalars plug in; every
/// operation respects both the coefficient precision and the t-adic
/// truncation exactly.

template <typename F>
using Coeffs = std::vector<typename F::value_type>;

template <typename F>
Coeffs<F> constant(const F &f, long v, std::size_t order)
{
    Coeffs<F> r(order, f.from_long(0));
    if (order > 0) r[0] = f.from_long(v);
    return r;
}

template <typename F>
Coeffs<F> identity(const F &f, std::size_t order)
{
    Coeffs<F> r(order, f.from_long(0));
    if (order > 1) r[1] = f.from_long(1);
    return r;
}

template <typename F>
Coeffs<F> add(const F &f, const Coeffs<F> &a, const Coeffs<F> &b)
{
    const std::size_t order = std::min(a.size(), b.size());
    Coeffs<F> r(order, f.from_long(0));
    for (std::size_t k = 0; k < order; ++k) r[k] = a[k] + b[k];
    return r;
}

template <typename F>
Coeffs<F> sub(const F &f, const Coeffs<F> &a, const Coeffs<F> &b)
{
    const std::size_t order = std::min(a.size(), b.size());
    Coeffs<F> r(order, f.from_long(0));
    for (std::size_t k = 0; k < order; ++k) r[k] = a[k] - b[k];
    return r;
}

template <typename F>
Coeffs<F> scale(const F &, const typename F::value_type &c, const Coeffs<F> &a)
{
    Coeffs<F> r = a;
    for (auto &x : r) x = c * x;
    return r;
}

template <typename F>
Coeffs<F> mul(const F &f, const Coeffs<F> &a, const Coeffs<F> &b)
{
    const std::size_t order = std::min(a.size(), b.size());
    Coeffs<F> r(order, f.from_long(0));
    for (std::size_t i = 0; i < order; ++i) {
        if (f.is_zero(a[i])) continue;
        for (std::size_t j = 0; i + j < order; ++j) {
            if (f.is_zero(b[j])) continue;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    return r;
}

template <typename F>
Coeffs<F> pow_int(const F &f, const Coeffs<F> &a, unsigned long e)
{
    Coeffs<F> acc = constant(f, 1, a.size());
    Coeffs<F> base = a;
    for (unsigned long k = e; k > 0; k >>= 1) {
        if (k & 1UL) acc = mul(f, acc, base);
        if (k > 1) base = mul(f, base, base);
    }
    return acc;
}

template <typename F>
Coeffs<F> derivative(const F &f, const Coeffs<F> &a)
{
    if (a.empty()) return a;
    Coeffs<F> r(a.size(), f.from_long(0));
    for (std::size_t k = 1; k < a.size(); ++k) {
        r[k - 1] = a[k] * f.from_long(static_cast<long>(k));
    }
    return r;
}

/// Antiderivative with zero constant term; divides by k+1, which the
/// coefficient field must support (p-adic fields track the precision cost).
template <typename F>
Coeffs<F> integrate(const F &f, const Coeffs<F> &a)
{
    Coeffs<F> r(a.size(), f.from_long(0));
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        r[k + 1] = a[k] / f.from_long(static_cast<long>(k + 1));
    }
    return r;
}

/// f(g(t)) for g with g(0) = 0, by Horner over series.
template <typename F>
Coeffs<F> compose(const F &f, const Coeffs<F> &outer, const Coeffs<F> &inner)
{
    if (!inner.empty() && !f.is_zero(inner[0])) {
        throw std::invalid_argument("series::compose: inner series must vanish at 0");
    }
    const std::size_t order = std::min(outer.size(), inner.size());
    Coeffs<F> r(order, f.from_long(0));
    for (std::size_t k = outer.size(); k-- > 0;) {
        r = mul(f, r, inner);
        if (!r.empty()) r[0] = r[0] + outer[k];
    }
    return r;
}

/// Reciprocal of a unit series (nonzero constant term).
template <typename F>
Coeffs<F> inverse_unit(const F &f, const Coeffs<F> &a)
{
    if (a.empty() || f.is_zero(a[0])) {
        throw std::invalid_argument("series::inverse_unit: constant term must be a unit");
    }
    Coeffs<F> r(a.size(), f.from_long(0));
    r[0] = f.from_long(1) / a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
        auto s = f.from_long(0);
        for (std::size_t j = 1; j <= k; ++j) {
            s = s + a[j] * r[k - j];
        }
        r[k] = -(s / a[0]);
    }
    return r;
}

/// log of a series with constant term 1, via L' = a'/a integrated.
template <typename F>
Coeffs<F> log_unit(const F &f, const Coeffs<F> &a)
{
    if (a.empty() || !f.is_zero(a[0] - f.from_long(1))) {
        throw std::invalid_argument("series::log_unit: constant term must be 1");
    }
    return integrate(f, mul(f, derivative(f, a), inverse_unit(f, a)));
}

/// exp of a series with zero constant term, via E' = a' E.
template <typename F>
Coeffs<F> exp_at_zero(const F &f, const Coeffs<F> &a)
{
    if (!a.empty() && !f.is_zero(a[0])) {
        throw std::invalid_argument("series::exp_at_zero: constant term must vanish");
    }
    Coeffs<F> e(a.size(), f.from_long(0));
    if (e.empty()) return e;
    e[0] = f.from_long(1);
    const Coeffs<F> ap = derivative(f, a);
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        auto s = f.from_long(0);
        for (std::size_t j = 0; j <= k; ++j) {
            s = s + ap[j] * e[k - j];
        }
        e[k + 1] = s / f.from_long(static_cast<long>(k + 1));
    }
    return e;
}

/// Compositional inverse of f = t + O(t^2), by Newton iteration
/// g <- g - (f(g) - t)/f'(g).
template <typename F>
Coeffs<F> revert(const F &f, const Coeffs<F> &a)
{
    if (a.size() < 2 || !f.is_zero(a[0]) || !f.is_zero(a[1] - f.from_long(1))) {
        throw std::invalid_argument("series::revert: series must be t + O(t^2)");
    }
    Coeffs<F> g = identity(f, a.size());
    const Coeffs<F> ap = derivative(f, a);
    std::size_t correct = 1;
    while (correct < a.size()) {
        Coeffs<F> err = compose(f, a, g);
        err[1] = err[1] - f.from_long(1);
        g = sub(f, g, mul(f, err, inverse_unit(f, compose(f, ap, g))));
        correct *= 2;
    }
    return g;
}

/// Multiply by t^k (coefficients shifted up, truncation preserved).
template <typename F>
Coeffs<F> shift_up(const F &f, const Coeffs<F> &a, std::size_t k)
{
    Coeffs<F> r(a.size(), f.from_long(0));
    for (std::size_t j = 0; j + k < a.size(); ++j) r[j + k] = a[j];
    return r;
}

/// Divide by t^k; the dropped low-order coefficients must vanish.
template <typename F>
Coeffs<F> shift_down(const F &f, const Coeffs<F> &a, std::size_t k)
{
    for (std::size_t j = 0; j < k && j < a.size(); ++j) {
        if (!f.is_zero(a[j])) {
            throw std::invalid_argument("series::shift_down: series not divisible by t^k");
        }
    }
    Coeffs<F> r(a.size(), f.from_long(0));
    for (std::size_t j = k; j < a.size(); ++j) r[j - k] = a[j];
    return r;
}

/// Laurent coefficients of the Weierstrass wp-function,
/// wp(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}:
/// c_2 = g2/20, c_3 = g3/28, c_k = 3 sum_{m=2}^{k-2} c_m c_{k-m} / ((2k+1)(k-3)).
template <typename T>
std::vector<T> wp_laurent_coefficients(const T &g2, const T &g3, int terms)
{
    std::vector<T> c(static_cast<std::size_t>(terms), T(0));
    if (terms > 2) c[2] = g2 / T(20);
    if (terms > 3) c[3] = g3 / T(28);
    for (int k = 4; k < terms; ++k) {
        T acc(0);
        for (int m = 2; m <= k - 2; ++m) {
            acc += c[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(k - m)];
        }
        c[static_cast<std::size_t>(k)] = acc * T(3) / (T(2 * k + 1) * T(k - 3));
    }
    return c;
}

} // namespace ek::series
