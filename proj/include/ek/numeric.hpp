#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ek {

using cplx = std::complex<double>;

/// Hard limit for every iterative scheme in the library.  Hitting it is an
/// error, never a silent truncation.
inline constexpr std::size_t max_iterations = 10000;

/// Shared precision knobs.  All tolerances are absolute against the native
/// double format; extended precision is out of scope.
struct PrecisionConfig {
    /// Slowly convergent lattice sums (g2, g3, quasi-periods) run over
    /// |gamma| <= truncation_radius_factor * sqrt(A).
    double truncation_radius_factor = 1600.0;
    /// Termination tolerance for series / continued fractions and the
    /// per-term truncation target of exponentially convergent lattice sums.
    double quad_tol = 1e-10;
    /// Advertised accuracy of top-level results.
    double target_abs_error = 1e-9;

    void validate() const
    {
        if (truncation_radius_factor < 10.0) {
            throw std::invalid_argument("PrecisionConfig: truncation_radius_factor must be >= 10");
        }
        if (!(quad_tol > 0.0) || !(quad_tol < target_abs_error) || !(target_abs_error < 1.0)) {
            throw std::invalid_argument("PrecisionConfig: need 0 < quad_tol < target_abs_error < 1");
        }
    }
};

/// Euler's constant c = lim (1 + 1/2 + ... + 1/n - log n).
inline constexpr double euler_constant()
{
    return 0.57721566490153286;
}

inline bool is_finite(const cplx &z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline cplx require_finite(const cplx &z, const char *what)
{
    if (!is_finite(z)) {
        throw std::domain_error(std::string(what) + ": non-finite complex value");
    }
    return z;
}

namespace detail {

// expm1 for complex arguments; series for small |w| to avoid cancellation.
inline cplx expm1(const cplx &w)
{
    if (std::abs(w) >= 0.5) {
        return std::exp(w) - 1.0;
    }
    cplx term = w, sum = w;
    for (std::size_t k = 2; k < 64; ++k) {
        term *= w / static_cast<double>(k);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum) + 1e-300) {
            break;
        }
    }
    return sum;
}

// Godfrey's Lanczos coefficients, g = 607/128.
inline constexpr double lanczos_g = 4.7421875;
inline constexpr double lanczos_coef[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

inline cplx gamma_lanczos(cplx s)
{
    s -= 1.0;
    cplx acc = lanczos_coef[0];
    for (int k = 1; k < 15; ++k) {
        acc += lanczos_coef[k] / (s + static_cast<double>(k));
    }
    const cplx t = s + (lanczos_g + 0.5);
    return std::sqrt(2.0 * M_PI) * std::pow(t, s + 0.5) * std::exp(-t) * acc;
}

} // namespace detail

/// Euler gamma function on the complex plane (reflection below Re s = 1/2).
/// Arguments within quad_tol of a pole (s = 0, -1, -2, ...) are rejected.
inline cplx gamma(const cplx &s, const PrecisionConfig &cfg = {})
{
    const double k = std::round(s.real());
    if (k <= 0.0 && std::abs(s - cplx(k, 0.0)) < cfg.quad_tol) {
        throw std::domain_error("gamma: argument at a non-positive-integer pole");
    }
    if (s.real() >= 0.5) {
        return require_finite(detail::gamma_lanczos(s), "gamma");
    }
    const cplx v = M_PI / (std::sin(M_PI * s) * detail::gamma_lanczos(1.0 - s));
    return require_finite(v, "gamma");
}

namespace detail {

// Legendre continued fraction by modified Lentz, valid for x >= |s| + 1.
inline cplx uig_continued_fraction(const cplx &s, double x, double tol)
{
    constexpr double tiny = 1e-300;
    cplx b = x + 1.0 - s;
    cplx c = 1.0 / tiny;
    cplx d = (std::abs(b) < tiny) ? cplx(1.0 / tiny) : 1.0 / b;
    cplx h = d;
    for (std::size_t i = 1; i <= max_iterations; ++i) {
        const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const cplx delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < tol) {
            return std::exp(-x + s * std::log(x)) * h;
        }
    }
    throw std::runtime_error("upper_incomplete_gamma: continued fraction did not converge");
}

// Gamma(s) minus the lower incomplete gamma in Kummer form,
// gamma_low = x^s e^{-x} sum_{n>=0} x^n / (s (s+1) ... (s+n)).
inline cplx uig_kummer_split(const cplx &s, double x, const PrecisionConfig &cfg)
{
    cplx term = 1.0 / s, sum = term;
    for (std::size_t n = 1; n <= max_iterations; ++n) {
        term *= x / (s + static_cast<double>(n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) {
            return gamma(s, cfg) - std::exp(s * std::log(x) - x) * sum;
        }
    }
    throw std::runtime_error("upper_incomplete_gamma: Kummer series did not converge");
}

// Stable split around s = 0:
// G(s,x) = (Gamma(s+1)-1)/s - (x^s-1)/s - x^s sum_{n>=1} (-x)^n/(n! (s+n)).
// Conditioning degrades like 1e-15/|s| as s -> 0; exact non-positive
// integers take the dedicated path below.
inline cplx uig_near_zero(const cplx &s, double x, const PrecisionConfig &cfg)
{
    const cplx g1 = (gamma_lanczos(s + 1.0) - 1.0) / s;
    const cplx g2 = expm1(s * std::log(x)) / s;
    cplx p = 1.0, sum = 0.0;
    double fact = 1.0;
    for (std::size_t n = 1; n <= max_iterations; ++n) {
        p *= -x;
        fact *= static_cast<double>(n);
        const cplx t = p / (fact * (s + static_cast<double>(n)));
        sum += t;
        if (std::abs(t) < 1e-17 * std::max(std::abs(sum), 1e-30) + 1e-300) {
            return g1 - g2 - std::exp(s * std::log(x)) * sum;
        }
    }
    throw std::runtime_error("upper_incomplete_gamma: near-zero series did not converge");
}

// Exponential integral E1(x) = Gamma(0, x) for x < 1.
inline double e1_series(double x)
{
    double acc = -euler_constant() - std::log(x);
    double p = 1.0, fact = 1.0;
    for (std::size_t n = 1; n <= max_iterations; ++n) {
        p *= -x;
        fact *= static_cast<double>(n);
        const double t = p / (static_cast<double>(n) * fact);
        acc -= t;
        if (std::abs(t) < 1e-18 * std::max(std::abs(acc), 1e-30) + 1e-300) {
            return acc;
        }
    }
    throw std::runtime_error("upper_incomplete_gamma: E1 series did not converge");
}

// Gamma(-m, x), integer m >= 0, via downward recurrence from E1.
inline double uig_nonpositive_integer(long m, double x, const PrecisionConfig &cfg)
{
    double g = (x < 1.0) ? e1_series(x) : uig_continued_fraction(cplx(0.0), x, cfg.quad_tol).real();
    for (long j = 0; j < m; ++j) {
        const double sj = -static_cast<double>(j) - 1.0;
        g = (g - std::pow(x, sj) * std::exp(-x)) / sj;
    }
    return g;
}

} // namespace detail

/// Upper incomplete gamma Gamma(s, x) = int_x^inf e^{-t} t^{s-1} dt for
/// complex s and real x > 0.
inline cplx upper_incomplete_gamma(const cplx &s, double x, const PrecisionConfig &cfg = {})
{
    if (!(x > 0.0)) {
        throw std::domain_error("upper_incomplete_gamma: requires x > 0");
    }
    if (x >= std::abs(s) + 1.0) {
        return require_finite(detail::uig_continued_fraction(s, x, cfg.quad_tol), "upper_incomplete_gamma");
    }
    const double k = std::round(s.real());
    if (k <= 0.0 && std::abs(s - cplx(k, 0.0)) < cfg.quad_tol) {
        return cplx(detail::uig_nonpositive_integer(-static_cast<long>(k), x, cfg), 0.0);
    }
    if (std::abs(s) < 0.5) {
        return require_finite(detail::uig_near_zero(s, x, cfg), "upper_incomplete_gamma");
    }
    if (s.real() >= 0.25) {
        return require_finite(detail::uig_kummer_split(s, x, cfg), "upper_incomplete_gamma");
    }
    // Re(s) < 0.25: shift into the stable region, recurse down.
    const long m = static_cast<long>(std::ceil(0.25 - s.real()));
    const cplx sh = s + static_cast<double>(m);
    cplx g = (x >= std::abs(sh) + 1.0) ? detail::uig_continued_fraction(sh, x, cfg.quad_tol)
                                       : detail::uig_kummer_split(sh, x, cfg);
    for (long j = m; j >= 1; --j) {
        const cplx sj = s + static_cast<double>(j - 1);
        g = (g - std::exp(sj * std::log(x)) * std::exp(-x)) / sj;
    }
    return require_finite(g, "upper_incomplete_gamma");
}

} // namespace ek
