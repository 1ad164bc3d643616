#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ek/padic.hpp"
#include "ek/report.hpp"
#include "ek/series.hpp"

namespace ek::padic {

struct RationalField {
    using value_type = BigRat;
    BigRat from_long(long v) const { return BigRat(v); }
    bool is_zero(const BigRat &v) const { return v == 0; }
};

struct PadicField {
    long p;
    int N;
    using value_type = PadicNumber;
    PadicNumber from_long(long v) const { return PadicNumber::from_integer(BigInt(v), p, N); }
    bool is_zero(const PadicNumber &v) const { return v.is_zero(); }
};

using RatSeries = std::vector<BigRat>;
using PadicSeries = std::vector<PadicNumber>;

inline int rational_valuation(const BigRat &v, long p)
{
    if (v == 0) return 0;
    BigInt num = boost::multiprecision::numerator(v);
    BigInt den = boost::multiprecision::denominator(v);
    return detail::valuation_of(num, p) - detail::valuation_of(den, p);
}

/// Rational model y^2 = 4x^3 - g2 x - g3 with good reduction at p >= 5.
struct CMCurveModel {
    BigRat g2;
    BigRat g3;
    long p = 5;
    std::string pi_norm_note;

    static CMCurveModel create(const BigRat &g2, const BigRat &g3, long p)
    {
        if (p < 5 || !detail::is_prime(p)) {
            throw std::invalid_argument("CMCurveModel: p must be a prime >= 5");
        }
        const BigRat delta = g2 * g2 * g2 - 27 * g3 * g3;
        if (delta == 0) {
            throw std::domain_error("CMCurveModel: singular model (Delta = 0)");
        }
        if (rational_valuation(g2, p) < 0 || rational_valuation(g3, p) < 0 ||
            rational_valuation(delta, p) != 0) {
            throw std::domain_error("CMCurveModel: model does not have good reduction at p");
        }
        CMCurveModel m{g2, g3, p, {}};
        if (g3 == 0) {
            m.pi_norm_note = (p % 4 == 1) ? "j=1728 family: p = 1 mod 4, split/ordinary"
                                          : "j=1728 family: p = 3 mod 4, inert/supersingular";
        } else if (g2 == 0) {
            m.pi_norm_note = (p % 3 == 1) ? "j=0 family: p = 1 mod 3, split/ordinary"
                                          : "j=0 family: p = 2 mod 3, inert/supersingular";
        } else {
            m.pi_norm_note = "CM field not inferred from the model";
        }
        return m;
    }

    BigRat delta() const { return g2 * g2 * g2 - 27 * g3 * g3; }
};

namespace series_detail {

inline const RationalField &rat()
{
    static const RationalField f;
    return f;
}

// Exact square root of a non-negative rational, if it exists.
inline bool rational_sqrt(const BigRat &v, BigRat &out)
{
    if (v < 0) return false;
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    const BigInt sn = boost::multiprecision::sqrt(num);
    const BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return false;
    out = BigRat(sn, sd);
    return true;
}

// All positive divisors of n via trial-division factorization; gives up on
// large prime content (the models in scope are small).
inline std::vector<BigInt> divisors(BigInt n)
{
    if (n < 0) n = -n;
    std::map<BigInt, int> fac;
    for (BigInt d = 2; d * d <= n && d < 2000000; ++d) {
        while (n % d == 0) {
            ++fac[d];
            n /= d;
        }
    }
    if (n > 1) {
        if (n > 4000000000000LL) {
            throw std::domain_error("rational_half_period_values: constant term too large to factor");
        }
        ++fac[n];
    }
    std::vector<BigInt> divs{1};
    for (const auto &[q, e] : fac) {
        const std::size_t sz = divs.size();
        BigInt qp = 1;
        for (int i = 1; i <= e; ++i) {
            qp *= q;
            for (std::size_t j = 0; j < sz; ++j) divs.push_back(divs[j] * qp);
        }
    }
    return divs;
}

} // namespace series_detail

/// The half-period values as exact rationals: the roots of
/// 4x^3 - g2 x - g3, sorted ascending.  Throws when the cubic does not
/// split over Q.
inline std::array<BigRat, 3> rational_half_period_values(const CMCurveModel &model)
{
    std::vector<BigRat> roots;
    if (model.g3 == 0) {
        // 4x(x^2 - g2/4)
        BigRat r;
        if (!series_detail::rational_sqrt(model.g2 / 4, r)) {
            throw std::domain_error("rational_half_period_values: irrational half-period values");
        }
        roots = {BigRat(0), r, -r};
    } else {
        // Monic form x^3 + P x + Q, cleared to integer coefficients.
        const BigRat pc = -model.g2 / 4, qc = -model.g3 / 4;
        const BigInt dp = boost::multiprecision::denominator(pc);
        const BigInt dq = boost::multiprecision::denominator(qc);
        const BigInt d = boost::multiprecision::lcm(dp, dq);
        const BigRat dr(d);
        const BigInt P = boost::multiprecision::numerator(pc * dr * dr);
        const BigInt Q = boost::multiprecision::numerator(qc * dr * dr * dr);
        BigInt root;
        bool found = false;
        for (const BigInt &dv : series_detail::divisors(Q)) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                const BigInt r = sgn ? -dv : dv;
                if (r * r * r + P * r + Q == 0) {
                    root = r;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) {
            throw std::domain_error("rational_half_period_values: irrational half-period values");
        }
        // Deflate: x^2 + r x + (r^2 + P)
        const BigRat disc(-3 * root * root - 4 * P);
        BigRat sq;
        if (!series_detail::rational_sqrt(disc, sq)) {
            throw std::domain_error("rational_half_period_values: irrational half-period values");
        }
        const BigRat r1 = (BigRat(-root) + sq) / 2, r2 = (BigRat(-root) - sq) / 2;
        roots = {BigRat(root) / BigRat(d), r1 / BigRat(d), r2 / BigRat(d)};
    }
    std::sort(roots.begin(), roots.end());
    // the roots must satisfy the original cubic exactly
    for (const auto &e : roots) {
        if (4 * e * e * e - model.g2 * e - model.g3 != 0) {
            throw std::runtime_error("rational_half_period_values: root verification failed");
        }
    }
    return {roots[0], roots[1], roots[2]};
}

/// w(t) with x(t) = w(t)/t^2 on the curve, solving
/// w^2 = w^3 - (g2/4) t^4 w - (g3/4) t^6 by series Newton iteration.
inline RatSeries curve_w_series(const CMCurveModel &model, int order)
{
    namespace s = ek::series;
    const auto &F = series_detail::rat();
    const std::size_t M = static_cast<std::size_t>(order);
    RatSeries w = s::constant(F, 1, M);
    const BigRat c4 = model.g2 / 4, c6 = model.g3 / 4;
    for (std::size_t correct = 1; correct < M; correct *= 2) {
        // f(w) = w^3 - w^2 - c4 t^4 w - c6 t^6
        RatSeries w2 = s::mul(F, w, w);
        RatSeries f = s::sub(F, s::mul(F, w2, w), w2);
        for (std::size_t i = 0; i + 4 < M; ++i) f[i + 4] -= c4 * w[i];
        if (M > 6) f[6] -= c6;
        // f'(w) = 3w^2 - 2w - c4 t^4
        RatSeries fp = s::sub(F, s::scale(F, BigRat(3), w2), s::scale(F, BigRat(2), w));
        if (M > 4) fp[4] -= c4;
        w = s::sub(F, w, s::mul(F, f, s::inverse_unit(F, fp)));
    }
    return w;
}

/// Formal group logarithm lambda(t) for the local parameter t = -2x/y:
/// lambda'(t) = x'(t)/y(t) = 1 - (t/2) w'(t)/w(t), integrated term-by-term.
/// lambda(t) = t + O(t^2) with lambda'(0) = 1.
inline RatSeries formal_group_log(const CMCurveModel &model, int order)
{
    namespace s = ek::series;
    if (order < 2) throw std::invalid_argument("formal_group_log: order must be >= 2");
    const auto &F = series_detail::rat();
    const RatSeries w = curve_w_series(model, order);
    RatSeries ratio = s::mul(F, s::derivative(F, w), s::inverse_unit(F, w)); // w'/w
    RatSeries lam_prime = s::constant(F, 1, static_cast<std::size_t>(order));
    for (std::size_t i = 0; i + 1 < lam_prime.size(); ++i) {
        lam_prime[i + 1] -= ratio[i] / 2;
    }
    return s::integrate(F, lam_prime);
}

/// Taylor series of Weierstrass sigma from the wp Laurent recursion:
/// sigma(z) = z exp(-sum_{k>=2} c_k z^{2k} / (2k (2k-1))).
inline RatSeries sigma_series(const CMCurveModel &model, int order)
{
    namespace s = ek::series;
    if (order < 2) throw std::invalid_argument("sigma_series: order must be >= 2");
    const auto &F = series_detail::rat();
    const std::size_t M = static_cast<std::size_t>(order);
    const auto c = s::wp_laurent_coefficients<BigRat>(model.g2, model.g3, order / 2 + 2);
    RatSeries logser(M, BigRat(0));
    for (std::size_t k = 2; k < c.size() && 2 * k < M; ++k) {
        logser[2 * k] = -c[k] / BigRat(2 * k * (2 * k - 1));
    }
    return s::shift_up(F, s::exp_at_zero(F, logser), 1);
}

/// theta_hat(t) = exp(-e_star z^2/2) sigma(z) composed with z = lambda(t).
inline RatSeries theta_hat_series(const CMCurveModel &model, const BigRat &e_star, int order)
{
    namespace s = ek::series;
    const auto &F = series_detail::rat();
    const std::size_t M = static_cast<std::size_t>(order);
    RatSeries theta = sigma_series(model, order);
    if (e_star != 0) {
        RatSeries q(M, BigRat(0));
        if (M > 2) q[2] = -e_star / 2;
        theta = s::mul(F, s::exp_at_zero(F, q), theta);
    }
    return s::compose(F, theta, formal_group_log(model, order));
}

/// The duplication series [2](t) = lambda^{-1}(2 lambda(t)) of the formal group.
inline RatSeries duplication_series(const CMCurveModel &model, int order)
{
    namespace s = ek::series;
    const auto &F = series_detail::rat();
    const RatSeries lam = formal_group_log(model, order);
    return s::compose(F, s::revert(F, lam), s::scale(F, BigRat(2), lam));
}

/// theta_hat([2]t) by two routes: (a) composition with the formal
/// duplication, (b) the sigma-level identity theta(2z) = -theta(z)^4 wp'(z),
/// which after clearing the t^-3 pole of wp'-hat reads
/// theta_hat([2]t) = 2 t (theta_hat/t)^4 w(t).
inline std::pair<RatSeries, RatSeries> formal_duplication(const CMCurveModel &model,
                                                          const BigRat &e_star, int order)
{
    namespace s = ek::series;
    if (order < 8) throw std::invalid_argument("formal_duplication: order must be >= 8");
    const auto &F = series_detail::rat();
    const RatSeries th = theta_hat_series(model, e_star, order);
    const RatSeries route_a = s::compose(F, th, duplication_series(model, order));
    const RatSeries unit = s::mul(F, s::pow_int(F, s::shift_down(F, th, 1), 4),
                                  curve_w_series(model, order));
    const RatSeries route_b = s::shift_up(F, s::scale(F, BigRat(2), unit), 1);
    return {route_a, route_b};
}

/// Reduce an exact-rational series modulo p^N.  Coefficients with p in the
/// denominator come through as negative-valuation scalars, not errors.
inline PadicSeries reduce_series(const RatSeries &a, long p, int N)
{
    PadicSeries out;
    out.reserve(a.size());
    for (const auto &v : a) {
        out.push_back(PadicNumber::from_rational(v, p, N));
    }
    return out;
}

struct LogThetaHat {
    PadicSeries series;    // log_p of theta_hat(t)/t
    bool has_log_t = true; // the residual log_p(t) of the zero disc, kept symbolic
};

/// Formal p-adic logarithm of theta_hat(t)/t through the reduced p-adic
/// pipeline.  Requires p-integral coefficients up to t^order; the /n
/// precision losses stay visible in the coefficient precisions.
inline LogThetaHat log_theta_hat(const CMCurveModel &model, const BigRat &e_star, int order,
                                 long p, int N)
{
    namespace s = ek::series;
    const RatSeries th = theta_hat_series(model, e_star, order);
    const RatSeries unit = s::shift_down(series_detail::rat(), th, 1);
    for (std::size_t k = 0; k < unit.size(); ++k) {
        if (rational_valuation(unit[k], p) < 0) {
            throw std::domain_error("log_theta_hat: coefficient denominator divisible by p");
        }
    }
    const PadicField F{p, N};
    const PadicSeries reduced = reduce_series(unit, p, N);
    LogThetaHat out{s::log_unit(F, reduced), true};
    for (const auto &c : out.series) {
        if (c.known_mod_exponent() < 1) {
            throw std::runtime_error("log_theta_hat: tracked precision exhausted");
        }
    }
    return out;
}

/// Wire format for p-adic series: a header line
/// "model g2=<r> g3=<r> p=<n> N=<n> M=<n>", then one coefficient per line
/// "k: unit*p^val (mod p^N)".
inline std::string dump_series(const CMCurveModel &model, int N, const PadicSeries &a)
{
    std::ostringstream os;
    os << "model g2=" << model.g2 << " g3=" << model.g3 << " p=" << model.p << " N=" << N
       << " M=" << a.size() << "\n";
    for (std::size_t k = 0; k < a.size(); ++k) {
        os << k << ": " << a[k].to_string() << "\n";
    }
    return os.str();
}

struct PadicDistributionOptions {
    bool perturb_constant = false; // negative control: use Delta^2 + p
};

/// The alpha = 2 theta distribution relation, rationalized through
/// prod_{z2 != 0} theta_{z2}(0)^8 = Delta'^{-2} to eliminate the
/// individually irrational constants:
///   theta_hat([2]t)^8 = Delta^2 Delta'^{-2} theta_hat(t)^32
///                        prod_i (e_i - wp_hat(t))^4,
/// checked as an exact congruence mod (p^N, t^order).  The wp_hat poles are
/// cleared by t^24, so both sides become unit power series whose first
/// `order` coefficients (identity exponents t^8 .. t^{order+7}) are compared
/// as p-adic residues.  Needs rational half-period values and
/// e*_{0,2} = 0 (forced for these symmetric models), so theta_hat is the
/// formal sigma.
inline VerificationReport verify_padic_distribution(const CMCurveModel &model, int N, int order,
                                                    const PadicDistributionOptions &opts = {})
{
    namespace s = ek::series;
    if (N < 1 || order < 8) {
        throw std::invalid_argument("verify_padic_distribution: need N >= 1 and order >= 8");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto &F = series_detail::rat();
    const long p = model.p;
    const int work = order + 8;

    const auto e = rational_half_period_values(model);
    const BigRat delta = model.delta();
    BigRat delta_prime = 1;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const BigRat d = e[static_cast<std::size_t>(i)] - e[static_cast<std::size_t>(j)];
            delta_prime *= d * d;
        }
    }

    const RatSeries w = curve_w_series(model, work);
    const auto routes = formal_duplication(model, BigRat(0), work);
    const RatSeries th_unit = s::shift_down(F, theta_hat_series(model, BigRat(0), work), 1);

    // U_L = (theta_hat([2]t)/t)^8
    const RatSeries lhs_unit = s::pow_int(F, s::shift_down(F, routes.first, 1), 8);

    // U_R = C (theta_hat/t)^32 prod_i (e_i t^2 - w)^4, C = Delta^2/Delta'^2
    BigRat constant = delta * delta;
    if (opts.perturb_constant) constant += p;
    constant /= delta_prime * delta_prime;
    RatSeries rhs_unit = s::scale(F, constant, s::pow_int(F, th_unit, 32));
    for (const auto &ei : e) {
        RatSeries factor = s::scale(F, BigRat(-1), w);
        if (factor.size() > 2) factor[2] += ei;
        rhs_unit = s::mul(F, rhs_unit, s::pow_int(F, factor, 4));
    }

    // p-adic pipeline: reduce both sides, compare residues mod p^N.
    const PadicSeries lhs_red = reduce_series(lhs_unit, p, N);
    const PadicSeries rhs_red = reduce_series(rhs_unit, p, N);
    int checked = 0;
    double worst = 0.0; // p-adic absolute value of the worst residual
    for (int k = 0; k < order; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const PadicNumber diff = lhs_red[idx] - rhs_red[idx];
        ++checked;
        if (!diff.congruent(PadicNumber::zero(p, N), N)) {
            const int v = diff.is_zero() ? diff.known_mod_exponent() : diff.valuation();
            worst = std::max(worst, std::pow(static_cast<double>(p), -v));
        }
    }

    VerificationReport rep;
    rep.check_name = "padic-dist-2";
    rep.lattice = {0.0, 0.0, 0.0, 0.0}; // formal check, no complex lattice
    {
        std::ostringstream g2s, g3s;
        g2s << model.g2;
        g3s << model.g3;
        rep.params["g2"] = g2s.str();
        rep.params["g3"] = g3s.str();
    }
    rep.params["p"] = p;
    rep.params["N"] = N;
    rep.params["M"] = order;
    rep.params["coefficients_checked"] = checked;
    rep.params["perturbed"] = opts.perturb_constant;
    rep.params["note"] = model.pi_norm_note;
    // constant terms of both unit series, reduced mod p^N, as the echoed values
    rep.lhs = cplx(static_cast<double>(lhs_red[0].residue(N)), 0.0);
    rep.rhs = cplx(static_cast<double>(rhs_red[0].residue(N)), 0.0);
    rep.abs_error = worst;
    rep.tolerance = 0.0; // exact congruence
    rep.pass = worst == 0.0;
    rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

} // namespace ek::padic
