#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ek/lattice.hpp"
#include "ek/numeric.hpp"
#include "ek/report.hpp"
#include "ek/series.hpp"

namespace ek {

/// Cached analytic data of a lattice: quasi-periods, e*_{0,2}, invariants
/// g2/g3/Delta/Delta', half-period values, the Laurent coefficients driving
/// sigma / wp, and the empirically determined sigma transformation signs.
struct ThetaContext {
    Lattice lattice;
    PrecisionConfig cfg;

    cplx eta1;
    cplx eta2;
    cplx e_star_02;
    cplx g2, g3, delta, delta_prime;
    std::array<cplx, 3> half_period_values{}; // e1 = wp(w1/2), e2 = wp(w2/2), e3 = wp((w1+w2)/2)

    int sigma_sign_omega1 = 0; // epsilon(omega1), +1 or -1
    int sigma_sign_omega2 = 0;
    std::string epsilon_convention;

    // wp(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}; wp_laurent[k] = c_k (index 0,1 unused).
    std::vector<cplx> wp_laurent;
    // log(sigma(z)/z) = -sum_{k>=2} log_sigma[k] z^{2k}.
    std::vector<cplx> log_sigma;

    /// epsilon(m*w1 + n*w2) = eps1^m * eps2^n * (-1)^{mn}.
    double sigma_sign(long m, long n) const
    {
        int s = 1;
        if ((m & 1L) && sigma_sign_omega1 < 0) s = -s;
        if ((n & 1L) && sigma_sign_omega2 < 0) s = -s;
        if ((m & 1L) && (n & 1L)) s = -s;
        return static_cast<double>(s);
    }
};

namespace detail {

inline constexpr int wp_laurent_terms = 96;

// Euclidean-nearest lattice translate of z, searched around the coordinate
// rounding (valid for reasonably reduced generator pairs; reduction to a
// canonical basis is out of scope).
struct Reduction {
    cplx reduced;
    long m, n;
};

inline Reduction reduce_to_cell(const Lattice &L, const cplx &z)
{
    const auto [u, v] = L.coordinates(z);
    const long m0 = std::llround(u), n0 = std::llround(v);
    Reduction best{z - L.point(m0, n0), m0, n0};
    double best_norm = std::norm(best.reduced);
    for (long dm = -1; dm <= 1; ++dm) {
        for (long dn = -1; dn <= 1; ++dn) {
            if (dm == 0 && dn == 0) continue;
            const cplx w = z - L.point(m0 + dm, n0 + dn);
            const double nn = std::norm(w);
            if (nn < best_norm) {
                best_norm = nn;
                best = {w, m0 + dm, n0 + dn};
            }
        }
    }
    return best;
}

// sigma restricted to the central cell, from the integrated Laurent series.
inline cplx sigma_cell(const ThetaContext &ctx, const cplx &z)
{
    if (z == cplx(0.0)) return 0.0;
    const cplx z2 = z * z;
    cplx zpow = z2 * z2, acc = 0.0;
    for (std::size_t k = 2; k < ctx.log_sigma.size(); ++k) {
        acc += ctx.log_sigma[k] * zpow;
        zpow *= z2;
    }
    return z * std::exp(-acc);
}

// Truncated product sigma_R(z) = z prod_{0<|g|<=R} (1 - z/g) exp(z/g + z^2/2g^2),
// summed in log form.  Entire in z; used at build time to pin the
// transformation signs (and by tests as the independent oracle).
inline cplx sigma_product(const Lattice &L, const cplx &z, double radius)
{
    cplx acc = 0.0;
    for_each_point_in_disc(L, radius, [&](const cplx &g) {
        const cplx q = z / g;
        acc += std::log(1.0 - q) + q + 0.5 * q * q;
    });
    return z * std::exp(acc);
}

} // namespace detail

/// Builds every cached quantity.  The slow sums run over
/// |gamma| <= truncation_radius_factor * sqrt(A); the quasi-periods come
/// from eta1 = 2 zeta(omega1/2) with zeta summed as
/// 1/z + sum* (1/(z-gamma) + 1/gamma + z/gamma^2).
inline ThetaContext build_context(const Lattice &L, const PrecisionConfig &cfg = {})
{
    cfg.validate();
    ThetaContext ctx;
    ctx.lattice = L;
    ctx.cfg = cfg;

    const double A = L.area_param;
    const double radius = cfg.truncation_radius_factor * std::sqrt(A);
    const cplx h1 = 0.5 * L.omega1, h2 = 0.5 * L.omega2;

    cplx s4 = 0.0, s6 = 0.0, zeta1 = 1.0 / h1, zeta2 = 1.0 / h2;
    detail::for_each_point_in_disc(L, radius, [&](const cplx &g) {
        const cplx inv = 1.0 / g;
        const cplx inv2 = inv * inv;
        const cplx inv4 = inv2 * inv2;
        s4 += inv4;
        s6 += inv4 * inv2;
        zeta1 += 1.0 / (h1 - g) + inv + h1 * inv2;
        zeta2 += 1.0 / (h2 - g) + inv + h2 * inv2;
    });

    ctx.g2 = 60.0 * s4;
    ctx.g3 = 140.0 * s6;
    ctx.delta = ctx.g2 * ctx.g2 * ctx.g2 - 27.0 * ctx.g3 * ctx.g3;
    ctx.eta1 = 2.0 * zeta1;
    ctx.eta2 = 2.0 * zeta2;

    const cplx legendre = ctx.eta1 * L.omega2 - ctx.eta2 * L.omega1 - cplx(0.0, 2.0 * M_PI);
    if (std::abs(legendre) > 1e-10) {
        throw std::runtime_error("build_context: Legendre relation violated beyond 1e-10");
    }

    const cplx estar1 = (ctx.eta1 - std::conj(L.omega1) / A) / L.omega1;
    const cplx estar2 = (ctx.eta2 - std::conj(L.omega2) / A) / L.omega2;
    if (std::abs(estar1 - estar2) > 1e-8) {
        throw std::runtime_error("build_context: e*_{0,2} generator cross-check failed beyond 1e-8");
    }
    ctx.e_star_02 = estar1;

    ctx.wp_laurent = series::wp_laurent_coefficients<cplx>(ctx.g2, ctx.g3, detail::wp_laurent_terms);
    ctx.log_sigma.assign(ctx.wp_laurent.size(), cplx(0.0));
    for (std::size_t k = 2; k < ctx.wp_laurent.size(); ++k) {
        ctx.log_sigma[k] = ctx.wp_laurent[k] / static_cast<double>(2 * k * (2 * k - 1));
    }

    // Half-period values through the reduced Laurent evaluation.
    const auto eval_wp = [&ctx](const cplx &z) {
        const auto red = detail::reduce_to_cell(ctx.lattice, z);
        const cplx w = red.reduced;
        const cplx w2 = w * w;
        cplx acc = 1.0 / w2, wpow = w2;
        for (std::size_t k = 2; k < ctx.wp_laurent.size(); ++k) {
            acc += ctx.wp_laurent[k] * wpow;
            wpow *= w2;
        }
        return acc;
    };
    ctx.half_period_values = {eval_wp(h1), eval_wp(h2), eval_wp(h1 + h2)};
    const auto &e = ctx.half_period_values;
    const cplx dp = (e[0] - e[1]) * (e[1] - e[2]) * (e[2] - e[0]);
    ctx.delta_prime = dp * dp;
    if (std::abs(ctx.delta - 16.0 * ctx.delta_prime) > 1e-10 * std::abs(ctx.delta)) {
        throw std::runtime_error("build_context: Delta = 16 Delta' consistency failed");
    }
    if (std::abs(e[0] + e[1] + e[2]) > 1e-10 * (1.0 + std::abs(e[0]))) {
        throw std::runtime_error("build_context: half-period values do not sum to zero");
    }

    // Transformation signs from the sigma quasi-periodicity at a generic
    // probe point; the raw product decides the +-1 without assuming either
    // stated convention.
    const double probe_radius = 40.0 * std::sqrt(A);
    const cplx zt = 0.1392 * L.omega1 + 0.2716 * L.omega2;
    const cplx s_base = detail::sigma_product(L, zt, probe_radius);
    const auto sign_for = [&](const cplx &gamma, const cplx &eta) {
        const cplx ratio = detail::sigma_product(L, zt + gamma, probe_radius) /
                           (s_base * std::exp(eta * (zt + 0.5 * gamma)));
        const double re = ratio.real();
        if (std::abs(ratio - cplx(re < 0 ? -1.0 : 1.0, 0.0)) > 1e-3) {
            throw std::runtime_error("build_context: sigma transformation sign not resolved");
        }
        return re < 0 ? -1 : 1;
    };
    ctx.sigma_sign_omega1 = sign_for(L.omega1, ctx.eta1);
    ctx.sigma_sign_omega2 = sign_for(L.omega2, ctx.eta2);
    const int s12 = sign_for(L.omega1 + L.omega2, ctx.eta1 + ctx.eta2);
    if (s12 != ctx.sigma_sign_omega1 * ctx.sigma_sign_omega2 * -1) {
        throw std::runtime_error("build_context: sigma sign cocycle inconsistent");
    }
    ctx.epsilon_convention = (ctx.sigma_sign_omega1 == -1 && ctx.sigma_sign_omega2 == -1)
                                 ? "epsilon(gamma) = +1 on 2*Gamma, -1 otherwise"
                                 : "epsilon(gamma) = -1 on 2*Gamma, +1 otherwise";
    return ctx;
}

/// eta(gamma) = m*eta1 + n*eta2 for gamma = m*omega1 + n*omega2.
inline cplx quasi_period(const cplx &gamma, const ThetaContext &ctx)
{
    if (gamma == cplx(0.0)) return 0.0;
    if (!ctx.lattice.contains(gamma)) {
        throw std::domain_error("quasi_period: gamma is not a lattice point");
    }
    const auto idx = ctx.lattice.nearest_indices(gamma);
    return static_cast<double>(idx[0]) * ctx.eta1 + static_cast<double>(idx[1]) * ctx.eta2;
}

/// Weierstrass sigma, via quasi-periodic reduction to the central cell
/// followed by the truncated Taylor evaluation.
inline cplx sigma(const cplx &z, const ThetaContext &ctx)
{
    const auto red = detail::reduce_to_cell(ctx.lattice, z);
    if (red.m == 0 && red.n == 0) {
        return detail::sigma_cell(ctx, z);
    }
    const cplx gamma = z - red.reduced;
    const cplx eta = static_cast<double>(red.m) * ctx.eta1 + static_cast<double>(red.n) * ctx.eta2;
    return ctx.sigma_sign(red.m, red.n) * detail::sigma_cell(ctx, red.reduced) *
           std::exp(eta * (red.reduced + 0.5 * gamma));
}

inline cplx wp(const cplx &z, const ThetaContext &ctx)
{
    const auto red = detail::reduce_to_cell(ctx.lattice, z);
    const cplx w = red.reduced;
    if (std::abs(w) < 1e-9 * std::sqrt(ctx.lattice.area_param)) {
        throw std::domain_error("wp: pole at a lattice point");
    }
    const cplx w2 = w * w;
    cplx acc = 1.0 / w2, wpow = w2;
    for (std::size_t k = 2; k < ctx.wp_laurent.size(); ++k) {
        acc += ctx.wp_laurent[k] * wpow;
        wpow *= w2;
    }
    return acc;
}

inline cplx wp_prime(const cplx &z, const ThetaContext &ctx)
{
    const auto red = detail::reduce_to_cell(ctx.lattice, z);
    const cplx w = red.reduced;
    if (std::abs(w) < 1e-9 * std::sqrt(ctx.lattice.area_param)) {
        throw std::domain_error("wp_prime: pole at a lattice point");
    }
    const cplx w2 = w * w;
    cplx acc = -2.0 / (w2 * w);
    cplx wpow = w;
    for (std::size_t k = 2; k < ctx.wp_laurent.size(); ++k) {
        acc += ctx.wp_laurent[k] * static_cast<double>(2 * k - 2) * wpow;
        wpow *= w2;
    }
    return acc;
}

/// Reduced theta theta(z) = exp(-e*_{0,2} z^2 / 2) sigma(z), theta'(0) = 1.
inline cplx theta(const cplx &z, const ThetaContext &ctx)
{
    return std::exp(-0.5 * ctx.e_star_02 * z * z) * sigma(z, ctx);
}

/// theta_{z0}(z) = theta(z + z0) exp(-z conj(z0)/A - z0 conj(z0)/(2A)).
inline cplx theta_translate(const cplx &z, const cplx &z0, const ThetaContext &ctx)
{
    const double A = ctx.lattice.area_param;
    return theta(z + z0, ctx) *
           std::exp(-z * std::conj(z0) / A - z0 * std::conj(z0) / (2.0 * A));
}

/// Kronecker theta Theta(z,w) = theta(z+w) / (theta(z) theta(w)).  A pole
/// error takes precedence even when z + w in Gamma would compensate.
inline cplx kronecker_theta(const cplx &z, const cplx &w, const ThetaContext &ctx)
{
    if (ctx.lattice.contains(z) || ctx.lattice.contains(w)) {
        throw std::domain_error("kronecker_theta: pole (z or w is a lattice point)");
    }
    return theta(z + w, ctx) / (theta(z, ctx) * theta(w, ctx));
}

/// Checks theta(z+w) theta(z-w) theta(z)^-2 theta(w)^-2 = wp(w) - wp(z).
inline VerificationReport addition_identity_check(const cplx &z, const cplx &w,
                                                  const ThetaContext &ctx,
                                                  double tolerance = 1e-8)
{
    const auto &L = ctx.lattice;
    if (L.contains(z) || L.contains(w) || L.contains(z + w) || L.contains(z - w)) {
        throw std::domain_error("addition_identity_check: z, w, z+w, z-w must avoid the lattice");
    }
    VerificationReport rep;
    rep.check_name = "theta-addition-identity";
    rep.lattice = lattice_echo(L);
    rep.params["z"] = {z.real(), z.imag()};
    rep.params["w"] = {w.real(), w.imag()};
    const cplx tz = theta(z, ctx), tw = theta(w, ctx);
    const cplx lhs = theta(z + w, ctx) * theta(z - w, ctx) / (tz * tz * tw * tw);
    const cplx rhs = wp(w, ctx) - wp(z, ctx);
    rep.finish(lhs, rhs, tolerance);
    return rep;
}

} // namespace ek
