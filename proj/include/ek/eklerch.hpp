#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ek/lattice.hpp"
#include "ek/numeric.hpp"

namespace ek {

/// One Eisenstein-Kronecker-Lerch evaluation K*_a(z0, w0, s) on a lattice.
struct EKQuery {
    long a = 0;
    cplx z0;
    cplx w0;
    cplx s;
    Lattice lattice;
};

struct EKResult {
    cplx value;
    bool is_pole = false;
    std::optional<cplx> pole_residue;
    double truncation_radius_used = 0.0;
    double estimated_error = 0.0;
};

enum class PolePolicy {
    refuse,  // near-pole queries come back as is_pole + residue
    evaluate // caller explicitly wants the finite value next to the pole
};

namespace detail {

// Gaussian-tail truncation radius at the t = 1 worst case:
// r = 1.5 * sqrt(A log(N/quad_tol)) with one fixed-point pass for N.
inline double gaussian_tail_radius(double area_param, double quad_tol)
{
    const double n_est = std::max(10.0, M_PI * std::log(1.0 / quad_tol));
    return 1.5 * std::sqrt(area_param * std::log(n_est / quad_tol));
}

inline cplx int_pow(const cplx &base, long e)
{
    cplx acc = 1.0, b = base;
    for (long k = e; k > 0; k >>= 1) {
        if (k & 1L) acc *= b;
        b *= b;
    }
    return acc;
}

} // namespace detail

/// theta*_a(t, z0, w0) = sum* exp(-t |z0+gamma|^2 / A) <gamma, w0>
/// (conj(z0) + conj(gamma))^a, truncated where the Gaussian tail drops
/// below quad_tol.
inline cplx theta_star(long a, double t, const cplx &z0, const cplx &w0,
                       const Lattice &L, const PrecisionConfig &cfg = {})
{
    if (a < 0) throw std::invalid_argument("theta_star: requires a >= 0");
    if (!(t >= 1.0)) throw std::domain_error("theta_star: requires t >= 1");
    const double A = L.area_param;
    const double radius = detail::gaussian_tail_radius(A, cfg.quad_tol) + std::abs(z0);
    cplx acc = 0.0;
    for (const cplx &g : points_in_disc(L, radius, z0)) {
        const cplx u = std::conj(z0) + std::conj(g);
        acc += std::exp(-t * std::norm(z0 + g) / A) * pairing(g, w0, L) * detail::int_pow(u, a);
    }
    return acc;
}

/// I_a(z0, w0, s) = int_1^inf theta*_a(t, z0, w0) t^{s-1} dt, summed
/// term-by-term through the upper incomplete gamma:
/// sum* (conj(z0)+conj(gamma))^a <gamma, w0> X^{-s} Gamma(s, X),
/// X = |z0 + gamma|^2 / A.  Entire in s.
inline cplx i_integral(long a, const cplx &z0, const cplx &w0, const cplx &s,
                       const Lattice &L, const PrecisionConfig &cfg = {})
{
    if (a < 0) throw std::invalid_argument("i_integral: requires a >= 0");
    const double A = L.area_param;
    const double radius = detail::gaussian_tail_radius(A, cfg.quad_tol) + std::abs(z0);
    cplx acc = 0.0;
    for (const cplx &g : points_in_disc(L, radius, z0)) {
        const double x = std::norm(z0 + g) / A;
        const cplx u = std::conj(z0) + std::conj(g);
        acc += detail::int_pow(u, a) * pairing(g, w0, L) *
               std::exp(-s * std::log(x)) * upper_incomplete_gamma(s, x, cfg);
    }
    return require_finite(acc, "i_integral");
}

/// K*_a via the integral expression
///   A^s Gamma(s) K*_a(z0,w0,s) = I_a(z0,w0,s) - d_{z0,a} <w0,z0> / s
///     + I_a(w0,z0,a+1-s) <w0,z0> + d_{w0,a} / (s-1),
/// rearranged through 1/Gamma(s) = s/Gamma(s+1) so the s = 0 point is
/// evaluated directly.  The only pole of the continued function with a >= 0
/// is s = 1 when a = 0 and w0 in Gamma (residue 1/A).
inline EKResult kstar(const EKQuery &q, const PrecisionConfig &cfg = {},
                      PolePolicy policy = PolePolicy::refuse)
{
    if (q.a < 0) throw std::invalid_argument("kstar: requires a >= 0");
    const Lattice &L = q.lattice;
    const double A = L.area_param;
    const bool dz0 = (q.a == 0) && L.contains(q.z0);
    const bool dw0 = (q.a == 0) && L.contains(q.w0);

    EKResult res;
    res.truncation_radius_used =
        detail::gaussian_tail_radius(A, cfg.quad_tol) + std::max(std::abs(q.z0), std::abs(q.w0));

    if (dw0 && std::abs(q.s - 1.0) < 1e-3) {
        res.is_pole = true;
        res.pole_residue = cplx(1.0 / A, 0.0);
        if (policy == PolePolicy::refuse || q.s == cplx(1.0)) {
            return res;
        }
        res.is_pole = false; // explicit near-pole evaluation requested
    }

    const cplx pw = pairing(q.w0, q.z0, L);
    const cplx a1s = cplx(static_cast<double>(q.a) + 1.0) - q.s;
    cplx bracket = q.s * i_integral(q.a, q.z0, q.w0, q.s, L, cfg) +
                   q.s * pw * i_integral(q.a, q.w0, q.z0, a1s, L, cfg);
    if (dz0) bracket -= pw;
    if (dw0) bracket += q.s / (q.s - 1.0);

    const cplx denom = gamma(q.s + 1.0, cfg); // poles at s = -1, -2, ... surface here
    res.value = std::exp(-q.s * std::log(A)) * bracket / denom;
    require_finite(res.value, "kstar");
    res.estimated_error = cfg.quad_tol * (1.0 + res.truncation_radius_used *
                                                    res.truncation_radius_used / A);
    return res;
}

/// Closed form of lim_{s->1} (A K*_0(0,0,s) - 1/(s-1)):
/// I_0(0,0,1) - 1 + I_0(0,0,0) - log A + c.
inline cplx kstar_regularized_at_1(const Lattice &L, const PrecisionConfig &cfg = {})
{
    const double A = L.area_param;
    return i_integral(0, 0.0, 0.0, 1.0, L, cfg) - 1.0 +
           i_integral(0, 0.0, 0.0, 0.0, L, cfg) - std::log(A) + euler_constant();
}

/// A * K*_0(0, z, 1) = I_0(0, z, 1) - 1 + I_0(z, 0, 0) for z outside Gamma.
inline cplx kstar_a0_at_1(const cplx &z, const Lattice &L, const PrecisionConfig &cfg = {})
{
    if (L.contains(z)) {
        throw std::domain_error("kstar_a0_at_1: z is a lattice point (pole of K*_0 at s = 1)");
    }
    return i_integral(0, 0.0, z, 1.0, L, cfg) - 1.0 + i_integral(0, z, 0.0, 0.0, L, cfg);
}

/// K*_1(0, w, 1), the limit of K_1(z, w, 1) - 1/z at z = 0.
inline cplx k1_limit_at_zero(const cplx &w, const Lattice &L, const PrecisionConfig &cfg = {})
{
    if (L.contains(w)) {
        throw std::domain_error("k1_limit_at_zero: w must avoid the lattice");
    }
    EKQuery q{1, 0.0, w, 1.0, L};
    return kstar(q, cfg).value;
}

/// |A^s Gamma(s) K*_a(z0,w0,s) - <w0,z0> A^{a+1-s} Gamma(a+1-s)
///  K*_a(w0,z0,a+1-s)|, both sides assembled from the integral expression.
inline double functional_equation_defect(const EKQuery &q, const PrecisionConfig &cfg = {})
{
    if (q.a < 0) throw std::invalid_argument("functional_equation_defect: requires a >= 0");
    const Lattice &L = q.lattice;
    const bool dz0 = (q.a == 0) && L.contains(q.z0);
    const bool dw0 = (q.a == 0) && L.contains(q.w0);
    const cplx a1s = cplx(static_cast<double>(q.a) + 1.0) - q.s;

    const double pole_dist = std::min(
        {dz0 ? std::abs(q.s) : 1.0, dz0 ? std::abs(q.s - cplx(static_cast<double>(q.a))) : 1.0,
         dw0 ? std::abs(q.s - 1.0) : 1.0,
         dw0 ? std::abs(q.s - cplx(static_cast<double>(q.a) + 1.0)) : 1.0});
    if (pole_dist <= 1e-3) {
        throw std::domain_error("functional_equation_defect: s too close to a pole of either side");
    }

    const cplx pw = pairing(q.w0, q.z0, L);
    const cplx pz = pairing(q.z0, q.w0, L);
    const cplx i_fwd = i_integral(q.a, q.z0, q.w0, q.s, L, cfg);
    const cplx i_rev = i_integral(q.a, q.w0, q.z0, a1s, L, cfg);

    cplx lhs = i_fwd + pw * i_rev;
    if (dz0) lhs -= pw / q.s;
    if (dw0) lhs += 1.0 / (q.s - 1.0);

    cplx rhs_inner = i_rev + pz * i_fwd;
    if (dw0) rhs_inner -= pz / a1s;
    if (dz0) rhs_inner += 1.0 / (a1s - 1.0);
    const cplx rhs = pw * rhs_inner;

    return std::abs(lhs - rhs);
}

} // namespace ek
