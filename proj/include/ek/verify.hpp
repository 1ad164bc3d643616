#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ek/eklerch.hpp"
#include "ek/lattice.hpp"
#include "ek/report.hpp"
#include "ek/weierstrass.hpp"

namespace ek {

/// Fixed sampling seed recorded in every report ("EK" in ASCII, then 2024).
inline constexpr std::uint64_t default_seed = 0x454B2024ULL;

namespace detail {

class StopWatch {
  public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const
    {
        const auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(d).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// Platform-independent uniform in [0, 1) from the raw engine bits.
inline double uniform01(std::mt19937_64 &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Seeded points uniform in the fundamental parallelogram, rejected within
/// 0.05 sqrt(A) of (1/denominator) Gamma (denominator 1 keeps only lattice
/// poles away).
inline std::vector<cplx> sample_points(const Lattice &L, int count,
                                       std::uint64_t seed = default_seed,
                                       long exclusion_denominator = 1)
{
    std::mt19937_64 rng(seed);
    const double d = static_cast<double>(exclusion_denominator);
    const double min_dist = 0.05 * std::sqrt(L.area_param);
    std::vector<cplx> out;
    while (out.size() < static_cast<std::size_t>(count)) {
        const double u = detail::uniform01(rng);
        const double v = detail::uniform01(rng);
        const cplx z = u * L.omega1 + v * L.omega2;
        const auto [cu, cv] = L.coordinates(z * d);
        const cplx nearest = L.point(std::llround(cu), std::llround(cv)) / d;
        if (std::abs(z - nearest) >= min_dist) {
            out.push_back(z);
        }
    }
    return out;
}

/// Second limit formula: A K*_0(0,z,1) = -log|theta(z)|^2 + |z|^2/A
/// - (1/12) log|Delta|^2.
inline VerificationReport verify_second_limit(const cplx &z, const ThetaContext &ctx,
                                              double tolerance = 1e-8)
{
    const Lattice &L = ctx.lattice;
    if (L.contains(z)) {
        throw std::domain_error("verify_second_limit: z is a lattice point");
    }
    detail::StopWatch sw;
    VerificationReport rep;
    rep.check_name = "second-limit";
    rep.lattice = lattice_echo(L);
    rep.params["z"] = {z.real(), z.imag()};
    rep.params["seed"] = default_seed;
    const double A = L.area_param;
    const cplx lhs = kstar_a0_at_1(z, L, ctx.cfg);
    const double rhs = -2.0 * std::log(std::abs(theta(z, ctx))) + std::norm(z) / A -
                       std::log(std::abs(ctx.delta)) / 6.0;
    rep.finish(lhs, cplx(rhs, 0.0), tolerance);
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// First limit formula: lim_{s->1}(A K*_0(0,0,s) - 1/(s-1))
/// = -(1/12) log|Delta|^2 - 2 log A + 2c.
inline VerificationReport verify_first_limit(const ThetaContext &ctx, double tolerance = 1e-7)
{
    detail::StopWatch sw;
    VerificationReport rep;
    rep.check_name = "first-limit";
    rep.lattice = lattice_echo(ctx.lattice);
    rep.params["seed"] = default_seed;
    const double A = ctx.lattice.area_param;
    const cplx lhs = kstar_regularized_at_1(ctx.lattice, ctx.cfg);
    const double rhs = -std::log(std::abs(ctx.delta)) / 6.0 - 2.0 * std::log(A) +
                       2.0 * euler_constant();
    rep.finish(lhs, cplx(rhs, 0.0), tolerance);
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// Distribution relation at s = 1: sum over nonzero n-torsion of
/// K*_0(0, z_n, 1) = -2 log(n) / A.
inline VerificationReport verify_distribution(long n, const ThetaContext &ctx,
                                              double tolerance = 1e-7)
{
    if (n < 2) throw std::invalid_argument("verify_distribution: requires n >= 2");
    detail::StopWatch sw;
    const Lattice &L = ctx.lattice;
    VerificationReport rep;
    rep.check_name = "distribution";
    rep.lattice = lattice_echo(L);
    rep.params["n"] = n;
    rep.params["seed"] = default_seed;
    cplx acc = 0.0;
    for (const auto &t : torsion_points(L, n, false)) {
        acc += kstar_a0_at_1(t.value(), L, ctx.cfg);
    }
    const double A = L.area_param;
    rep.finish(acc / A, cplx(-2.0 * std::log(static_cast<double>(n)) / A, 0.0), tolerance);
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// (1/4) log|Delta'|^2 = -sum over nonzero 2-torsion of
/// (log|theta(z_2)|^2 - |z_2|^2/A), plus the Delta = 16 Delta' consistency.
inline VerificationReport verify_prop_c(const ThetaContext &ctx, double tolerance = 1e-8)
{
    detail::StopWatch sw;
    const Lattice &L = ctx.lattice;
    VerificationReport rep;
    rep.check_name = "prop-c";
    rep.lattice = lattice_echo(L);
    rep.params["seed"] = default_seed;
    const double A = L.area_param;
    double rhs = 0.0;
    for (const auto &t : torsion_points(L, 2, false)) {
        const cplx z2 = t.value();
        rhs -= 2.0 * std::log(std::abs(theta(z2, ctx))) - std::norm(z2) / A;
    }
    const double lhs = 0.5 * std::log(std::abs(ctx.delta_prime));
    rep.params["delta_16_delta_prime_error"] =
        std::abs(ctx.delta - 16.0 * ctx.delta_prime) / std::abs(ctx.delta);
    rep.finish(cplx(lhs, 0.0), cplx(rhs, 0.0), tolerance);
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// Kronecker's theorem: Theta(z,w) = exp(z conj(w)/A) K*_1(z,w,1).
inline VerificationReport verify_kronecker_theorem(const cplx &z, const cplx &w,
                                                   const ThetaContext &ctx,
                                                   double tolerance = 1e-8)
{
    const Lattice &L = ctx.lattice;
    if (L.contains(z) || L.contains(w) || L.contains(z + w)) {
        throw std::domain_error("verify_kronecker_theorem: z, w, z+w must avoid the lattice");
    }
    detail::StopWatch sw;
    VerificationReport rep;
    rep.check_name = "kronecker";
    rep.lattice = lattice_echo(L);
    rep.params["z"] = {z.real(), z.imag()};
    rep.params["w"] = {w.real(), w.imag()};
    rep.params["seed"] = default_seed;
    const cplx lhs = kronecker_theta(z, w, ctx);
    EKQuery q{1, z, w, 1.0, L};
    const cplx rhs = std::exp(z * std::conj(w) / L.area_param) * kstar(q, ctx.cfg).value;
    rep.finish(lhs, rhs, tolerance);
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// Theta distribution at alpha = 2 with constant Delta^2:
/// theta(2z)^8 = Delta^2 theta(z)^8 prod_{z2 != 0} theta_{z2}(z)^8.
/// The eighth powers span many orders of magnitude, so moduli are compared
/// on a log scale and phases modulo 2 pi; abs_error holds
/// |log(lhs) - log(rhs)| assembled from those two parts.
inline VerificationReport verify_theta_distribution_2(const cplx &z, const ThetaContext &ctx,
                                                      double tolerance = 1e-7)
{
    const Lattice &L = ctx.lattice;
    {
        const auto [u, v] = L.coordinates(2.0 * z);
        const cplx half_nearest = L.point(std::llround(u), std::llround(v)) / 2.0;
        if (std::abs(z - half_nearest) < 0.025 * std::sqrt(L.area_param)) {
            throw std::domain_error("verify_theta_distribution_2: z too close to (1/2) Gamma");
        }
    }
    detail::StopWatch sw;
    VerificationReport rep;
    rep.check_name = "theta-dist-2";
    rep.lattice = lattice_echo(L);
    rep.params["z"] = {z.real(), z.imag()};
    rep.params["comparison"] = "log-modulus and phase";
    rep.params["seed"] = default_seed;

    const auto pow8 = [](const cplx &v) {
        cplx p = v * v;
        p *= p;
        return p * p;
    };
    const cplx lhs = pow8(theta(2.0 * z, ctx));
    cplx prod = pow8(theta(z, ctx)) * ctx.delta * ctx.delta;
    for (const auto &t : torsion_points(L, 2, false)) {
        prod *= pow8(theta_translate(z, t.value(), ctx));
    }
    const double log_mod_err = std::log(std::abs(lhs)) - std::log(std::abs(prod));
    double phase_err = std::arg(lhs / prod);
    rep.lhs = lhs;
    rep.rhs = prod;
    rep.abs_error = std::hypot(log_mod_err, phase_err);
    rep.tolerance = tolerance;
    rep.pass = rep.abs_error <= tolerance;
    rep.runtime_ms = sw.elapsed_ms();
    return rep;
}

/// Constant from the distribution route,
/// C = 1/(n^2-1) [sum_{z_n != 0} (log|theta(z_n)|^2 - |z_n|^2/A) - 2 log n];
/// equals -(1/12) log|Delta|^2 independently of n.
inline double distribution_constant(long n, const ThetaContext &ctx)
{
    const double A = ctx.lattice.area_param;
    double acc = 0.0;
    for (const auto &t : torsion_points(ctx.lattice, n, false)) {
        const cplx zn = t.value();
        acc += 2.0 * std::log(std::abs(theta(zn, ctx))) - std::norm(zn) / A;
    }
    acc -= 2.0 * std::log(static_cast<double>(n));
    return acc / static_cast<double>(n * n - 1);
}

} // namespace ek
