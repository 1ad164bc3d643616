#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ek/numeric.hpp"

namespace ek {

/// Oriented lattice Z*omega1 + Z*omega2 with Im(omega2/omega1) > 0.
/// area_param is the fundamental-domain area divided by pi.
struct Lattice {
    cplx omega1;
    cplx omega2;
    double area_param = 0.0;

    /// Real coordinates (u, v) with z = u*omega1 + v*omega2, solved through
    /// the inverse period matrix so that lattice membership reduces to an
    /// integer rounding test.
    std::array<double, 2> coordinates(const cplx &z) const
    {
        const double det = M_PI * area_param; // Im(conj(omega1) * omega2)
        const double u = (z.real() * omega2.imag() - z.imag() * omega2.real()) / det;
        const double v = (z.imag() * omega1.real() - z.real() * omega1.imag()) / det;
        return {u, v};
    }

    cplx point(long m, long n) const
    {
        return static_cast<double>(m) * omega1 + static_cast<double>(n) * omega2;
    }

    /// Scale-invariant membership test: distance to the nearest lattice
    /// point below 1e-9 * sqrt(A).
    bool contains(const cplx &z) const
    {
        const auto [u, v] = coordinates(z);
        const cplx nearest = point(std::llround(u), std::llround(v));
        return std::abs(z - nearest) < 1e-9 * std::sqrt(area_param);
    }

    std::array<long, 2> nearest_indices(const cplx &z) const
    {
        const auto [u, v] = coordinates(z);
        return {std::llround(u), std::llround(v)};
    }
};

inline Lattice new_lattice(const cplx &omega1, const cplx &omega2)
{
    require_finite(omega1, "new_lattice");
    require_finite(omega2, "new_lattice");
    if (omega1 == cplx(0.0) || omega2 == cplx(0.0)) {
        throw std::domain_error("new_lattice: degenerate lattice (zero generator)");
    }
    const cplx tau = omega2 / omega1;
    if (std::abs(tau.imag()) <= 1e-12 * std::abs(tau)) {
        throw std::domain_error("new_lattice: degenerate lattice (generators R-linearly dependent)");
    }
    Lattice L;
    if (tau.imag() > 0.0) {
        L.omega1 = omega1;
        L.omega2 = omega2;
    } else {
        L.omega1 = omega2;
        L.omega2 = omega1;
    }
    L.area_param = std::abs((std::conj(L.omega1) * L.omega2).imag()) / M_PI;
    return L;
}

/// <z,w> = exp((z*conj(w) - w*conj(z)) / A).  The exponent is purely
/// imaginary, so the result is built directly on the unit circle.
inline cplx pairing(const cplx &z, const cplx &w, const Lattice &L)
{
    const double phase = 2.0 * (z * std::conj(w)).imag() / L.area_param;
    return cplx(std::cos(phase), std::sin(phase));
}

/// Torsion point (num1*omega1 + num2*omega2) / order_n with reduced
/// representatives 0 <= num1, num2 < order_n.
struct TorsionPoint {
    long num1 = 0;
    long num2 = 0;
    long order_n = 1;
    const Lattice *lattice = nullptr;

    cplx value() const
    {
        return (static_cast<double>(num1) * lattice->omega1 +
                static_cast<double>(num2) * lattice->omega2) /
               static_cast<double>(order_n);
    }

    bool is_zero() const { return num1 == 0 && num2 == 0; }
};

namespace detail {

// Index bounds guaranteeing |m*w1 + n*w2| <= r implies |m| <= M, |n| <= N,
// derived from the dual basis.
inline std::array<long, 2> disc_index_bounds(const Lattice &L, double radius)
{
    const double det = M_PI * L.area_param;
    const long M = static_cast<long>(std::floor(radius * std::abs(L.omega2) / det)) + 1;
    const long N = static_cast<long>(std::floor(radius * std::abs(L.omega1) / det)) + 1;
    return {M, N};
}

// Streams every nonzero lattice point with |gamma| <= radius in a fixed
// row-major (m, n) order.  Used for the large context sums where sorting
// would only add cost; the order is deterministic either way.
template <typename F>
void for_each_point_in_disc(const Lattice &L, double radius, F &&f)
{
    const auto [M, N] = disc_index_bounds(L, radius);
    const double r2 = radius * radius;
    for (long m = -M; m <= M; ++m) {
        for (long n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) continue;
            const cplx g = L.point(m, n);
            if (std::norm(g) <= r2) {
                f(g);
            }
        }
    }
}

} // namespace detail

/// All gamma with |gamma| <= radius, sorted by (|gamma|, angle).  When
/// `exclude` is a lattice point (within membership tolerance), -exclude is
/// omitted, matching the starred-sum convention.
inline std::vector<cplx> points_in_disc(const Lattice &L, double radius,
                                        const std::optional<cplx> &exclude = std::nullopt)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("points_in_disc: radius must be positive");
    }
    long skip_m = 0, skip_n = 0;
    bool skip = false;
    if (exclude && L.contains(*exclude)) {
        const auto idx = L.nearest_indices(*exclude);
        skip_m = -idx[0];
        skip_n = -idx[1];
        skip = true;
    }
    const auto [M, N] = detail::disc_index_bounds(L, radius);
    const double r2 = radius * radius;
    struct Entry {
        double norm2;
        double angle;
        cplx value;
    };
    std::vector<Entry> entries;
    for (long m = -M; m <= M; ++m) {
        for (long n = -N; n <= N; ++n) {
            if (skip && m == skip_m && n == skip_n) continue;
            const cplx g = L.point(m, n);
            const double n2 = std::norm(g);
            if (n2 <= r2) {
                entries.push_back({n2, std::atan2(g.imag(), g.real()), g});
            }
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
        if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
        return a.angle < b.angle;
    });
    std::vector<cplx> out;
    out.reserve(entries.size());
    for (const auto &e : entries) out.push_back(e.value);
    return out;
}

/// The n^2 reduced n-torsion representatives (or n^2 - 1 without zero).
inline std::vector<TorsionPoint> torsion_points(const Lattice &L, long n, bool include_zero)
{
    if (n < 1) {
        throw std::invalid_argument("torsion_points: order must be >= 1");
    }
    std::vector<TorsionPoint> out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (long a = 0; a < n; ++a) {
        for (long b = 0; b < n; ++b) {
            if (!include_zero && a == 0 && b == 0) continue;
            out.push_back(TorsionPoint{a, b, n, &L});
        }
    }
    return out;
}

/// sum over z_n in (1/n)Gamma/Gamma of <gamma, z_n>; n^2 if gamma in
/// n*Gamma, 0 otherwise.
inline cplx pairing_character_sum(const Lattice &L, const cplx &gamma, long n)
{
    if (!L.contains(gamma)) {
        throw std::domain_error("pairing_character_sum: gamma is not a lattice point");
    }
    cplx acc = 0.0;
    for (const auto &t : torsion_points(L, n, true)) {
        acc += pairing(gamma, t.value(), L);
    }
    return acc;
}

/// CLI wire format: "re1,im1,re2,im2".
inline std::string format_lattice(const Lattice &L)
{
    std::ostringstream os;
    os.precision(17);
    os << L.omega1.real() << ',' << L.omega1.imag() << ','
       << L.omega2.real() << ',' << L.omega2.imag();
    return os.str();
}

inline Lattice parse_lattice(const std::string &text)
{
    std::array<double, 4> v{};
    std::istringstream is(text);
    for (int i = 0; i < 4; ++i) {
        if (!(is >> v[static_cast<std::size_t>(i)])) {
            throw std::invalid_argument("parse_lattice: expected four comma-separated reals");
        }
        if (i < 3) {
            char comma = 0;
            if (!(is >> comma) || comma != ',') {
                throw std::invalid_argument("parse_lattice: expected four comma-separated reals");
            }
        }
    }
    return new_lattice(cplx(v[0], v[1]), cplx(v[2], v[3]));
}

} // namespace ek
