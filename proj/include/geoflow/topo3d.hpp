/// @file topo3d.hpp
/// @brief Topological diagnostics of divergence-free fields on the 3-torus:
///        spectral inverse curl, helicity H(u) = <u, curl^-1 u>, Beltrami
///        residuals ||curl u - lambda u||/||u||, and ABC eigenfields of curl.

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "geoflow/spectral3d.hpp"

namespace geoflow::topo3d {

/// u = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x); curl u = u
inline VelocityField3D abc_field(int n, double A, double B, double C) {
    if (n < 32) throw std::invalid_argument("abc_field: grid must be >= 32^3");
    VelocityField3D f(n);
    for (int ix = 0; ix < n; ++ix) {
        const double x = f.coord(ix);
        for (int iy = 0; iy < n; ++iy) {
            const double y = f.coord(iy);
            for (int iz = 0; iz < n; ++iz) {
                const double z = f.coord(iz);
                const std::size_t p = f.idx(ix, iy, iz);
                f.u[p] = A * std::sin(z) + C * std::cos(y);
                f.v[p] = B * std::sin(x) + A * std::cos(z);
                f.w[p] = C * std::sin(y) + B * std::cos(x);
            }
        }
    }
    return f;
}

inline Spec3 curl_spectral(const Spec3& s) {
    Spec3 out(s.n);
    const cplx I{0, 1};
    for (int ix = 0; ix < s.n; ++ix)
        for (int iy = 0; iy < s.n; ++iy)
            for (int iz = 0; iz < s.n; ++iz) {
                if (VelocityField3D::nyquist(ix, iy, iz, s.n)) continue;
                const double kx = VelocityField3D::signed_mode(ix, s.n);
                const double ky = VelocityField3D::signed_mode(iy, s.n);
                const double kz = VelocityField3D::signed_mode(iz, s.n);
                const std::size_t p = s.idx(ix, iy, iz);
                out.c[0][p] = I * (ky * s.c[2][p] - kz * s.c[1][p]);
                out.c[1][p] = I * (kz * s.c[0][p] - kx * s.c[2][p]);
                out.c[2][p] = I * (kx * s.c[1][p] - ky * s.c[0][p]);
            }
    return out;
}

inline VelocityField3D curl3d(const VelocityField3D& f) {
    Spec3 s = to_spectral(f);
    return to_physical(curl_spectral(s));
}

/// w with curl w = u and div w = 0: w_hat = (i k x u_hat)/|k|^2. Requires u
/// divergence-free and mean-zero (the kernel of curl); refused otherwise.
inline VelocityField3D inv_curl(const VelocityField3D& f) {
    Spec3 s = to_spectral(f);
    double scale = 0.0;
    for (const auto& a : s.c)
        for (const auto& c : a) scale = std::max(scale, std::abs(c));
    const double mean =
        std::max({std::abs(s.c[0][0]), std::abs(s.c[1][0]), std::abs(s.c[2][0])});
    if (mean > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("inv_curl: field has a mean-flow component (no inverse)");
    Spec3 out(s.n);
    const cplx I{0, 1};
    for (int ix = 0; ix < s.n; ++ix)
        for (int iy = 0; iy < s.n; ++iy)
            for (int iz = 0; iz < s.n; ++iz) {
                if (VelocityField3D::nyquist(ix, iy, iz, s.n)) continue;
                const double kx = VelocityField3D::signed_mode(ix, s.n);
                const double ky = VelocityField3D::signed_mode(iy, s.n);
                const double kz = VelocityField3D::signed_mode(iz, s.n);
                const double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                const std::size_t p = s.idx(ix, iy, iz);
                out.c[0][p] = I * (ky * s.c[2][p] - kz * s.c[1][p]) / k2;
                out.c[1][p] = I * (kz * s.c[0][p] - kx * s.c[2][p]) / k2;
                out.c[2][p] = I * (kx * s.c[1][p] - ky * s.c[0][p]) / k2;
            }
    return to_physical(out);
}

/// E(u) = 1/2 ||u||^2
inline double energy3d(const VelocityField3D& f) { return 0.5 * inner3d(f, f); }

/// H(u) = <u, curl^-1 u> by spectral quadrature
inline double helicity(const VelocityField3D& f) { return inner3d(f, inv_curl(f)); }

/// convenience form for Euler velocity fields: H(curl v) = <curl v, v>
inline double velocity_helicity(const VelocityField3D& v) { return inner3d(curl3d(v), v); }

/// ||curl u - lambda u||_2 / ||u||_2
inline double beltrami_residual(const VelocityField3D& f, double lambda) {
    const VelocityField3D c = curl3d(f);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double dx = c.u[i] - lambda * f.u[i];
        const double dy = c.v[i] - lambda * f.v[i];
        const double dz = c.w[i] - lambda * f.w[i];
        num += dx * dx + dy * dy + dz * dz;
        den += f.u[i] * f.u[i] + f.v[i] * f.v[i] + f.w[i] * f.w[i];
    }
    if (den == 0.0) throw std::invalid_argument("beltrami_residual: zero field");
    return std::sqrt(num / den);
}

/// Seeded random band-limited divergence-free mean-zero field (|k| <= kcap).
inline VelocityField3D random_divfree(int n, std::uint64_t seed, int kcap = 4) {
    std::mt19937_64 rng(seed);
    auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    Spec3 s(n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const int kx = VelocityField3D::signed_mode(ix, n);
                const int ky = VelocityField3D::signed_mode(iy, n);
                const int kz = VelocityField3D::signed_mode(iz, n);
                if (kx * kx + ky * ky + kz * kz > kcap * kcap) continue;
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const std::size_t p = s.idx(ix, iy, iz);
                for (int c = 0; c < 3; ++c) s.c[c][p] = cplx{u01(), u01()};
            }
    // Hermitian symmetrize then project
    for (int c = 0; c < 3; ++c) {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const std::size_t p = s.idx(ix, iy, iz);
                    const std::size_t q = s.idx((n - ix) % n, (n - iy) % n, (n - iz) % n);
                    if (q < p) continue;
                    const cplx m = 0.5 * (s.c[c][p] + std::conj(s.c[c][q]));
                    s.c[c][p] = m;
                    s.c[c][q] = std::conj(m);
                }
        s.c[c][0] = 0.0;
    }
    project_divfree_spectral(s);
    return to_physical(s);
}

}  // namespace geoflow::topo3d
