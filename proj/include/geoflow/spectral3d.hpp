/// @file spectral3d.hpp
/// @brief Periodic 3-torus velocity fields (side 2*pi) and the Helmholtz-Weyl
///        projection onto divergence-free fields.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "geoflow/fft.hpp"
#include "geoflow/spectral2d.hpp"  // two_pi, is_pow2, cplx

namespace geoflow {

/// Real 3-component field sampled on an n^3 grid over [0,2*pi)^3.
struct VelocityField3D {
    int n = 0;
    std::vector<double> u, v, w;

    VelocityField3D() = default;
    explicit VelocityField3D(int n_) : n(n_) {
        if (!is_pow2(n) || n < 16)
            throw std::invalid_argument("VelocityField3D: n must be a power of two >= 16");
        const std::size_t sz = size();
        u.assign(sz, 0.0);
        v.assign(sz, 0.0);
        w.assign(sz, 0.0);
    }

    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
    std::size_t idx(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
    }
    static int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }
    /// true when any component sits on the self-conjugate Nyquist plane, where
    /// odd-in-k operators cannot keep the field real
    static bool nyquist(int ix, int iy, int iz, int n) {
        return 2 * ix == n || 2 * iy == n || 2 * iz == n;
    }
    double coord(int i) const { return two_pi * i / n; }
};

/// Spectral view of a 3D vector field: three coefficient arrays.
struct Spec3 {
    int n = 0;
    std::vector<cplx> c[3];

    explicit Spec3(int n_) : n(n_) {
        const std::size_t sz = static_cast<std::size_t>(n) * n * n;
        for (auto& a : c) a.assign(sz, cplx{0, 0});
    }
    std::size_t idx(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
    }
};

inline Spec3 to_spectral(const VelocityField3D& f) {
    Spec3 s(f.n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        s.c[0][i] = f.u[i];
        s.c[1][i] = f.v[i];
        s.c[2][i] = f.w[i];
    }
    for (auto& a : s.c) fft::forward3(a, f.n, f.n, f.n);
    return s;
}

inline VelocityField3D to_physical(const Spec3& s) {
    VelocityField3D f(s.n);
    std::vector<cplx> tmp;
    for (int comp = 0; comp < 3; ++comp) {
        tmp = s.c[comp];
        fft::backward3(tmp, s.n, s.n, s.n);
        double* dst = comp == 0 ? f.u.data() : comp == 1 ? f.v.data() : f.w.data();
        for (std::size_t i = 0; i < f.size(); ++i) dst[i] = tmp[i].real();
    }
    return f;
}

/// Leray-Hopf projection: u_hat -> u_hat - k (k.u_hat)/|k|^2, composed with
/// truncation of the Nyquist planes (both orthogonal projections, so the
/// composite stays idempotent and self-adjoint). The mean mode is untouched.
inline void project_divfree_spectral(Spec3& s) {
    const int n = s.n;
    for (int ix = 0; ix < n; ++ix) {
        const double kx = VelocityField3D::signed_mode(ix, n);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = VelocityField3D::signed_mode(iy, n);
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t p = s.idx(ix, iy, iz);
                if (VelocityField3D::nyquist(ix, iy, iz, n)) {
                    s.c[0][p] = s.c[1][p] = s.c[2][p] = 0.0;
                    continue;
                }
                const double kz = VelocityField3D::signed_mode(iz, n);
                const double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                const cplx kd = (kx * s.c[0][p] + ky * s.c[1][p] + kz * s.c[2][p]) / k2;
                s.c[0][p] -= kx * kd;
                s.c[1][p] -= ky * kd;
                s.c[2][p] -= kz * kd;
            }
        }
    }
}

inline VelocityField3D project_divfree(const VelocityField3D& f) {
    Spec3 s = to_spectral(f);
    project_divfree_spectral(s);
    return to_physical(s);
}

/// max_k |k.u_hat|, the spectral divergence norm
inline double divergence_spectral_max(const VelocityField3D& f) {
    const Spec3 s = to_spectral(f);
    double m = 0.0;
    for (int ix = 0; ix < f.n; ++ix)
        for (int iy = 0; iy < f.n; ++iy)
            for (int iz = 0; iz < f.n; ++iz) {
                const double kx = VelocityField3D::signed_mode(ix, f.n);
                const double ky = VelocityField3D::signed_mode(iy, f.n);
                const double kz = VelocityField3D::signed_mode(iz, f.n);
                const std::size_t p = s.idx(ix, iy, iz);
                m = std::max(m, std::abs(kx * s.c[0][p] + ky * s.c[1][p] + kz * s.c[2][p]));
            }
    return m;
}

/// L^2 inner product int (a, b) over the torus (volume (2*pi)^3)
inline double inner3d(const VelocityField3D& a, const VelocityField3D& b) {
    if (a.n != b.n) throw std::invalid_argument("inner3d: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a.u[i] * b.u[i] + a.v[i] * b.v[i] + a.w[i] * b.w[i];
    const double h = two_pi / a.n;
    return s * h * h * h;
}

}  // namespace geoflow
