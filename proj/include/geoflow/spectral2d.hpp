/// @file spectral2d.hpp
/// @brief Spectral calculus on the periodic 2-torus: grids, vorticity fields,
///        Biot-Savart velocity, quadratic functionals and 2/3 dealiasing.
///
/// Orientation convention used throughout the project:
///     omega = curl u = dv/dx - du/dy,   u = (-dpsi/dy, dpsi/dx),
/// so omega = Laplacian(psi) and psi_hat = -omega_hat/|k|^2. With this choice
/// psi = cos(k y) gives omega = -k^2 cos(k y) and u = (k sin(k y), 0).

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geoflow/fft.hpp"

namespace geoflow {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Uniform periodic grid on [0,lx) x [0,ly). Sizes are powers of two >= 16
/// (transform performance; enforced).
struct Grid2 {
    int nx = 0, ny = 0;
    double lx = two_pi, ly = two_pi;

    Grid2() = default;
    Grid2(int nx_, int ny_, double lx_ = two_pi, double ly_ = two_pi)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (!is_pow2(nx) || !is_pow2(ny) || nx < 16 || ny < 16)
            throw std::invalid_argument("Grid2: nx, ny must be powers of two >= 16");
        if (lx <= 0 || ly <= 0) throw std::invalid_argument("Grid2: lengths must be positive");
    }

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(ix) * ny + iy; }

    /// signed integer mode index: 0..n/2, then negative
    int sx(int ix) const { return ix <= nx / 2 ? ix : ix - nx; }
    int sy(int iy) const { return iy <= ny / 2 ? iy : iy - ny; }

    double kx(int ix) const { return two_pi * sx(ix) / lx; }
    double ky(int iy) const { return two_pi * sy(iy) / ly; }

    double x(int ix) const { return lx * ix / nx; }
    double y(int iy) const { return ly * iy / ny; }
    double cell_area() const { return (lx / nx) * (ly / ny); }

    bool operator==(const Grid2& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

/// Spectral vorticity on a Grid2. Invariants: Hermitian symmetry (the field is
/// real) and omega_hat(0,0) == 0 (mean-free).
struct VorticityField2D {
    Grid2 grid;
    std::vector<cplx> omega_hat;

    VorticityField2D() = default;
    explicit VorticityField2D(const Grid2& g) : grid(g), omega_hat(g.size(), cplx{0.0, 0.0}) {}
};

/// Spectral velocity pair (u_hat, v_hat) on a Grid2. Unlike vorticity fields a
/// velocity pair may carry a mean-flow mode (used by tracer tests).
struct SpectralVelocity2 {
    Grid2 grid;
    std::vector<cplx> u_hat, v_hat;

    SpectralVelocity2() = default;
    explicit SpectralVelocity2(const Grid2& g)
        : grid(g), u_hat(g.size(), cplx{0, 0}), v_hat(g.size(), cplx{0, 0}) {}
};

/// Project onto the Hermitian-symmetric (real-field) subspace and pin the mean
/// mode to zero. Used when synthesizing fields from raw coefficients.
inline void make_real_symmetric(const Grid2& g, std::vector<cplx>& a) {
    for (int ix = 0; ix < g.nx; ++ix) {
        const int jx = (g.nx - ix) % g.nx;
        for (int iy = 0; iy < g.ny; ++iy) {
            const int jy = (g.ny - iy) % g.ny;
            const std::size_t p = g.idx(ix, iy), q = g.idx(jx, jy);
            if (q < p) continue;
            const cplx mean = 0.5 * (a[p] + std::conj(a[q]));
            a[p] = mean;
            a[q] = std::conj(mean);
        }
    }
    a[0] = 0.0;
}

/// max |a_k + conj(a_{-k})|/2 deviation from Hermitian symmetry
inline double hermitian_defect(const Grid2& g, const std::vector<cplx>& a) {
    double worst = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) {
        const int jx = (g.nx - ix) % g.nx;
        for (int iy = 0; iy < g.ny; ++iy) {
            const int jy = (g.ny - iy) % g.ny;
            worst = std::max(worst, std::abs(a[g.idx(ix, iy)] - std::conj(a[g.idx(jx, jy)])));
        }
    }
    return worst;
}

inline VorticityField2D field_from_physical(const Grid2& g, const std::vector<double>& w) {
    if (w.size() != g.size()) throw std::invalid_argument("field_from_physical: size mismatch");
    VorticityField2D f(g);
    for (std::size_t i = 0; i < w.size(); ++i) f.omega_hat[i] = w[i];
    fft::forward2(f.omega_hat, g.nx, g.ny);
    f.omega_hat[0] = 0.0;  // mean-free invariant
    return f;
}

inline std::vector<double> to_physical(const Grid2& g, const std::vector<cplx>& spec) {
    std::vector<cplx> tmp(spec);
    fft::backward2(tmp, g.nx, g.ny);
    std::vector<double> out(tmp.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) out[i] = tmp[i].real();
    return out;
}

inline std::vector<double> to_physical(const VorticityField2D& w) {
    return to_physical(w.grid, w.omega_hat);
}

/// psi_hat = -omega_hat/|k|^2 (mean mode 0)
inline std::vector<cplx> stream_function_hat(const VorticityField2D& w) {
    const Grid2& g = w.grid;
    std::vector<cplx> psi(g.size(), cplx{0, 0});
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            if (ix == 0 && iy == 0) continue;
            const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
            psi[g.idx(ix, iy)] = -w.omega_hat[g.idx(ix, iy)] / k2;
        }
    }
    return psi;
}

/// Biot-Savart: u_hat = -i ky psi_hat, v_hat = i kx psi_hat. The mean-zero
/// invariant removes the |k| = 0 division.
inline SpectralVelocity2 velocity_from_vorticity(const VorticityField2D& w) {
    const Grid2& g = w.grid;
    SpectralVelocity2 vel(g);
    const cplx I{0.0, 1.0};
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            if (ix == 0 && iy == 0) continue;
            const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
            const cplx psi = -w.omega_hat[g.idx(ix, iy)] / k2;
            vel.u_hat[g.idx(ix, iy)] = -I * g.ky(iy) * psi;
            vel.v_hat[g.idx(ix, iy)] = I * g.kx(ix) * psi;
        }
    }
    return vel;
}

/// curl of a spectral velocity pair: omega_hat = i kx v_hat - i ky u_hat
inline VorticityField2D curl2d(const SpectralVelocity2& vel) {
    const Grid2& g = vel.grid;
    VorticityField2D w(g);
    const cplx I{0.0, 1.0};
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t p = g.idx(ix, iy);
            w.omega_hat[p] = I * g.kx(ix) * vel.v_hat[p] - I * g.ky(iy) * vel.u_hat[p];
        }
    w.omega_hat[0] = 0.0;
    return w;
}

/// E = 1/2 int |u|^2 = (lx ly / 2) sum_{k!=0} |omega_hat|^2/|k|^2
inline double energy2d(const VorticityField2D& w) {
    const Grid2& g = w.grid;
    double e = 0.0;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            if (ix == 0 && iy == 0) continue;
            const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
            e += std::norm(w.omega_hat[g.idx(ix, iy)]) / k2;
        }
    return 0.5 * g.lx * g.ly * e;
}

/// Omega = int omega^2 = lx ly sum |omega_hat|^2
inline double enstrophy(const VorticityField2D& w) {
    double s = 0.0;
    for (const auto& c : w.omega_hat) s += std::norm(c);
    return w.grid.lx * w.grid.ly * s;
}

/// int omega^p by the rectangle rule (spectrally exact for admissible degree).
/// p in 1..8.
inline double casimir_moment(const VorticityField2D& w, int p) {
    if (p < 1 || p > 8) throw std::invalid_argument("casimir_moment: p must be in 1..8");
    const std::vector<double> phys = to_physical(w);
    double s = 0.0;
    for (double v : phys) {
        double t = v;
        for (int q = 1; q < p; ++q) t *= v;
        s += t;
    }
    return s * w.grid.cell_area();
}

/// int |omega|^p, the positive magnitude scale used to normalize Casimir drift
inline double casimir_scale(const VorticityField2D& w, int p) {
    const std::vector<double> phys = to_physical(w);
    double s = 0.0;
    for (double v : phys) s += std::pow(std::abs(v), p);
    return s * w.grid.cell_area();
}

/// true if the integer mode survives the 2/3 rule on this grid
inline bool mode_kept(const Grid2& g, int ix, int iy) {
    return 3 * std::abs(g.sx(ix)) <= g.nx && 3 * std::abs(g.sy(iy)) <= g.ny;
}

inline void dealias_inplace(VorticityField2D& w) {
    const Grid2& g = w.grid;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            if (!mode_kept(g, ix, iy)) w.omega_hat[g.idx(ix, iy)] = 0.0;
}

inline VorticityField2D dealias(const VorticityField2D& w) {
    VorticityField2D out = w;
    dealias_inplace(out);
    return out;
}

/// largest wavenumber magnitude kept by the 2/3 rule (used in the CFL number)
inline double kmax_dealiased(const Grid2& g) {
    const double kx = two_pi * (g.nx / 3) / g.lx;
    const double ky = two_pi * (g.ny / 3) / g.ly;
    return std::max(kx, ky);
}

/// Evaluate a spectral velocity pair at an arbitrary point by direct Fourier
/// summation (exact interpolation; O(nx*ny) per call).
inline void eval_velocity_at(const SpectralVelocity2& vel, double x, double y, double& u,
                             double& v) {
    const Grid2& g = vel.grid;
    cplx su{0, 0}, sv{0, 0};
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t p = g.idx(ix, iy);
            if (vel.u_hat[p] == cplx{0, 0} && vel.v_hat[p] == cplx{0, 0}) continue;
            const double phase = g.kx(ix) * x + g.ky(iy) * y;
            const cplx e{std::cos(phase), std::sin(phase)};
            su += vel.u_hat[p] * e;
            sv += vel.v_hat[p] * e;
        }
    }
    u = su.real();
    v = sv.real();
}

}  // namespace geoflow
