/// @file filament.hpp
/// @brief Binormal (localized induction) flow of vortex filaments in R^3,
///        curvature/torsion extraction and the Hasimoto map
///        psi(s) = kappa(s) exp(i int_0^s tau ds').
///
/// Curves are represented by M uniform-parameter vertices plus a per-period
/// drift vector: gamma(u) = P(u) + u*drift with P periodic. Closed filaments
/// have drift = 0; an open helix is periodic in this sense. Derivatives in the
/// parameter are spectral, so the binormal velocity
///     gamma_s x gamma_ss = (gamma_u x gamma_uu)/|gamma_u|^3
/// is exact for band-limited shapes (circle, helix). Time stepping is RK4 with
/// periodic cubic-spline resampling to uniform arclength, applied only when
/// the edge lengths actually drift (exactly rigid orbits are never resampled).

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "geoflow/fft.hpp"
#include "geoflow/spectral2d.hpp"  // two_pi, cplx

namespace geoflow::filament {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Filament {
    std::vector<Vec3> pts;  // vertices at uniform parameter u_j = j/M
    Vec3 drift{0, 0, 0};    // displacement per period (0 for closed curves)

    int size() const { return static_cast<int>(pts.size()); }
    bool closed() const { return norm(drift) == 0.0; }
};

inline void validate(const Filament& f) {
    if (f.size() < 16) throw std::invalid_argument("Filament: need at least 16 vertices");
    for (int j = 0; j < f.size(); ++j) {
        const Vec3 next = j + 1 < f.size() ? f.pts[j + 1] : f.pts[0] + f.drift;
        if (norm(next - f.pts[j]) < 1e-12)
            throw std::invalid_argument("Filament: degenerate edge");
    }
}

namespace detail {

/// spectral parameter-derivative of the periodic part, plus the drift slope
inline std::vector<Vec3> param_deriv(const Filament& f, int order) {
    const int m = f.size();
    std::vector<Vec3> out(m);
    std::vector<cplx> a(m);
    for (int c = 0; c < 3; ++c) {
        for (int j = 0; j < m; ++j)
            a[j] = f.pts[j][c] - (double(j) / m) * f.drift[c];  // periodic part
        fft::forward1(a, m);
        for (int j = 0; j < m; ++j) {
            const int mode = j <= m / 2 ? j : j - m;
            const double k = (2 * mode == m) ? 0.0 : two_pi * mode;  // u in [0,1)
            cplx factor{0, k};
            cplx v = a[j];
            for (int o = 0; o < order; ++o) v *= factor;
            a[j] = v;
        }
        fft::backward1(a, m);
        for (int j = 0; j < m; ++j) out[j][c] = a[j].real();
    }
    if (order == 1)
        for (int j = 0; j < m; ++j)
            for (int c = 0; c < 3; ++c) out[j][c] += f.drift[c];
    return out;
}

}  // namespace detail

/// per-vertex binormal velocity gamma' x gamma'' (arclength-invariant form)
inline std::vector<Vec3> binormal_rhs(const Filament& f) {
    validate(f);
    const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
    const std::vector<Vec3> g2 = detail::param_deriv(f, 2);
    std::vector<Vec3> v(f.size());
    for (int j = 0; j < f.size(); ++j) {
        const double sp = norm(g1[j]);
        v[j] = (1.0 / (sp * sp * sp)) * cross(g1[j], g2[j]);
    }
    return v;
}

/// total length of one period (spectrally accurate uniform quadrature)
inline double length(const Filament& f) {
    const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
    double s = 0;
    for (const auto& v : g1) s += norm(v);
    return s / f.size();
}

/// vortex-ring impulse 1/2 oint gamma x gamma' ds (closed filaments only)
inline Vec3 impulse(const Filament& f) {
    if (!f.closed()) throw std::invalid_argument("impulse: defined for closed filaments");
    const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
    Vec3 s{0, 0, 0};
    for (int j = 0; j < f.size(); ++j) s = s + cross(f.pts[j], g1[j]);
    return (0.5 / f.size()) * s;
}

namespace detail {

/// periodic cubic spline second derivatives (cyclic [1 4 1] system via
/// Sherman-Morrison on the Thomas algorithm); h is the uniform node spacing
inline std::vector<double> periodic_spline_m(const std::vector<double>& y, double h) {
    const int n = static_cast<int>(y.size());
    std::vector<double> rhs(n);
    for (int j = 0; j < n; ++j) {
        const double ym = y[(j + n - 1) % n], yp = y[(j + 1) % n];
        rhs[j] = 6.0 * (ym - 2.0 * y[j] + yp) / (h * h);
    }
    // cyclic tridiagonal: diag 4, off 1
    auto solve_tridiag = [&](std::vector<double> d, std::vector<double> b) {
        std::vector<double> c(n - 1, 1.0);
        for (int i = 1; i < n - 1; ++i) {
            const double w = 1.0 / d[i - 1];
            d[i] -= w * c[i - 1];
            b[i] -= w * b[i - 1];
        }
        std::vector<double> x(n - 1);
        x[n - 2] = b[n - 2] / d[n - 2];
        for (int i = n - 3; i >= 0; --i) x[i] = (b[i] - c[i] * x[i + 1]) / d[i];
        return x;
    };
    // Treat m_{n-1} as a parameter: rows 0..n-2 give T x = b - m_{n-1} u with
    // T the plain [1 4 1] tridiagonal, u = e_0 + e_{n-2}. Close the cycle with
    // row n-1: m_{n-2} + 4 m_{n-1} + m_0 = rhs[n-1].
    std::vector<double> d(n - 1, 4.0), b(rhs.begin(), rhs.end() - 1);
    std::vector<double> u(n - 1, 0.0);
    u[0] = 1.0;
    u[n - 2] = 1.0;
    const std::vector<double> x1 = solve_tridiag(d, b);
    const std::vector<double> x2 = solve_tridiag(d, u);
    const double denom = 4.0 - x2[0] - x2[n - 2];
    const double mn1 = (rhs[n - 1] - x1[0] - x1[n - 2]) / denom;
    std::vector<double> m(n);
    for (int i = 0; i < n - 1; ++i) m[i] = x1[i] - mn1 * x2[i];
    m[n - 1] = mn1;
    return m;
}

struct PeriodicSpline {
    std::vector<double> y, m;
    double h;

    double eval(double u) const {  // u in [0, 1)
        const int n = static_cast<int>(y.size());
        u -= std::floor(u);
        const double su = u / h;
        int j = static_cast<int>(su);
        if (j >= n) j = n - 1;
        const double t = su - j;
        const double yj = y[j], yj1 = y[(j + 1) % n];
        const double mj = m[j], mj1 = m[(j + 1) % n];
        const double a = 1.0 - t;
        return a * yj + t * yj1 +
               h * h / 6.0 * ((a * a * a - a) * mj + (t * t * t - t) * mj1);
    }
};

}  // namespace detail

/// Resample to M uniform-arclength vertices with periodic cubic splines on the
/// periodic part (arclength measured on a 16x refined polyline).
inline Filament reparametrize_uniform(const Filament& f) {
    const int m = f.size();
    const double h = 1.0 / m;
    std::array<detail::PeriodicSpline, 3> spl;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> y(m);
        for (int j = 0; j < m; ++j) y[j] = f.pts[j][c] - (double(j) / m) * f.drift[c];
        spl[c].y = y;
        spl[c].m = detail::periodic_spline_m(y, h);
        spl[c].h = h;
    }
    auto gamma = [&](double u) {
        Vec3 p;
        for (int c = 0; c < 3; ++c) p[c] = spl[c].eval(u) + u * f.drift[c];
        return p;
    };
    const int fine = 16 * m;
    std::vector<double> cum(fine + 1, 0.0);
    Vec3 prev = gamma(0.0);
    for (int i = 1; i <= fine; ++i) {
        const Vec3 cur = i == fine ? gamma(0.0) + f.drift : gamma(double(i) / fine);
        cum[i] = cum[i - 1] + norm(cur - prev);
        prev = cur;
    }
    const double L = cum[fine];
    Filament out;
    out.drift = f.drift;
    out.pts.resize(m);
    int seg = 0;
    for (int j = 0; j < m; ++j) {
        const double target = L * j / m;
        while (seg + 1 < fine && cum[seg + 1] < target) ++seg;
        const double a =
            cum[seg + 1] > cum[seg] ? (target - cum[seg]) / (cum[seg + 1] - cum[seg]) : 0.0;
        out.pts[j] = gamma((seg + a) / fine);
    }
    return out;
}

/// largest/smallest chord edge ratio (resolution diagnostic)
inline double edge_ratio(const Filament& f) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 0; j < f.size(); ++j) {
        const Vec3 next = j + 1 < f.size() ? f.pts[j + 1] : f.pts[0] + f.drift;
        const double e = norm(next - f.pts[j]);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    return hi / lo;
}

/// RK4 step with conditional uniform-arclength resampling. Aborts when the
/// curvature-resolution bound dt*max(kappa)^2 < 0.1 fails or resolution is
/// lost (adjacent-edge ratio > 4). Note the explicit scheme also needs the
/// dispersive stability bound dt < 2.8/(pi M / L)^2 (the binormal flow is
/// NLS-like, the fastest mode turns at k_s^2); that one is the caller's
/// responsibility since it depends on the resolution, not the shape.
inline Filament step_rk4(const Filament& f, double dt, double resample_threshold = 1.01) {
    validate(f);
    // curvature bound
    {
        const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
        const std::vector<Vec3> g2 = detail::param_deriv(f, 2);
        double kmax = 0;
        for (int j = 0; j < f.size(); ++j) {
            const double sp = norm(g1[j]);
            kmax = std::max(kmax, norm(cross(g1[j], g2[j])) / (sp * sp * sp));
        }
        if (!(dt * kmax * kmax < 0.1))
            throw std::invalid_argument("step_rk4: dt violates the curvature bound");
    }
    auto shifted = [&](const Filament& base, const std::vector<Vec3>& k, double c) {
        Filament g = base;
        for (int j = 0; j < g.size(); ++j) g.pts[j] = g.pts[j] + c * k[j];
        return g;
    };
    const std::vector<Vec3> k1 = binormal_rhs(f);
    const std::vector<Vec3> k2 = binormal_rhs(shifted(f, k1, 0.5 * dt));
    const std::vector<Vec3> k3 = binormal_rhs(shifted(f, k2, 0.5 * dt));
    const std::vector<Vec3> k4 = binormal_rhs(shifted(f, k3, dt));
    Filament out = f;
    for (int j = 0; j < out.size(); ++j)
        out.pts[j] =
            out.pts[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double ratio = edge_ratio(out);
    if (ratio > 4.0) throw std::runtime_error("step_rk4: resolution lost (edge ratio > 4)");
    if (ratio > resample_threshold) out = reparametrize_uniform(out);
    return out;
}

struct FrenetData {
    std::vector<double> kappa, tau, arclength;  // per vertex
};

/// curvature and torsion from spectral derivatives
inline FrenetData frenet(const Filament& f) {
    validate(f);
    const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
    const std::vector<Vec3> g2 = detail::param_deriv(f, 2);
    const std::vector<Vec3> g3 = detail::param_deriv(f, 3);
    FrenetData out;
    const int m = f.size();
    out.kappa.resize(m);
    out.tau.resize(m);
    out.arclength.resize(m);
    double s = 0;
    for (int j = 0; j < m; ++j) {
        const Vec3 cx = cross(g1[j], g2[j]);
        const double sp = norm(g1[j]);
        const double cn = norm(cx);
        out.kappa[j] = cn / (sp * sp * sp);
        out.tau[j] = cn > 0 ? dot(cx, g3[j]) / (cn * cn) : 0.0;
        out.arclength[j] = s;
        s += sp / m;  // left-endpoint rule; consistent with the phase quadrature
    }
    return out;
}

/// Hasimoto map psi(s) = kappa(s) exp(i int_0^s tau ds') on the vertex grid.
/// The phase integral splits into the mean part (exact) plus the spectral
/// antiderivative of the periodic remainder. Requires kappa > 0 everywhere.
inline std::vector<cplx> hasimoto(const Filament& f) {
    const FrenetData fr = frenet(f);
    const int m = f.size();
    for (double k : fr.kappa)
        if (k < 1e-10) throw std::invalid_argument("hasimoto: vanishing curvature");
    // integrand tau ds = tau |gamma_u| du
    const std::vector<Vec3> g1 = detail::param_deriv(f, 1);
    std::vector<cplx> g(m);
    double mean = 0;
    for (int j = 0; j < m; ++j) {
        g[j] = fr.tau[j] * norm(g1[j]);
        mean += g[j].real();
    }
    mean /= m;
    for (auto& v : g) v -= mean;
    fft::forward1(g, m);
    for (int j = 0; j < m; ++j) {
        const int mode = j <= m / 2 ? j : j - m;
        if (mode == 0 || 2 * mode == m) {
            g[j] = cplx{0, 0};
            continue;
        }
        g[j] /= cplx{0, two_pi * mode};
    }
    fft::backward1(g, m);
    const cplx g0 = g[0];
    std::vector<cplx> psi(m);
    for (int j = 0; j < m; ++j) {
        const double phase = mean * (double(j) / m) + (g[j] - g0).real();
        psi[j] = fr.kappa[j] * cplx{std::cos(phase), std::sin(phase)};
    }
    return psi;
}

// canonical shapes ----------------------------------------------------------

inline Filament circle(double radius, int m) {
    Filament f;
    f.pts.resize(m);
    for (int j = 0; j < m; ++j) {
        const double u = two_pi * j / m;
        f.pts[j] = {radius * std::cos(u), radius * std::sin(u), 0.0};
    }
    return f;
}

/// one x-y turn of a circular helix: radius a, pitch 2*pi*b per turn
inline Filament helix(double a, double b, int m) {
    Filament f;
    f.pts.resize(m);
    f.drift = {0, 0, two_pi * b};
    for (int j = 0; j < m; ++j) {
        const double u = two_pi * j / m;
        f.pts[j] = {a * std::cos(u), a * std::sin(u), b * u};
    }
    return f;
}

inline Filament ellipse(double a, double b, int m) {
    Filament f;
    f.pts.resize(m);
    for (int j = 0; j < m; ++j) {
        const double u = two_pi * j / m;
        f.pts[j] = {a * std::cos(u), b * std::sin(u), 0.0};
    }
    return f;
}

/// random closed band-limited curve (modes <= 3 on top of a circle)
inline Filament random_knot(int m, std::uint64_t seed, double amp = 0.2) {
    std::mt19937_64 rng(seed);
    auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    std::array<std::array<double, 8>, 3> cs{};
    for (auto& comp : cs)
        for (auto& c : comp) c = amp * u01();
    Filament f;
    f.pts.resize(m);
    for (int j = 0; j < m; ++j) {
        const double u = two_pi * j / m;
        Vec3 p = {std::cos(u), std::sin(u), 0.0};
        for (int mode = 2; mode <= 3; ++mode)
            for (int c = 0; c < 3; ++c)
                p[c] += cs[c][2 * mode] * std::cos(mode * u) +
                        cs[c][2 * mode + 1] * std::sin(mode * u);
        f.pts[j] = p;
    }
    return f;
}

}  // namespace geoflow::filament
