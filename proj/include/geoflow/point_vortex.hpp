/// @file point_vortex.hpp
/// @brief Kirchhoff point-vortex dynamics on the plane, half-plane, sphere and
///        flat torus, with per-geometry first integrals, adaptive RK5(4)
///        integration, Poincare sections and a two-trajectory Lyapunov probe.
///
/// Torus kernel (square torus [0,2*pi)^2, total circulation zero required):
/// the vortex row summed exactly by cot(w/2), images of rows in the second
/// period direction summed with exponentially decaying remainders, plus the
/// neutralizing-background shear. In complex form, for a unit vortex,
///     u - i v = S(w)/(4*pi*i) + Im(w)/(4*pi^2),
///     S(w) = cot(w/2) + sum_{n>=1} [cot((w-2*pi*i*n)/2) + cot((w+2*pi*i*n)/2)],
/// with w reduced to the fundamental domain. Each per-vortex kernel is doubly
/// periodic; the q-series form of S is used as an independent oracle in tests.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoflow/spectral2d.hpp"  // two_pi

namespace geoflow::pv {

enum class Geometry { plane, half_plane, sphere, torus };

struct VortexSystem {
    Geometry geometry = Geometry::plane;
    std::vector<double> gamma;
    std::vector<std::array<double, 3>> pos;  // planar geometries use [0],[1]

    std::size_t size() const { return gamma.size(); }
};

struct CollapseCandidate : std::runtime_error {
    double t;
    CollapseCandidate(double t_, const std::string& what) : std::runtime_error(what), t(t_) {}
};

inline constexpr double min_separation = 1e-9;

namespace detail {

inline double sep2_plane(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

inline double sep2_torus(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    auto wrap = [](double d) {
        d = std::fmod(d + 0.5 * two_pi, two_pi);
        if (d < 0) d += two_pi;
        return d - 0.5 * two_pi;
    };
    const double dx = wrap(a[0] - b[0]), dy = wrap(a[1] - b[1]);
    return dx * dx + dy * dy;
}

inline double sep2(Geometry geo, const std::array<double, 3>& a, const std::array<double, 3>& b) {
    switch (geo) {
        case Geometry::sphere: {
            const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
            return dx * dx + dy * dy + dz * dz;  // chordal
        }
        case Geometry::torus:
            return sep2_torus(a, b);
        default:
            return sep2_plane(a, b);
    }
}

}  // namespace detail

inline void validate(const VortexSystem& sys) {
    if (sys.gamma.size() != sys.pos.size())
        throw std::invalid_argument("VortexSystem: gamma/pos size mismatch");
    if (sys.gamma.empty()) throw std::invalid_argument("VortexSystem: empty system");
    for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = i + 1; j < sys.size(); ++j)
            if (detail::sep2(sys.geometry, sys.pos[i], sys.pos[j]) <
                min_separation * min_separation)
                throw std::invalid_argument("VortexSystem: coincident vortices");
    if (sys.geometry == Geometry::half_plane)
        for (const auto& p : sys.pos)
            if (p[1] <= 0) throw std::invalid_argument("VortexSystem: half-plane needs y > 0");
    if (sys.geometry == Geometry::sphere)
        for (const auto& p : sys.pos) {
            const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            if (std::abs(n - 1.0) > 1e-9)
                throw std::invalid_argument("VortexSystem: sphere positions must be unit");
        }
    if (sys.geometry == Geometry::torus) {
        double s = 0, a = 0;
        for (double gm : sys.gamma) {
            s += gm;
            a += std::abs(gm);
        }
        if (std::abs(s) > 1e-12 * std::max(a, 1.0))
            throw std::invalid_argument("VortexSystem: torus requires zero total circulation");
    }
}

namespace detail {

/// S(w) of the header comment; w reduced internally
inline cplx torus_S(cplx w) {
    double x = std::fmod(w.real(), two_pi);
    if (x < -0.5 * two_pi) x += two_pi;
    if (x >= 0.5 * two_pi) x -= two_pi;
    double y = std::fmod(w.imag(), two_pi);
    if (y < -0.5 * two_pi) y += two_pi;
    if (y >= 0.5 * two_pi) y -= two_pi;
    const cplx wr{x, y};
    auto cot = [](cplx z) { return std::cos(z) / std::sin(z); };
    cplx s = cot(0.5 * wr);
    for (int n = 1; n <= 12; ++n) {
        s += cot(0.5 * (wr - cplx{0, two_pi * n})) + cot(0.5 * (wr + cplx{0, two_pi * n}));
    }
    return s;
}

/// wrapped Im(w), matching the reduction used in torus_S
inline double torus_y(cplx w) {
    double y = std::fmod(w.imag(), two_pi);
    if (y < -0.5 * two_pi) y += two_pi;
    if (y >= 0.5 * two_pi) y -= two_pi;
    return y;
}

/// velocity at z induced by a unit vortex at the origin of the torus
inline std::array<double, 2> torus_kernel(cplx w) {
    const cplx uiv = torus_S(w) / cplx{0, 4 * std::numbers::pi} +
                     torus_y(w) / (4 * std::numbers::pi * std::numbers::pi);
    return {uiv.real(), -uiv.imag()};
}

/// stream kernel Psi for a unit vortex (used by the torus Hamiltonian)
inline double torus_psi(cplx w) {
    const double x = std::fmod(std::abs(w.real()), two_pi);
    double y = torus_y(w);
    const double xr = x < 0.5 * two_pi ? x : two_pi - x;  // cos is even
    const double pi = std::numbers::pi;
    double s = std::log(0.5 * (std::cosh(y) - std::cos(xr)));
    for (int n = 1; n <= 12; ++n) {
        s += std::log(0.5 * (std::cosh(y - two_pi * n) - std::cos(xr))) +
             std::log(0.5 * (std::cosh(y + two_pi * n) - std::cos(xr))) -
             (2.0 * two_pi * n - 2.0 * std::log(4.0));
    }
    return -s / (4 * pi) + y * y / (8 * pi * pi);
}

}  // namespace detail

/// position velocities of all vortices
inline std::vector<std::array<double, 3>> rhs(const VortexSystem& sys) {
    const std::size_t n = sys.size();
    std::vector<std::array<double, 3>> v(n, {0, 0, 0});
    const double pi = std::numbers::pi;
    switch (sys.geometry) {
        case Geometry::plane:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double dx = sys.pos[i][0] - sys.pos[j][0];
                    const double dy = sys.pos[i][1] - sys.pos[j][1];
                    const double r2 = dx * dx + dy * dy;
                    v[i][0] += sys.gamma[j] / (2 * pi) * (-dy / r2);
                    v[i][1] += sys.gamma[j] / (2 * pi) * (dx / r2);
                }
            break;
        case Geometry::half_plane:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) {
                        const double dx = sys.pos[i][0] - sys.pos[j][0];
                        const double dy = sys.pos[i][1] - sys.pos[j][1];
                        const double r2 = dx * dx + dy * dy;
                        v[i][0] += sys.gamma[j] / (2 * pi) * (-dy / r2);
                        v[i][1] += sys.gamma[j] / (2 * pi) * (dx / r2);
                    }
                    // opposite-sign image at (x_j, -y_j)
                    const double dx = sys.pos[i][0] - sys.pos[j][0];
                    const double dy = sys.pos[i][1] + sys.pos[j][1];
                    const double r2 = dx * dx + dy * dy;
                    v[i][0] -= sys.gamma[j] / (2 * pi) * (-dy / r2);
                    v[i][1] -= sys.gamma[j] / (2 * pi) * (dx / r2);
                }
            break;
        case Geometry::sphere:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const auto& xi = sys.pos[i];
                    const auto& xj = sys.pos[j];
                    const double dot = xi[0] * xj[0] + xi[1] * xj[1] + xi[2] * xj[2];
                    const double f = sys.gamma[j] / (4 * pi) / (1.0 - dot);
                    v[i][0] += f * (xj[1] * xi[2] - xj[2] * xi[1]);
                    v[i][1] += f * (xj[2] * xi[0] - xj[0] * xi[2]);
                    v[i][2] += f * (xj[0] * xi[1] - xj[1] * xi[0]);
                }
            break;
        case Geometry::torus:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const cplx w{sys.pos[i][0] - sys.pos[j][0], sys.pos[i][1] - sys.pos[j][1]};
                    const auto uv = detail::torus_kernel(w);
                    v[i][0] += sys.gamma[j] * uv[0];
                    v[i][1] += sys.gamma[j] * uv[1];
                }
            break;
    }
    return v;
}

struct ConservedSet {
    double hamiltonian = 0.0;
    std::vector<std::pair<std::string, double>> values;  // named first integrals incl. H
};

/// First integrals per geometry (documented formulas; conservation is verified
/// numerically rather than asserted from the literature).
inline ConservedSet conserved(const VortexSystem& sys) {
    const double pi = std::numbers::pi;
    const std::size_t n = sys.size();
    ConservedSet out;
    double H = 0.0;
    switch (sys.geometry) {
        case Geometry::plane: {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i)
                        H += -sys.gamma[i] * sys.gamma[j] / (4 * pi) *
                             std::log(std::sqrt(detail::sep2_plane(sys.pos[i], sys.pos[j])));
            double px = 0, py = 0, L = 0;
            for (std::size_t i = 0; i < n; ++i) {
                px += sys.gamma[i] * sys.pos[i][0];
                py += sys.gamma[i] * sys.pos[i][1];
                L += sys.gamma[i] *
                     (sys.pos[i][0] * sys.pos[i][0] + sys.pos[i][1] * sys.pos[i][1]);
            }
            out.values = {{"H", H}, {"Px", px}, {"Py", py}, {"L", L}};
            break;
        }
        case Geometry::half_plane: {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i)
                        H += -sys.gamma[i] * sys.gamma[j] / (4 * pi) *
                             std::log(std::sqrt(detail::sep2_plane(sys.pos[i], sys.pos[j])));
                    const double dx = sys.pos[i][0] - sys.pos[j][0];
                    const double sy = sys.pos[i][1] + sys.pos[j][1];
                    H += sys.gamma[i] * sys.gamma[j] / (4 * pi) *
                         std::log(std::sqrt(dx * dx + sy * sy));
                }
            double p = 0;
            for (std::size_t i = 0; i < n; ++i) p += sys.gamma[i] * sys.pos[i][1];
            out.values = {{"H", H}, {"P", p}};
            break;
        }
        case Geometry::sphere: {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) {
                        const auto& a = sys.pos[i];
                        const auto& b = sys.pos[j];
                        const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                        H += -sys.gamma[i] * sys.gamma[j] / (4 * pi) * std::log(2.0 - 2.0 * dot);
                    }
            H *= 0.5;  // ordered double count of the standard pair sum
            double m[3] = {0, 0, 0};
            for (std::size_t i = 0; i < n; ++i)
                for (int c = 0; c < 3; ++c) m[c] += sys.gamma[i] * sys.pos[i][c];
            out.values = {{"H", H}, {"Mx", m[0]}, {"My", m[1]}, {"Mz", m[2]}};
            break;
        }
        case Geometry::torus: {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    H += sys.gamma[i] * sys.gamma[j] *
                         detail::torus_psi(cplx{sys.pos[i][0] - sys.pos[j][0],
                                                sys.pos[i][1] - sys.pos[j][1]});
            double px = 0, py = 0;
            for (std::size_t i = 0; i < n; ++i) {
                px += sys.gamma[i] * sys.pos[i][0];
                py += sys.gamma[i] * sys.pos[i][1];
            }
            out.values = {{"H", H}, {"Px", px}, {"Py", py}};
            break;
        }
    }
    out.hamiltonian = out.values.empty() ? 0.0 : out.values.front().second;
    return out;
}

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<std::array<double, 3>>> pos;
    VortexSystem final_state;
};

/// Adaptive Dormand-Prince 5(4). Dense output at cadence dt_out (stepper is
/// clipped to the sample times). Positions are integrated unwrapped on the
/// torus so that momenta stay exactly conserved.
inline Trajectory integrate(const VortexSystem& sys0, double t_end, double tol,
                            double dt_out = 0.0) {
    if (tol < 1e-13 || tol > 1e-6)
        throw std::invalid_argument("integrate: tol must be in [1e-13, 1e-6]");
    validate(sys0);
    VortexSystem sys = sys0;
    const std::size_t n = sys.size();
    const int dim = sys.geometry == Geometry::sphere ? 3 : 2;

    auto eval = [&](const VortexSystem& s) { return rhs(s); };

    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Trajectory out;
    double t = 0.0;
    double next_sample = dt_out > 0 ? dt_out : t_end;
    out.t.push_back(0.0);
    out.pos.push_back(sys.pos);

    double h = std::min(1e-3, t_end > 0 ? t_end : 1e-3);
    auto k1 = eval(sys);
    while (t < t_end - 1e-14) {
        double h_try = h;
        bool hit_sample = false;
        const double t_stop = std::min(next_sample, t_end);
        if (t + h_try >= t_stop - 1e-14) {
            h_try = t_stop - t;
            hit_sample = (t_stop == next_sample);
        }

        auto stage = [&](std::initializer_list<
                         std::pair<const std::vector<std::array<double, 3>>*, double>>
                             terms) {
            VortexSystem s = sys;
            for (auto& [kv, coef] : terms)
                for (std::size_t i = 0; i < n; ++i)
                    for (int c = 0; c < dim; ++c) s.pos[i][c] += h_try * coef * (*kv)[i][c];
            return s;
        };

        const auto k2 = eval(stage({{&k1, a21}}));
        const auto k3 = eval(stage({{&k1, a31}, {&k2, a32}}));
        const auto k4 = eval(stage({{&k1, a41}, {&k2, a42}, {&k3, a43}}));
        const auto k5 = eval(stage({{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}}));
        const auto k6 =
            eval(stage({{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}}));
        VortexSystem s5 = sys;
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < dim; ++c)
                s5.pos[i][c] += h_try * (b1 * k1[i][c] + b3 * k3[i][c] + b4 * k4[i][c] +
                                         b5 * k5[i][c] + b6 * k6[i][c]);
        const auto k7 = eval(s5);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < dim; ++c) {
                const double e = h_try * (e1 * k1[i][c] + e3 * k3[i][c] + e4 * k4[i][c] +
                                          e5 * k5[i][c] + e6 * k6[i][c] + e7 * k7[i][c]);
                err = std::max(err, std::abs(e) / (1.0 + std::abs(sys.pos[i][c])));
            }

        if (err <= tol) {  // accept
            t += h_try;
            sys.pos = s5.pos;
            if (sys.geometry == Geometry::sphere)
                for (auto& p : sys.pos) {
                    const double nn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
                    p[0] /= nn;
                    p[1] /= nn;
                    p[2] /= nn;
                }
            k1 = k7;  // FSAL
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (detail::sep2(sys.geometry, sys.pos[i], sys.pos[j]) <
                        min_separation * min_separation)
                        throw CollapseCandidate(
                            t, "collapse candidate: vortices " + std::to_string(i) + "," +
                                   std::to_string(j) + " at t=" + std::to_string(t));
            if (sys.geometry == Geometry::half_plane)
                for (const auto& p : sys.pos)
                    if (p[1] <= 0)
                        throw CollapseCandidate(
                            t, "vortex reached the wall at t=" + std::to_string(t));
            if (hit_sample && dt_out > 0) {
                out.t.push_back(t);
                out.pos.push_back(sys.pos);
                next_sample += dt_out;
            }
        }
        const double fac =
            err > 0 ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0) : 5.0;
        h = h_try * fac;
        if (h < 1e-13)
            throw CollapseCandidate(
                t, "step-size underflow (collapse candidate) at t=" + std::to_string(t));
    }
    if (out.t.back() < t_end - 1e-12) {
        out.t.push_back(t);
        out.pos.push_back(sys.pos);
    }
    out.final_state = sys;
    return out;
}

/// solve the reduced problem: advance a copy of sys to t_end, return it
inline VortexSystem advance(const VortexSystem& sys, double t_end, double tol) {
    return integrate(sys, t_end, tol).final_state;
}

struct SectionSpec {
    std::function<double(const std::vector<std::array<double, 3>>&)> g;
    bool positive_direction = true;  ///< record crossings with increasing g only
};

struct SectionPoint {
    double t;
    std::vector<std::array<double, 3>> pos;
};

/// Crossings of g = 0 along a sampled trajectory, located by bisection on the
/// linear interpolant between bracketing samples. Empty result when the
/// trajectory never crosses.
inline std::vector<SectionPoint> poincare_section(const Trajectory& traj,
                                                  const SectionSpec& spec) {
    std::vector<SectionPoint> out;
    if (traj.t.size() < 2) return out;
    auto interp = [&](std::size_t seg, double a) {
        std::vector<std::array<double, 3>> p(traj.pos[seg].size());
        for (std::size_t i = 0; i < p.size(); ++i)
            for (int c = 0; c < 3; ++c)
                p[i][c] =
                    (1 - a) * traj.pos[seg][i][c] + a * traj.pos[seg + 1][i][c];
        return p;
    };
    for (std::size_t s = 0; s + 1 < traj.t.size(); ++s) {
        const double g0 = spec.g(traj.pos[s]);
        const double g1 = spec.g(traj.pos[s + 1]);
        if (g0 == 0.0) continue;  // counted at segment start only if sign change
        const bool rising = g0 < 0 && g1 >= 0;
        const bool falling = g0 > 0 && g1 <= 0;
        if (!(rising || falling)) continue;
        if (spec.positive_direction && !rising) continue;
        double lo = 0, hi = 1;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = spec.g(interp(s, mid));
            if ((gm < 0) == (g0 < 0))
                lo = mid;
            else
                hi = mid;
        }
        const double a = 0.5 * (lo + hi);
        out.push_back({traj.t[s] + a * (traj.t[s + 1] - traj.t[s]), interp(s, a)});
    }
    return out;
}

/// Largest Lyapunov exponent estimate: a d0 = 1e-8 perturbation renormalized
/// every unit of time; lambda is the mean log growth rate over the second half
/// of the window (the first half is alignment transient and is discarded).
inline double lyapunov_max(const VortexSystem& sys0, double t_end, double tol = 1e-10,
                           double d0 = 1e-8, double renorm_dt = 1.0) {
    validate(sys0);
    VortexSystem a = sys0;
    VortexSystem b = sys0;
    b.pos[0][0] += d0;
    std::vector<double> logs;
    double t = 0.0;
    while (t < t_end - 1e-12) {
        a = advance(a, renorm_dt, tol);
        b = advance(b, renorm_dt, tol);
        t += renorm_dt;
        double d2 = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int c = 0; c < 3; ++c) {
                const double d = b.pos[i][c] - a.pos[i][c];
                d2 += d * d;
            }
        const double d = std::sqrt(d2);
        logs.push_back(std::log(d / d0));
        const double f = d0 / d;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int c = 0; c < 3; ++c)
                b.pos[i][c] = a.pos[i][c] + f * (b.pos[i][c] - a.pos[i][c]);
        if (a.geometry == Geometry::sphere)
            for (auto& p : b.pos) {
                const double nn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
                p[0] /= nn;
                p[1] /= nn;
                p[2] /= nn;
            }
    }
    const std::size_t skip = logs.size() / 2;
    double sum = 0.0;
    for (std::size_t k = skip; k < logs.size(); ++k) sum += logs[k];
    return sum / ((logs.size() - skip) * renorm_dt);
}

}  // namespace geoflow::pv
