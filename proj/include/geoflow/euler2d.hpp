/// @file euler2d.hpp
/// @brief Pseudo-spectral 2D Euler in vorticity form on the torus:
///        d_t omega + u.grad omega = -nu_h (-Lap)^p omega,
/// with Lawson (integrating-factor) RK4 time stepping, 2/3 dealiasing and the
/// diagnostics used by the long-time experiments: steadiness fit Lap(psi)=F(psi),
/// blob detection, tracer advection and gradient-growth tracking.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoflow/spectral2d.hpp"

namespace geoflow::euler2d {

/// thrown when dt * max|u| * kmax exceeds the CFL bound
struct CflViolation : std::runtime_error {
    explicit CflViolation(const std::string& what) : std::runtime_error(what) {}
};

struct EulerConfig {
    Grid2 grid;
    double dt = 1e-3;
    double t_end = 1.0;
    double nu_h = 0.0;      ///< hyperviscosity coefficient, >= 0
    int hyper_order = 4;    ///< p in (-Lap)^p
    int output_every = 10;  ///< diagnostics cadence in steps
    int snapshot_every = 0; ///< 0 = no snapshots
    double blob_threshold = 0.2;
    double cfl_limit = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (dt <= 0) throw std::invalid_argument("EulerConfig: dt must be positive");
        if (t_end < 0) throw std::invalid_argument("EulerConfig: t_end must be >= 0");
        if (nu_h < 0) throw std::invalid_argument("EulerConfig: nu_h must be >= 0");
        if (hyper_order < 1 || hyper_order > 8)
            throw std::invalid_argument("EulerConfig: hyper_order must be in 1..8");
        if (output_every < 1) throw std::invalid_argument("EulerConfig: output_every >= 1");
        if (blob_threshold <= 0 || blob_threshold >= 1)
            throw std::invalid_argument("EulerConfig: blob_threshold in (0,1)");
    }
};

/// scratch buffers for the nonlinear term; one per execution context
class Workspace {
  public:
    explicit Workspace(const Grid2& g)
        : grid_(g), u_(g.size()), v_(g.size()), wx_(g.size()), wy_(g.size()) {}

    const Grid2& grid() const { return grid_; }

    /// Dealiased spectral advection term -(u.grad omega); returns max|u| over
    /// the grid as a byproduct (CFL monitoring).
    double nonlinear(const std::vector<cplx>& omega_hat, std::vector<cplx>& out) {
        const Grid2& g = grid_;
        const cplx I{0.0, 1.0};
        for (int ix = 0; ix < g.nx; ++ix) {
            const double kx = g.kx(ix);
            for (int iy = 0; iy < g.ny; ++iy) {
                const double ky = g.ky(iy);
                const std::size_t p = g.idx(ix, iy);
                const cplx w = omega_hat[p];
                if (ix == 0 && iy == 0) {
                    u_[p] = v_[p] = cplx{0, 0};
                } else {
                    const double k2 = kx * kx + ky * ky;
                    const cplx psi = -w / k2;
                    u_[p] = -I * ky * psi;
                    v_[p] = I * kx * psi;
                }
                wx_[p] = I * kx * w;
                wy_[p] = I * ky * w;
            }
        }
        fft::backward2(u_, g.nx, g.ny);
        fft::backward2(v_, g.nx, g.ny);
        fft::backward2(wx_, g.nx, g.ny);
        fft::backward2(wy_, g.nx, g.ny);
        double umax2 = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            const double uu = u_[p].real(), vv = v_[p].real();
            umax2 = std::max(umax2, uu * uu + vv * vv);
            out[p] = -(uu * wx_[p].real() + vv * wy_[p].real());
        }
        fft::forward2(out, g.nx, g.ny);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                if (!mode_kept(g, ix, iy)) out[g.idx(ix, iy)] = 0.0;
        out[0] = 0.0;
        return std::sqrt(umax2);
    }

  private:
    Grid2 grid_;
    std::vector<cplx> u_, v_, wx_, wy_;
};

/// d omega_hat/dt including the hyperviscous term (reference form; the stepper
/// integrates the viscous part exactly instead)
inline VorticityField2D rhs(const VorticityField2D& w, double nu_h = 0.0, int hyper_order = 4) {
    VorticityField2D out(w.grid);
    Workspace ws(w.grid);
    ws.nonlinear(w.omega_hat, out.omega_hat);
    if (nu_h > 0.0) {
        const Grid2& g = w.grid;
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy) {
                const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
                out.omega_hat[g.idx(ix, iy)] -=
                    nu_h * std::pow(k2, hyper_order) * w.omega_hat[g.idx(ix, iy)];
            }
        out.omega_hat[0] = 0.0;
    }
    return out;
}

namespace detail {

/// Lawson RK4: exact integrating factor for the hyperviscous symbol, classic
/// RK4 for the advection. Returns max|u| seen at the first stage.
inline double lawson_rk4_step(std::vector<cplx>& omega_hat, const Grid2& g, double dt,
                              double nu_h, int hyper_order, Workspace& ws,
                              std::vector<cplx>& k1, std::vector<cplx>& k2,
                              std::vector<cplx>& k3, std::vector<cplx>& k4,
                              std::vector<cplx>& stage, const std::vector<double>& e_half,
                              const std::vector<double>& e_full) {
    const std::size_t n = g.size();
    const double umax = ws.nonlinear(omega_hat, k1);

    for (std::size_t p = 0; p < n; ++p) stage[p] = e_half[p] * (omega_hat[p] + 0.5 * dt * k1[p]);
    ws.nonlinear(stage, k2);

    for (std::size_t p = 0; p < n; ++p) stage[p] = e_half[p] * omega_hat[p] + 0.5 * dt * k2[p];
    ws.nonlinear(stage, k3);

    for (std::size_t p = 0; p < n; ++p)
        stage[p] = e_full[p] * omega_hat[p] + dt * e_half[p] * k3[p];
    ws.nonlinear(stage, k4);

    for (std::size_t p = 0; p < n; ++p)
        omega_hat[p] = e_full[p] * omega_hat[p] +
                       (dt / 6.0) * (e_full[p] * k1[p] + 2.0 * e_half[p] * (k2[p] + k3[p]) +
                                     k4[p]);
    omega_hat[0] = 0.0;  // pin the mean each step
    (void)nu_h;
    (void)hyper_order;
    return umax;
}

inline std::vector<double> viscous_factor(const Grid2& g, double nu_h, int p, double t) {
    std::vector<double> e(g.size(), 1.0);
    if (nu_h <= 0.0) return e;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy);
            e[g.idx(ix, iy)] = std::exp(-nu_h * std::pow(k2, p) * t);
        }
    return e;
}

}  // namespace detail

/// single RK4 step (viscous part by exact integrating factor)
inline VorticityField2D step_rk4(const VorticityField2D& w, double dt, double nu_h = 0.0,
                                 int hyper_order = 4) {
    VorticityField2D out = w;
    Workspace ws(w.grid);
    const std::size_t n = w.grid.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), stage(n);
    const auto e_half = detail::viscous_factor(w.grid, nu_h, hyper_order, 0.5 * dt);
    const auto e_full = detail::viscous_factor(w.grid, nu_h, hyper_order, dt);
    detail::lawson_rk4_step(out.omega_hat, w.grid, dt, nu_h, hyper_order, ws, k1, k2, k3, k4,
                            stage, e_half, e_full);
    return out;
}

struct DiagnosticRow {
    double t;
    double energy;
    double enstrophy;
    double casimir3;
    double casimir4;
    double max_grad;
    int nblobs;
};

struct Blob {
    double circulation = 0.0;
    double area = 0.0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
};

struct BlobSummary {
    int count = 0;
    std::vector<Blob> blobs;
    double total_integral = 0.0;  ///< int omega over the grid (0 for valid fields)
};

/// Connected components (4-connectivity, periodic wrap) of
/// {|omega| > threshold * max|omega|}. Centroids are accumulated in BFS-offset
/// coordinates so blobs straddling the seam are handled.
inline BlobSummary detect_blobs(const VorticityField2D& w, double threshold_fraction) {
    if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
        throw std::invalid_argument("detect_blobs: threshold fraction must be in (0,1)");
    const Grid2& g = w.grid;
    const std::vector<double> phys = to_physical(w);
    double wmax = 0.0, total = 0.0;
    for (double v : phys) {
        wmax = std::max(wmax, std::abs(v));
        total += v;
    }
    BlobSummary out;
    out.total_integral = total * g.cell_area();
    if (wmax == 0.0) return out;
    const double cut = threshold_fraction * wmax;
    std::vector<std::int8_t> state(g.size(), 0);  // 0 untouched, 1 visited
    const double da = g.cell_area();
    const double hx = g.lx / g.nx, hy = g.ly / g.ny;
    std::vector<std::array<int, 4>> queue;  // ix, iy, offx, offy (unwrapped offsets)
    for (int sx = 0; sx < g.nx; ++sx) {
        for (int sy = 0; sy < g.ny; ++sy) {
            const std::size_t sp = g.idx(sx, sy);
            if (state[sp] || std::abs(phys[sp]) <= cut) continue;
            Blob b;
            double wx = 0.0, wy = 0.0, wsum = 0.0;
            queue.clear();
            queue.push_back({sx, sy, 0, 0});
            state[sp] = 1;
            while (!queue.empty()) {
                auto [ix, iy, ox, oy] = queue.back();
                queue.pop_back();
                const double val = phys[g.idx(ix, iy)];
                b.circulation += val * da;
                b.area += da;
                const double px = g.x(sx) + ox * hx, py = g.y(sy) + oy * hy;
                wx += std::abs(val) * px;
                wy += std::abs(val) * py;
                wsum += std::abs(val);
                const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (const auto& d : nbr) {
                    const int jx = (ix + d[0] + g.nx) % g.nx;
                    const int jy = (iy + d[1] + g.ny) % g.ny;
                    const std::size_t jp = g.idx(jx, jy);
                    if (state[jp] || std::abs(phys[jp]) <= cut) continue;
                    state[jp] = 1;
                    queue.push_back({jx, jy, ox + d[0], oy + d[1]});
                }
            }
            b.centroid_x = std::fmod(std::fmod(wx / wsum, g.lx) + g.lx, g.lx);
            b.centroid_y = std::fmod(std::fmod(wy / wsum, g.ly) + g.ly, g.ly);
            out.blobs.push_back(b);
        }
    }
    out.count = static_cast<int>(out.blobs.size());
    return out;
}

/// max |grad omega| over the grid, derivatives spectral
inline double max_grad_omega(const VorticityField2D& w) {
    const Grid2& g = w.grid;
    std::vector<cplx> gx(g.size()), gy(g.size());
    const cplx I{0, 1};
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t p = g.idx(ix, iy);
            gx[p] = I * g.kx(ix) * w.omega_hat[p];
            gy[p] = I * g.ky(iy) * w.omega_hat[p];
        }
    fft::backward2(gx, g.nx, g.ny);
    fft::backward2(gy, g.nx, g.ny);
    double m2 = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
        m2 = std::max(m2, gx[p].real() * gx[p].real() + gy[p].real() * gy[p].real());
    return std::sqrt(m2);
}

struct RunResult {
    std::vector<DiagnosticRow> series;
    std::vector<std::pair<double, VorticityField2D>> snapshots;
};

inline DiagnosticRow diagnostics_at(double t, const VorticityField2D& w, double blob_threshold) {
    DiagnosticRow r;
    r.t = t;
    r.energy = energy2d(w);
    r.enstrophy = enstrophy(w);
    r.casimir3 = casimir_moment(w, 3);
    r.casimir4 = casimir_moment(w, 4);
    r.max_grad = max_grad_omega(w);
    r.nblobs = detect_blobs(w, blob_threshold).count;
    return r;
}

/// Time integration with diagnostics. Deterministic given the config; throws
/// CflViolation when dt max|u| kmax exceeds the configured limit.
inline RunResult run(const EulerConfig& cfg, const VorticityField2D& w0) {
    cfg.validate();
    if (!(w0.grid == cfg.grid)) throw std::invalid_argument("run: grid mismatch");
    VorticityField2D w = dealias(w0);
    w.omega_hat[0] = 0.0;
    Workspace ws(cfg.grid);
    const std::size_t n = cfg.grid.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), stage(n);
    const auto e_half = detail::viscous_factor(cfg.grid, cfg.nu_h, cfg.hyper_order, 0.5 * cfg.dt);
    const auto e_full = detail::viscous_factor(cfg.grid, cfg.nu_h, cfg.hyper_order, cfg.dt);
    const double kmax = kmax_dealiased(cfg.grid);

    RunResult out;
    out.series.push_back(diagnostics_at(0.0, w, cfg.blob_threshold));
    if (cfg.snapshot_every > 0) out.snapshots.emplace_back(0.0, w);

    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    for (long s = 1; s <= nsteps; ++s) {
        const double umax = detail::lawson_rk4_step(w.omega_hat, cfg.grid, cfg.dt, cfg.nu_h,
                                                    cfg.hyper_order, ws, k1, k2, k3, k4, stage,
                                                    e_half, e_full);
        const double cfl = cfg.dt * umax * kmax;
        if (cfl > cfg.cfl_limit)
            throw CflViolation("CFL violation at t=" + std::to_string(s * cfg.dt) +
                               ": dt*max|u|*kmax = " + std::to_string(cfl) + " > " +
                               std::to_string(cfg.cfl_limit));
        const double t = s * cfg.dt;
        if (s % cfg.output_every == 0 || s == nsteps)
            out.series.push_back(diagnostics_at(t, w, cfg.blob_threshold));
        if (cfg.snapshot_every > 0 && (s % cfg.snapshot_every == 0 || s == nsteps))
            out.snapshots.emplace_back(t, w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Steadiness diagnostic: fit of the scatter {(psi(x), Lap psi(x))} by a
// single-valued curve F. 64 equal-count psi bins; F is the piecewise-linear
// interpolant through the bin centroids (exact for affine F), extrapolated
// linearly at the ends. Residual is RMS(Lap psi - F(psi))/RMS(Lap psi).
// ---------------------------------------------------------------------------

struct SteadyFit {
    bool degenerate = false;  ///< psi (numerically) constant; fit meaningless
    double residual = 0.0;
    std::vector<std::pair<double, double>> f_samples;  ///< (psi, F(psi)) bin centroids

    double eval(double s) const {
        const auto& fs = f_samples;
        if (fs.size() < 2) return fs.empty() ? 0.0 : fs.front().second;
        std::size_t hi = 1;
        while (hi + 1 < fs.size() && s > fs[hi].first) ++hi;
        const auto& [s0, f0] = fs[hi - 1];
        const auto& [s1, f1] = fs[hi];
        const double w = (s1 - s0) != 0.0 ? (s - s0) / (s1 - s0) : 0.0;
        return f0 + w * (f1 - f0);
    }
};

inline SteadyFit steady_functional_fit(const VorticityField2D& w, int nbins = 64) {
    const Grid2& g = w.grid;
    const std::vector<cplx> psi_hat = stream_function_hat(w);
    const std::vector<double> psi = to_physical(g, psi_hat);
    const std::vector<double> lap = to_physical(w);  // Lap psi = omega by construction

    SteadyFit fit;
    double pmin = psi[0], pmax = psi[0], lrms = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        pmin = std::min(pmin, psi[i]);
        pmax = std::max(pmax, psi[i]);
        lrms += lap[i] * lap[i];
    }
    lrms = std::sqrt(lrms / psi.size());
    if (pmax - pmin < 1e-12 * std::max(1.0, std::abs(pmax)) || lrms == 0.0) {
        fit.degenerate = true;
        fit.residual = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }

    std::vector<std::size_t> order(psi.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return psi[a] < psi[b]; });

    const std::size_t total = order.size();
    const std::size_t bins = std::min<std::size_t>(static_cast<std::size_t>(nbins), total);
    fit.f_samples.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = total * b / bins, hi = total * (b + 1) / bins;
        if (hi == lo) continue;
        double sp = 0.0, sl = 0.0;
        for (std::size_t q = lo; q < hi; ++q) {
            sp += psi[order[q]];
            sl += lap[order[q]];
        }
        fit.f_samples.emplace_back(sp / (hi - lo), sl / (hi - lo));
    }

    double rss = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double d = lap[i] - fit.eval(psi[i]);
        rss += d * d;
    }
    fit.residual = std::sqrt(rss / total) / lrms;
    return fit;
}

// ---------------------------------------------------------------------------
// Tracers: RK4 with spectral (exact Fourier) interpolation of u.
// ---------------------------------------------------------------------------

struct TracerPath {
    std::vector<double> t;
    std::vector<std::pair<double, double>> xy;
};

/// Advect tracers in a frozen velocity field.
inline std::vector<TracerPath> advect_tracers(const SpectralVelocity2& vel,
                                              const std::vector<std::pair<double, double>>& seeds,
                                              double dt, int nsteps, int record_every = 1) {
    std::vector<TracerPath> paths(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        double x = seeds[i].first, y = seeds[i].second;
        paths[i].t.push_back(0.0);
        paths[i].xy.emplace_back(x, y);
        for (int s = 1; s <= nsteps; ++s) {
            double u1, v1, u2, v2, u3, v3, u4, v4;
            eval_velocity_at(vel, x, y, u1, v1);
            eval_velocity_at(vel, x + 0.5 * dt * u1, y + 0.5 * dt * v1, u2, v2);
            eval_velocity_at(vel, x + 0.5 * dt * u2, y + 0.5 * dt * v2, u3, v3);
            eval_velocity_at(vel, x + dt * u3, y + dt * v3, u4, v4);
            x += dt / 6.0 * (u1 + 2 * u2 + 2 * u3 + u4);
            y += dt / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4);
            if (s % record_every == 0 || s == nsteps) {
                paths[i].t.push_back(s * dt);
                paths[i].xy.emplace_back(x, y);
            }
        }
    }
    return paths;
}

/// Advect tracers through a run, linearly interpolating snapshots in time.
/// Requires the run to have been made with snapshot_every > 0.
inline std::vector<TracerPath> advect_tracers(const RunResult& run,
                                              const std::vector<std::pair<double, double>>& seeds,
                                              double dt, int record_every = 1) {
    if (run.snapshots.size() < 2)
        throw std::invalid_argument("advect_tracers: run has no snapshot sequence");
    const Grid2& g = run.snapshots.front().second.grid;
    const double t_end = run.snapshots.back().first;
    const long nsteps = std::lround(t_end / dt);

    auto velocity_at = [&](double t) {
        std::size_t hi = 1;
        while (hi + 1 < run.snapshots.size() && run.snapshots[hi].first < t) ++hi;
        const auto& [t0, w0] = run.snapshots[hi - 1];
        const auto& [t1, w1] = run.snapshots[hi];
        const double a = (t1 - t0) > 0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        VorticityField2D w(g);
        for (std::size_t p = 0; p < g.size(); ++p)
            w.omega_hat[p] = (1.0 - a) * w0.omega_hat[p] + a * w1.omega_hat[p];
        return velocity_from_vorticity(w);
    };

    std::vector<TracerPath> paths(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        paths[i].t.push_back(0.0);
        paths[i].xy.push_back(seeds[i]);
    }
    for (long s = 1; s <= nsteps; ++s) {
        const double t = (s - 1) * dt;
        const SpectralVelocity2 va = velocity_at(t);
        const SpectralVelocity2 vb = velocity_at(t + 0.5 * dt);
        const SpectralVelocity2 vc = velocity_at(t + dt);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            double x = paths[i].xy.back().first, y = paths[i].xy.back().second;
            double u1, v1, u2, v2, u3, v3, u4, v4;
            eval_velocity_at(va, x, y, u1, v1);
            eval_velocity_at(vb, x + 0.5 * dt * u1, y + 0.5 * dt * v1, u2, v2);
            eval_velocity_at(vb, x + 0.5 * dt * u2, y + 0.5 * dt * v2, u3, v3);
            eval_velocity_at(vc, x + dt * u3, y + dt * v3, u4, v4);
            x += dt / 6.0 * (u1 + 2 * u2 + 2 * u3 + u4);
            y += dt / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4);
            if (s % record_every == 0 || s == nsteps) {
                paths[i].t.push_back(s * dt);
                paths[i].xy.emplace_back(x, y);
            }
        }
    }
    return paths;
}

struct GrowthFit {
    double rate = 0.0;       ///< slope of log max|grad omega| vs t
    double intercept = 0.0;
};

/// least-squares fit of log(max_grad) against t over a diagnostic series
inline GrowthFit gradient_growth(const std::vector<DiagnosticRow>& series) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t n = 0;
    for (const auto& r : series) {
        if (r.max_grad <= 0) continue;
        const double y = std::log(r.max_grad);
        st += r.t;
        sy += y;
        stt += r.t * r.t;
        sty += r.t * y;
        ++n;
    }
    GrowthFit f;
    if (n < 2) return f;
    const double det = n * stt - st * st;
    if (det == 0) return f;
    f.rate = (n * sty - st * sy) / det;
    f.intercept = (sy * stt - st * sty) / det;
    return f;
}

// ---------------------------------------------------------------------------
// Canonical initial conditions
// ---------------------------------------------------------------------------

/// omega for the parallel flow psi = amp * cos(k y): omega = -amp k^2 cos(k y)
inline VorticityField2D kolmogorov_flow(const Grid2& g, int k = 1, double amp = 1.0) {
    VorticityField2D w(g);
    const double c = -amp * k * k / 2.0;
    w.omega_hat[g.idx(0, k)] = c;
    w.omega_hat[g.idx(0, (g.ny - k) % g.ny)] = c;
    return w;
}

/// Reproducible random vorticity: |omega_hat| ~ |k|^3 exp(-(|k|/k0)^2), random
/// phases, Hermitian, mean-free, dealiased, normalized to unit energy.
inline VorticityField2D random_vorticity(const Grid2& g, std::uint64_t seed, double k0 = 6.0) {
    VorticityField2D w(g);
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };  // [0,1)
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const int sx = g.sx(ix), sy = g.sy(iy);
            if (!(sx > 0 || (sx == 0 && sy > 0))) continue;  // fill a half-space, mirror below
            if (!mode_kept(g, ix, iy)) continue;
            const double kk = std::sqrt(double(sx) * sx + double(sy) * sy);
            const double amp = std::pow(kk, 3.0) * std::exp(-(kk / k0) * (kk / k0));
            const double phase = two_pi * uniform();
            w.omega_hat[g.idx(ix, iy)] = 0.5 * amp * cplx{std::cos(phase), std::sin(phase)};
        }
    }
    make_real_symmetric(g, w.omega_hat);
    const double e = energy2d(w);
    if (e > 0) {
        const double s = 1.0 / std::sqrt(e);
        for (auto& c : w.omega_hat) c *= s;
    }
    return w;
}

/// periodic Gaussian vorticity bump of circulation gamma centred at (x0,y0)
inline std::vector<double> gaussian_bump(const Grid2& g, double x0, double y0, double sigma,
                                         double gamma) {
    std::vector<double> w(g.size(), 0.0);
    const double a = gamma / (two_pi * sigma * sigma);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            double s = 0.0;
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    const double dx = g.x(ix) - x0 + mx * g.lx;
                    const double dy = g.y(iy) - y0 + my * g.ly;
                    s += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
                }
            w[g.idx(ix, iy)] = a * s;
        }
    return w;
}

}  // namespace geoflow::euler2d
