#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geoflow/euler2d.hpp"

using namespace geoflow;
using namespace geoflow::euler2d;

namespace {

double spec_linf(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Brute-force flood fill, independent of detect_blobs (recursion-free DFS on a
// marker array, periodic 4-neighbourhood).
int flood_fill_count(const Grid2& g, const std::vector<double>& phys, double cut) {
    std::vector<char> seen(g.size(), 0);
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    for (int sx = 0; sx < g.nx; ++sx)
        for (int sy = 0; sy < g.ny; ++sy) {
            if (seen[g.idx(sx, sy)] || std::abs(phys[g.idx(sx, sy)]) <= cut) continue;
            ++count;
            stack.push_back({sx, sy});
            seen[g.idx(sx, sy)] = 1;
            while (!stack.empty()) {
                auto [ix, iy] = stack.back();
                stack.pop_back();
                const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto& d : nb) {
                    int jx = (ix + d[0] + g.nx) % g.nx, jy = (iy + d[1] + g.ny) % g.ny;
                    if (!seen[g.idx(jx, jy)] && std::abs(phys[g.idx(jx, jy)]) > cut) {
                        seen[g.idx(jx, jy)] = 1;
                        stack.push_back({jx, jy});
                    }
                }
            }
        }
    return count;
}

}  // namespace

TEST_CASE("rhs: zero field gives zero; parallel flow psi=cos(ky) is steady") {
    Grid2 g(32, 32);
    VorticityField2D zero(g);
    const VorticityField2D r0 = rhs(zero);
    for (const auto& c : r0.omega_hat) CHECK(std::abs(c) == 0.0);

    const VorticityField2D kol = kolmogorov_flow(g, 3);
    const VorticityField2D r = rhs(kol);
    double m = 0;
    for (const auto& c : r.omega_hat) m = std::max(m, std::abs(c));
    CHECK(m < 1e-13);
}

TEST_CASE("rhs equals the direct convolution-sum oracle on a coarse grid") {
    // Two-mode field plus noise, dealiased; the truncated convolution over the
    // retained band is the exact Galerkin nonlinearity.
    Grid2 g(16, 16);
    std::mt19937_64 rng(12);
    auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    VorticityField2D w(g);
    for (auto& c : w.omega_hat) c = cplx{u01(), u01()};
    make_real_symmetric(g, w.omega_hat);
    dealias_inplace(w);

    const VorticityField2D impl = rhs(w);

    // oracle: N_hat(m) = -sum_{k+l=m} (u_hat(k) . i l) omega_hat(l), signed modes
    const int B = g.nx / 3;  // retained band |s| <= B
    auto whart = [&](int sx, int sy) -> cplx {
        return w.omega_hat[g.idx((sx + g.nx) % g.nx, (sy + g.ny) % g.ny)];
    };
    auto uhat = [&](int sx, int sy, cplx& uu, cplx& vv) {
        if (sx == 0 && sy == 0) {
            uu = vv = 0;
            return;
        }
        const double kx = sx, ky = sy;  // lx = ly = 2*pi
        const cplx psi = -whart(sx, sy) / (kx * kx + ky * ky);
        uu = -cplx{0, 1} * ky * psi;
        vv = cplx{0, 1} * kx * psi;
    };
    double err = 0;
    for (int mx = -B; mx <= B; ++mx)
        for (int my = -B; my <= B; ++my) {
            cplx acc{0, 0};
            for (int kx = -B; kx <= B; ++kx)
                for (int ky = -B; ky <= B; ++ky) {
                    const int lx = mx - kx, ly = my - ky;
                    if (std::abs(lx) > B || std::abs(ly) > B) continue;
                    cplx uu, vv;
                    uhat(kx, ky, uu, vv);
                    acc -= uu * cplx{0, 1} * double(lx) * whart(lx, ly) +
                           vv * cplx{0, 1} * double(ly) * whart(lx, ly);
                }
            const cplx got = impl.omega_hat[g.idx((mx + g.nx) % g.nx, (my + g.ny) % g.ny)];
            err = std::max(err, std::abs(acc - got));
        }
    CHECK(err < 1e-13);
}

TEST_CASE("step_rk4: zero field stays zero; RK4 order >= 3.9 by Richardson halving") {
    Grid2 g(32, 32);
    VorticityField2D zero(g);
    const VorticityField2D z1 = step_rk4(zero, 0.01);
    for (const auto& c : z1.omega_hat) CHECK(std::abs(c) == 0.0);

    const VorticityField2D w0 = random_vorticity(g, 2024, 3.0);
    const double T = 0.4;
    auto run_with = [&](double dt) {
        VorticityField2D w = w0;
        const long n = std::lround(T / dt);
        for (long i = 0; i < n; ++i) w = step_rk4(w, dt);
        return w;
    };
    const VorticityField2D ref = run_with(T / 512);
    const double e1 = spec_linf(run_with(T / 32).omega_hat, ref.omega_hat);
    const double e2 = spec_linf(run_with(T / 64).omega_hat, ref.omega_hat);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.9);
    CHECK(order <= 4.6);
}

TEST_CASE("inviscid run conserves E, Omega; mean stays pinned at zero") {
    Grid2 g(64, 64);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 4e-3;
    cfg.t_end = 2.0;
    cfg.output_every = 100;
    const VorticityField2D w0 = random_vorticity(g, 7);
    const RunResult res = run(cfg, w0);
    const double E0 = res.series.front().energy;
    const double Z0 = res.series.front().enstrophy;
    for (const auto& row : res.series) {
        CHECK(std::abs(row.energy - E0) / E0 < 1e-6);
        CHECK(std::abs(row.enstrophy - Z0) / Z0 < 1e-6);
    }
}

TEST_CASE("hyperviscous run: energy and enstrophy monotonically non-increasing") {
    Grid2 g(64, 64);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 4e-3;
    cfg.t_end = 1.0;
    cfg.nu_h = 1e-9;
    cfg.output_every = 25;
    const RunResult res = run(cfg, random_vorticity(g, 8));
    for (std::size_t i = 1; i < res.series.size(); ++i) {
        CHECK(res.series[i].energy <= res.series[i - 1].energy * (1 + 1e-12));
        CHECK(res.series[i].enstrophy <= res.series[i - 1].enstrophy * (1 + 1e-12));
    }
}

TEST_CASE("CFL violation aborts with a diagnostic") {
    Grid2 g(32, 32);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 0.5;  // far beyond the CFL bound for a unit-energy field
    cfg.t_end = 2.0;
    VorticityField2D w0 = random_vorticity(g, 3);
    for (auto& c : w0.omega_hat) c *= 50.0;
    CHECK_THROWS_AS(run(cfg, w0), CflViolation);
}

TEST_CASE("steady_functional_fit: Lap psi = -psi recovered exactly for psi=cos y") {
    Grid2 g(64, 64);
    const VorticityField2D w = kolmogorov_flow(g, 1);
    const SteadyFit fit = steady_functional_fit(w);
    REQUIRE(!fit.degenerate);
    CHECK(fit.residual < 1e-12);
    for (const auto& [s, f] : fit.f_samples) CHECK(f == doctest::Approx(-s).epsilon(1e-10));
}

TEST_CASE("steady_functional_fit: generic field has O(1) residual; omega=0 degenerate") {
    Grid2 g(64, 64);
    const SteadyFit fit = steady_functional_fit(random_vorticity(g, 5));
    REQUIRE(!fit.degenerate);
    CHECK(fit.residual > 0.05);

    VorticityField2D zero(g);
    CHECK(steady_functional_fit(zero).degenerate);
}

TEST_CASE("detect_blobs: two opposite Gaussians") {
    Grid2 g(128, 128);
    std::vector<double> w = gaussian_bump(g, 0.25 * g.lx, 0.25 * g.ly, 0.35, 1.0);
    const std::vector<double> w2 = gaussian_bump(g, 0.75 * g.lx, 0.75 * g.ly, 0.35, -1.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += w2[i];
    const VorticityField2D f = field_from_physical(g, w);
    const BlobSummary bs = detect_blobs(f, 0.01);
    REQUIRE(bs.count == 2);
    // circulations within the truncated-Gaussian quadrature error of +-1
    double sum = 0;
    for (const auto& b : bs.blobs) {
        CHECK(std::abs(std::abs(b.circulation) - 1.0) < 0.02);
        sum += b.circulation;
    }
    CHECK(std::abs(sum) < 1e-10);             // symmetric pair
    CHECK(std::abs(bs.total_integral) < 1e-10);

    // direct quadrature oracle over the mask reproduces the blob circulations
    const std::vector<double> phys = to_physical(f);
    double wmax = 0;
    for (double v : phys) wmax = std::max(wmax, std::abs(v));
    double pos = 0, neg = 0;
    for (std::size_t i = 0; i < phys.size(); ++i)
        if (std::abs(phys[i]) > 0.01 * wmax) (phys[i] > 0 ? pos : neg) += phys[i];
    pos *= g.cell_area();
    neg *= g.cell_area();
    for (const auto& b : bs.blobs)
        CHECK(b.circulation == doctest::Approx(b.circulation > 0 ? pos : neg).epsilon(1e-12));
}

TEST_CASE("detect_blobs: single-signed disk is one blob; blob spanning the seam merges") {
    Grid2 g(64, 64);
    const VorticityField2D f =
        field_from_physical(g, gaussian_bump(g, 0.5 * g.lx, 0.5 * g.ly, 0.5, 1.0));
    CHECK(detect_blobs(f, 0.2).count == 1);

    // same bump centred at the origin corner: wraps all four seams
    const VorticityField2D h =
        field_from_physical(g, gaussian_bump(g, 0.0, 0.0, 0.5, 1.0));
    const BlobSummary bs = detect_blobs(h, 0.2);
    CHECK(bs.count == 1);
    const double cx = bs.blobs[0].centroid_x;
    const double cy = bs.blobs[0].centroid_y;
    CHECK(std::min(cx, g.lx - cx) < 0.05);
    CHECK(std::min(cy, g.ly - cy) < 0.05);
}

TEST_CASE("detect_blobs: checkerboard count matches the flood-fill oracle") {
    Grid2 g(64, 64);
    std::vector<double> w(g.size());
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            w[g.idx(ix, iy)] = std::sin(8 * g.x(ix)) * std::sin(8 * g.y(iy));
    const VorticityField2D f = field_from_physical(g, w);
    const BlobSummary bs = detect_blobs(f, 0.5);
    const std::vector<double> phys = to_physical(f);
    double wmax = 0;
    for (double v : phys) wmax = std::max(wmax, std::abs(v));
    const int oracle = flood_fill_count(g, phys, 0.5 * wmax);
    CHECK(bs.count == oracle);
    // sin(8x)sin(8y) has 16x16 alternating sign cells, one component each
    CHECK(bs.count == 256);
}

TEST_CASE("detect_blobs count matches flood-fill oracle on random fields") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Grid2 g(64, 64);
        const VorticityField2D f = random_vorticity(g, seed);
        const std::vector<double> phys = to_physical(f);
        double wmax = 0;
        for (double v : phys) wmax = std::max(wmax, std::abs(v));
        const BlobSummary bs = detect_blobs(f, 0.2);
        CHECK(bs.count == flood_fill_count(g, phys, 0.2 * wmax));
    }
}

TEST_CASE("tracer in a uniform frozen field translates linearly") {
    Grid2 g(16, 16);
    SpectralVelocity2 vel(g);
    vel.u_hat[0] = 1.0;  // u = (1,0) mean flow
    const auto paths = advect_tracers(vel, {{1.0, 2.0}}, 0.05, 40);
    const auto& [x, y] = paths[0].xy.back();
    CHECK(x == doctest::Approx(1.0 + 2.0).epsilon(1e-12));
    CHECK(y == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tracer on a shear streamline stays on its psi level set") {
    Grid2 g(32, 32);
    const VorticityField2D w = kolmogorov_flow(g, 1);
    const SpectralVelocity2 vel = velocity_from_vorticity(w);
    const double y0 = 0.7;
    const auto paths = advect_tracers(vel, {{1.0, y0}}, 0.02, 200);
    for (const auto& [x, y] : paths[0].xy) CHECK(std::abs(y - y0) < 1e-12);
    // u = sin(y0) along x, integrated exactly by RK4 for this flow
    const auto& last = paths[0].xy.back();
    CHECK(last.first == doctest::Approx(1.0 + 4.0 * std::sin(y0)).epsilon(1e-10));
}

TEST_CASE("advect_tracers over run snapshots reduces to the frozen field when steady") {
    Grid2 g(32, 32);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.output_every = 10;
    cfg.snapshot_every = 10;
    const RunResult res = run(cfg, kolmogorov_flow(g, 1));
    const auto paths = advect_tracers(res, {{0.5, 1.1}}, 0.01);
    const auto& last = paths[0].xy.back();
    CHECK(std::abs(last.second - 1.1) < 1e-10);
    CHECK(last.first == doctest::Approx(0.5 + 1.0 * std::sin(1.1)).epsilon(1e-8));
}

TEST_CASE("gradient_growth: zero slope on a steady run, finite numbers on a stirred one") {
    Grid2 g(32, 32);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    cfg.output_every = 20;
    const GrowthFit steady = gradient_growth(run(cfg, kolmogorov_flow(g, 2)).series);
    CHECK(std::abs(steady.rate) < 1e-8);

    const GrowthFit stirred = gradient_growth(run(cfg, random_vorticity(g, 10)).series);
    CHECK(std::isfinite(stirred.rate));
    CHECK(std::isfinite(stirred.intercept));
}

TEST_CASE("run pins the mean mode exactly and dealiases its state") {
    Grid2 g(32, 32);
    EulerConfig cfg;
    cfg.grid = g;
    cfg.dt = 5e-3;
    cfg.t_end = 0.5;
    cfg.snapshot_every = 50;
    const RunResult res = run(cfg, random_vorticity(g, 21));
    for (const auto& [t, w] : res.snapshots) {
        CHECK(std::abs(w.omega_hat[0]) == 0.0);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                if (!mode_kept(g, ix, iy)) CHECK(std::abs(w.omega_hat[g.idx(ix, iy)]) == 0.0);
    }
}

TEST_CASE("random_vorticity recipe: unit energy, Hermitian, reproducible") {
    Grid2 g(64, 64);
    const VorticityField2D a = random_vorticity(g, 42);
    const VorticityField2D b = random_vorticity(g, 42);
    const VorticityField2D c = random_vorticity(g, 43);
    CHECK(energy2d(a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hermitian_defect(g, a.omega_hat) < 1e-14);
    CHECK(spec_linf(a.omega_hat, b.omega_hat) == 0.0);
    CHECK(spec_linf(a.omega_hat, c.omega_hat) > 1e-6);
}
