#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoflow/topo3d.hpp"

using namespace geoflow;
using namespace geoflow::topo3d;

namespace {

double linf_diff(const VelocityField3D& a, const VelocityField3D& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.u[i] - b.u[i]));
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
        m = std::max(m, std::abs(a.w[i] - b.w[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("abc_field: zero amplitudes, divergence, curl eigen-relation") {
    const VelocityField3D zero = abc_field(32, 0, 0, 0);
    for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero.u[i] == 0.0);

    const VelocityField3D a100 = abc_field(32, 1, 0, 0);
    // u = (sin z, cos z, 0); hand curl: curl u = (sin z, cos z, 0) = u
    CHECK(linf_diff(curl3d(a100), a100) < 1e-12);
    CHECK(divergence_spectral_max(a100) < 1e-12);

    const VelocityField3D f = abc_field(32, 1.3, -0.7, 0.4);
    CHECK(beltrami_residual(f, 1.0) < 1e-12);
    CHECK(divergence_spectral_max(f) < 1e-12);
}

TEST_CASE("project_divfree: idempotent, annihilates gradients, self-adjoint") {
    const int n = 16;
    // gradient field grad(phi), phi = sin x cos 2y sin z
    VelocityField3D gradphi(n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const double x = gradphi.coord(ix), y = gradphi.coord(iy), z = gradphi.coord(iz);
                const std::size_t p = gradphi.idx(ix, iy, iz);
                gradphi.u[p] = std::cos(x) * std::cos(2 * y) * std::sin(z);
                gradphi.v[p] = -2 * std::sin(x) * std::sin(2 * y) * std::sin(z);
                gradphi.w[p] = std::sin(x) * std::cos(2 * y) * std::cos(z);
            }
    const VelocityField3D pg = project_divfree(gradphi);
    double m = 0;
    for (std::size_t i = 0; i < pg.size(); ++i)
        m = std::max({m, std::abs(pg.u[i]), std::abs(pg.v[i]), std::abs(pg.w[i])});
    CHECK(m < 1e-12);

    std::mt19937_64 rng(5);
    auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    for (int trial = 0; trial < 100; ++trial) {
        VelocityField3D f(n);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.u[i] = u01();
            f.v[i] = u01();
            f.w[i] = u01();
        }
        const VelocityField3D p1 = project_divfree(f);
        if (trial < 10) {
            const VelocityField3D p2 = project_divfree(p1);
            CHECK(linf_diff(p1, p2) < 1e-12);  // idempotence
        }
        // <u - Pu, Pu> = 0
        VelocityField3D resid(n);
        for (std::size_t i = 0; i < f.size(); ++i) {
            resid.u[i] = f.u[i] - p1.u[i];
            resid.v[i] = f.v[i] - p1.v[i];
            resid.w[i] = f.w[i] - p1.w[i];
        }
        CHECK(std::abs(inner3d(resid, p1)) < 1e-12 * f.size());
    }
}

TEST_CASE("inv_curl: eigenfield, round trip, mean-flow refusal") {
    const VelocityField3D abc = abc_field(32, 1, 1, 1);
    CHECK(linf_diff(inv_curl(abc), abc) < 1e-11);  // lambda = 1 eigenfield

    const VelocityField3D v = random_divfree(16, 77);
    const VelocityField3D u = curl3d(v);
    CHECK(linf_diff(inv_curl(u), v) < 1e-11);  // recovers the div-free potential

    VelocityField3D meanflow(16);
    for (auto& x : meanflow.u) x = 1.0;
    CHECK_THROWS_AS(inv_curl(meanflow), std::invalid_argument);

    const VelocityField3D w = curl3d(random_divfree(16, 78));
    CHECK(linf_diff(curl3d(inv_curl(w)), w) < 1e-11);  // curl(inv_curl) identity
}

TEST_CASE("ABC(1,1,1): E = 3(2pi)^3/2 and H = 3(2pi)^3; E = H/2") {
    const VelocityField3D f = abc_field(32, 1, 1, 1);
    const double V = two_pi * two_pi * two_pi;
    CHECK(energy3d(f) == doctest::Approx(1.5 * V).epsilon(1e-12));
    CHECK(helicity(f) == doctest::Approx(3.0 * V).epsilon(1e-12));
    CHECK(velocity_helicity(f) == doctest::Approx(3.0 * V).epsilon(1e-12));
}

TEST_CASE("mirror image flips the sign of helicity") {
    const int n = 16;
    const VelocityField3D f = random_divfree(n, 101);
    VelocityField3D m(n);
    // pullback under x -> -x: u1 flips sign, u2, u3 keep it
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t p = m.idx(ix, iy, iz);
                const std::size_t q = m.idx((n - ix) % n, iy, iz);
                m.u[p] = -f.u[q];
                m.v[p] = f.v[q];
                m.w[p] = f.w[q];
            }
    CHECK(divergence_spectral_max(m) < 1e-12);
    CHECK(helicity(m) == doctest::Approx(-helicity(f)).epsilon(1e-12));
}

TEST_CASE("2.5D field with zero vertical coupling has zero helicity") {
    const int n = 16;
    VelocityField3D f(n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) f.u[f.idx(ix, iy, iz)] = std::sin(f.coord(iy));
    CHECK(std::abs(helicity(f)) < 1e-12);
}

TEST_CASE("helicity is invariant under torus translations") {
    const int n = 16;
    const VelocityField3D f = random_divfree(n, 55);
    const double h0 = helicity(f);
    VelocityField3D t(n);
    const int sx = 5, sy = 11, sz = 2;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t p = t.idx(ix, iy, iz);
                const std::size_t q = t.idx((ix + sx) % n, (iy + sy) % n, (iz + sz) % n);
                t.u[p] = f.u[q];
                t.v[p] = f.v[q];
                t.w[p] = f.w[q];
            }
    CHECK(helicity(t) == doctest::Approx(h0).epsilon(1e-12));
}

TEST_CASE("helicity bounds energy: |H| <= 2E on 1000 random band-limited fields") {
    for (int seed = 0; seed < 1000; ++seed) {
        const VelocityField3D f = random_divfree(16, 1000 + seed);
        CHECK(std::abs(helicity(f)) <= 2.0 * energy3d(f) * (1 + 1e-12));
    }
}

TEST_CASE("beltrami_residual: lattice of ABC amplitudes all satisfy curl u = u") {
    for (double A : {0.0, 0.5, 1.0})
        for (double B : {0.0, 1.0})
            for (double C : {0.25, 1.0}) {
                if (A == 0 && B == 0 && C == 0) continue;
                CHECK(beltrami_residual(abc_field(32, A, B, C), 1.0) < 1e-12);
            }
}
