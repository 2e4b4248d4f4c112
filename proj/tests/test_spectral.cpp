#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "geoflow/gfl1.hpp"
#include "geoflow/spectral2d.hpp"

using namespace geoflow;

namespace {

VorticityField2D random_hermitian_field(const Grid2& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto u = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    VorticityField2D w(g);
    for (auto& c : w.omega_hat) c = cplx{u(), u()};
    make_real_symmetric(g, w.omega_hat);
    dealias_inplace(w);
    return w;
}

}  // namespace

TEST_CASE("Grid2 validates sizes") {
    CHECK_THROWS_AS(Grid2(12, 16), std::invalid_argument);
    CHECK_THROWS_AS(Grid2(8, 8), std::invalid_argument);
    CHECK_THROWS_AS(Grid2(16, 48), std::invalid_argument);
    CHECK_NOTHROW(Grid2(16, 64));
}

TEST_CASE("physical/spectral round trip is identity to 1e-12") {
    Grid2 g(32, 32);
    std::mt19937_64 rng(7);
    std::vector<double> w(g.size());
    double mean = 0;
    for (auto& v : w) {
        v = (rng() >> 11) * 0x1.0p-53 - 0.5;
        mean += v;
    }
    mean /= w.size();
    for (auto& v : w) v -= mean;  // mean-free so the pinned mode drops nothing
    const VorticityField2D f = field_from_physical(g, w);
    const std::vector<double> back = to_physical(f);
    double err = 0;
    for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(back[i] - w[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("velocity_from_vorticity: zero field gives zero velocity") {
    Grid2 g(16, 16);
    VorticityField2D w(g);
    const SpectralVelocity2 vel = velocity_from_vorticity(w);
    for (std::size_t p = 0; p < g.size(); ++p) {
        CHECK(std::abs(vel.u_hat[p]) == 0.0);
        CHECK(std::abs(vel.v_hat[p]) == 0.0);
    }
}

TEST_CASE("velocity_from_vorticity: psi = cos(k y) gives u = (k sin(k y), 0)") {
    Grid2 g(32, 32);
    const int k = 3;
    // omega = Lap psi = -k^2 cos(k y)
    std::vector<double> w(g.size());
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            w[g.idx(ix, iy)] = -double(k) * k * std::cos(k * g.y(iy));
    const VorticityField2D f = field_from_physical(g, w);
    const SpectralVelocity2 vel = velocity_from_vorticity(f);
    const std::vector<double> u = to_physical(g, vel.u_hat);
    const std::vector<double> v = to_physical(g, vel.v_hat);
    double err = 0;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            err = std::max(err, std::abs(u[g.idx(ix, iy)] - k * std::sin(k * g.y(iy))));
            err = std::max(err, std::abs(v[g.idx(ix, iy)]));
        }
    CHECK(err < 1e-12);
}

TEST_CASE("curl of velocity reproduces omega to 1e-12 (spectral round trip oracle)") {
    Grid2 g(32, 32);
    const VorticityField2D w = random_hermitian_field(g, 42);
    const SpectralVelocity2 vel = velocity_from_vorticity(w);
    const VorticityField2D back = curl2d(vel);
    double err = 0;
    for (std::size_t p = 0; p < g.size(); ++p)
        err = std::max(err, std::abs(back.omega_hat[p] - w.omega_hat[p]));
    CHECK(err < 1e-12);
}

TEST_CASE("velocity is divergence-free in spectral norm") {
    Grid2 g(64, 64);
    const VorticityField2D w = random_hermitian_field(g, 3);
    const SpectralVelocity2 vel = velocity_from_vorticity(w);
    double div = 0;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t p = g.idx(ix, iy);
            div = std::max(div,
                           std::abs(g.kx(ix) * vel.u_hat[p] + g.ky(iy) * vel.v_hat[p]));
        }
    CHECK(div < 1e-10);
}

TEST_CASE("energy and enstrophy closed forms for psi = cos y") {
    Grid2 g(64, 64);
    std::vector<double> w(g.size());
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) w[g.idx(ix, iy)] = -std::cos(g.y(iy));
    const VorticityField2D f = field_from_physical(g, w);
    const double pi = std::numbers::pi;
    CHECK(enstrophy(f) == doctest::Approx(2 * pi * pi).epsilon(1e-12));
    CHECK(energy2d(f) == doctest::Approx(pi * pi).epsilon(1e-12));

    VorticityField2D zero(g);
    CHECK(energy2d(zero) == 0.0);
    CHECK(enstrophy(zero) == 0.0);
    CHECK(casimir_moment(zero, 4) == 0.0);
}

TEST_CASE("casimir_moment: p=1 vanishes by mean-zero; p out of range throws") {
    Grid2 g(32, 32);
    const VorticityField2D w = random_hermitian_field(g, 11);
    CHECK(std::abs(casimir_moment(w, 1)) < 1e-12);
    CHECK_THROWS_AS(casimir_moment(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(casimir_moment(w, 9), std::invalid_argument);
}

TEST_CASE("dealias: already-truncated field unchanged; cut modes zeroed") {
    Grid2 g(32, 32);
    VorticityField2D w = random_hermitian_field(g, 5);  // already dealiased
    const VorticityField2D again = dealias(w);
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(again.omega_hat[p] == w.omega_hat[p]);

    VorticityField2D full(g);
    for (auto& c : full.omega_hat) c = 1.0;
    const VorticityField2D cut = dealias(full);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const bool kept = 3 * std::abs(g.sx(ix)) <= g.nx && 3 * std::abs(g.sy(iy)) <= g.ny;
            CHECK(cut.omega_hat[g.idx(ix, iy)] == (kept ? cplx{1, 0} : cplx{0, 0}));
        }
}

TEST_CASE("hermitian symmetry held by construction helpers") {
    Grid2 g(32, 16 * 4);
    const VorticityField2D w = random_hermitian_field(g, 99);
    CHECK(hermitian_defect(g, w.omega_hat) < 1e-14);
    CHECK(std::abs(w.omega_hat[0]) == 0.0);
}

TEST_CASE("GFL1 snapshot encode/decode round trip") {
    gfl1::Snapshot s;
    s.nx = 4;
    s.ny = 8;
    s.ncomp = 2;
    s.data.resize(std::size_t(4) * 8 * 2);
    std::mt19937_64 rng(17);
    for (auto& d : s.data) d = (rng() >> 11) * 0x1.0p-53 - 0.5;
    const std::string buf = gfl1::encode(s);
    CHECK(buf.size() == 32 + 8 * s.data.size());
    CHECK(buf.substr(0, 4) == "GFL1");
    const gfl1::Snapshot t = gfl1::decode(buf);
    CHECK(t.nx == s.nx);
    CHECK(t.ny == s.ny);
    CHECK(t.ncomp == s.ncomp);
    for (std::size_t i = 0; i < s.data.size(); ++i) CHECK(t.data[i] == s.data[i]);

    const std::string path = "gfl1_roundtrip_test.bin";
    gfl1::write_file(path, s);
    const gfl1::Snapshot u = gfl1::read_file(path);
    CHECK(u.data == s.data);
    std::remove(path.c_str());
}

TEST_CASE("GFL1 decode rejects bad input") {
    CHECK_THROWS(gfl1::decode("not a snapshot"));
    gfl1::Snapshot s;
    s.nx = 2;
    s.ny = 2;
    s.ncomp = 1;
    s.data.assign(4, 0.0);
    std::string buf = gfl1::encode(s);
    buf.pop_back();
    CHECK_THROWS(gfl1::decode(buf));
}
