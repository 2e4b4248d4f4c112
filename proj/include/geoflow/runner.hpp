/// @file runner.hpp
/// @brief Experiment orchestration: schema registry, deterministic runners
///        per experiment, and the output manifest (every produced file with
///        its SHA-256). Exit codes: 0 success, 1 numeric failure (CFL,
///        collapse, non-convergence), 2 usage/config error.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "geoflow/config.hpp"
#include "geoflow/entropy.hpp"
#include "geoflow/euler2d.hpp"
#include "geoflow/filament.hpp"
#include "geoflow/gfl1.hpp"
#include "geoflow/madelung.hpp"
#include "geoflow/point_vortex.hpp"
#include "geoflow/sha256.hpp"
#include "geoflow/sticky.hpp"
#include "geoflow/topo3d.hpp"
#include "geoflow/zeitlin.hpp"

namespace geoflow::runner {

inline constexpr const char* version = "1.0.0";

/// fixed float formatting: shortest round-trippable representation
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// in-memory output set; files are written (and hashed) in insertion order
struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;

    void add(const std::string& name, std::string content) {
        files.emplace_back(name, std::move(content));
    }
};

class Csv {
  public:
    explicit Csv(const std::string& header) { buf_ = header + "\n"; }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) buf_ += ',';
            buf_ += fmt(values[i]);
        }
        buf_ += '\n';
    }
    void raw_row(const std::string& line) { buf_ += line + "\n"; }
    std::string str() const { return buf_; }

  private:
    std::string buf_;
};

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

using config::KeySpec;
using config::Schema;
using config::ValueType;

inline const std::map<std::string, Schema>& schema_registry() {
    using VT = ValueType;
    static const std::map<std::string, Schema> registry = [] {
        std::map<std::string, Schema> r;
        {
            Schema s{"euler2d.run", true, {}};
            s.keys = {{"euler2d.nx", {VT::integer, true, ""}},
                      {"euler2d.ny", {VT::integer, true, ""}},
                      {"euler2d.dt", {VT::real, true, ""}},
                      {"euler2d.t_end", {VT::real, true, ""}},
                      {"euler2d.nu_h", {VT::real, false, "0"}},
                      {"euler2d.hyper_order", {VT::integer, false, "4"}},
                      {"euler2d.output_every", {VT::integer, false, "10"}},
                      {"euler2d.snapshot_every", {VT::integer, false, "0"}},
                      {"euler2d.blob_threshold", {VT::real, false, "0.2"}},
                      {"euler2d.init", {VT::text, false, "random"}},
                      {"euler2d.kolmogorov_k", {VT::integer, false, "1"}},
                      {"euler2d.k0", {VT::real, false, "6"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"zeitlin.run", true, {}};
            s.keys = {{"zeitlin.n", {VT::integer, true, ""}},
                      {"zeitlin.dt", {VT::real, true, ""}},
                      {"zeitlin.steps", {VT::integer, true, ""}},
                      {"zeitlin.output_every", {VT::integer, false, "10"}},
                      {"zeitlin.snapshot_every", {VT::integer, false, "0"}},
                      {"zeitlin.laplacian", {VT::text, false, "diagonal"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"pv.run", true, {}};
            s.keys = {{"pv.geometry", {VT::text, true, ""}},
                      {"pv.n", {VT::integer, true, ""}},
                      {"pv.t_end", {VT::real, true, ""}},
                      {"pv.tol", {VT::real, false, "1e-10"}},
                      {"pv.dt_out", {VT::real, false, "0.01"}},
                      {"pv.section_coord", {VT::text, false, "none"}},
                      {"pv.section_vortex", {VT::integer, false, "0"}},
                      {"pv.section_value", {VT::real, false, "0"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"sticky.run", true, {}};
            s.keys = {{"sticky.n", {VT::integer, true, ""}},
                      {"sticky.t_end", {VT::real, false, "1"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"sticky.minimize", true, {}};
            s.keys = {{"sticky.n", {VT::integer, true, ""}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"sticky.continuum", true, {}};
            s.keys = {{"sticky.grid", {VT::integer, false, "256"}},
                      {"sticky.n", {VT::integer, true, ""}},
                      {"sticky.t_list", {VT::real_list, false, "0.25,0.5,1"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"madelung.verify", false, {}};
            s.keys = {{"madelung.nx", {VT::integer, false, "128"}},
                      {"madelung.t_end", {VT::real, false, "0.2"}},
                      {"madelung.levels", {VT::integer, false, "3"}},
                      {"madelung.dt0", {VT::real, false, "4e-4"}},
                      {"madelung.v_amp", {VT::real, false, "0.2"}},
                      {"madelung.rho_amp", {VT::real, false, "0.3"}},
                      {"madelung.theta_amp", {VT::real, false, "0.4"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"filament.run", false, {}};
            s.keys = {{"filament.shape", {VT::text, true, ""}},
                      {"filament.m", {VT::integer, false, "256"}},
                      {"filament.dt", {VT::real, false, "1e-4"}},
                      {"filament.steps", {VT::integer, false, "1000"}},
                      {"filament.output_every", {VT::integer, false, "100"}},
                      {"filament.radius", {VT::real, false, "1"}},
                      {"filament.helix_a", {VT::real, false, "1"}},
                      {"filament.helix_b", {VT::real, false, "0.25"}},
                      {"filament.input", {VT::text, false, ""}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"topo3d.helicity", false, {}};
            s.keys = {{"topo3d.input", {VT::text, true, ""}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"topo3d.beltrami", false, {}};
            s.keys = {{"topo3d.input", {VT::text, true, ""}},
                      {"topo3d.lambda", {VT::real, false, "1"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"topo3d.abc", false, {}};
            s.keys = {{"topo3d.n", {VT::integer, false, "32"}},
                      {"topo3d.A", {VT::real, false, "1"}},
                      {"topo3d.B", {VT::real, false, "1"}},
                      {"topo3d.C", {VT::real, false, "1"}}};
            r[s.experiment] = s;
        }
        {
            Schema s{"entropy.run", true, {}};
            s.keys = {{"entropy.nx", {VT::integer, false, "64"}},
                      {"entropy.members", {VT::integer, false, "32"}},
                      {"entropy.dt", {VT::real, false, "5e-3"}},
                      {"entropy.t_end", {VT::real, false, "1"}},
                      {"entropy.output_every", {VT::integer, false, "20"}},
                      {"entropy.nu_h", {VT::real, false, "0"}},
                      {"entropy.n_coords", {VT::integer, false, "8"}},
                      {"entropy.eps_list", {VT::real_list, false, "0.05"}},
                      {"entropy.frozen", {VT::boolean, false, "false"}}};
            r[s.experiment] = s;
        }
        return r;
    }();
    return registry;
}

inline const Schema* schema_for(const std::string& experiment) {
    const auto& reg = schema_registry();
    const auto it = reg.find(experiment);
    return it == reg.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Per-experiment runners (pure: config in, named outputs out)
// ---------------------------------------------------------------------------

namespace detail {

inline gfl1::Snapshot field_snapshot(const VorticityField2D& w) {
    gfl1::Snapshot s;
    s.nx = static_cast<std::uint32_t>(w.grid.nx);
    s.ny = static_cast<std::uint32_t>(w.grid.ny);
    s.ncomp = 1;
    s.data = to_physical(w);
    return s;
}

inline nlohmann::json run_metadata(const config::ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = cfg.experiment;
    j["seed"] = cfg.seed;
    j["config"] = config::serialize(cfg);
    j["version"] = version;
    return j;
}

}  // namespace detail

inline Outputs run_euler2d(const config::ExperimentConfig& cfg) {
    const Grid2 grid(static_cast<int>(cfg.get_int("euler2d.nx")),
                     static_cast<int>(cfg.get_int("euler2d.ny")));
    euler2d::EulerConfig ec;
    ec.grid = grid;
    ec.dt = cfg.get_real("euler2d.dt");
    ec.t_end = cfg.get_real("euler2d.t_end");
    ec.nu_h = cfg.get_real("euler2d.nu_h");
    ec.hyper_order = static_cast<int>(cfg.get_int("euler2d.hyper_order"));
    ec.output_every = static_cast<int>(cfg.get_int("euler2d.output_every"));
    ec.snapshot_every = static_cast<int>(cfg.get_int("euler2d.snapshot_every"));
    ec.blob_threshold = cfg.get_real("euler2d.blob_threshold");
    ec.seed = cfg.seed;

    const std::string init = cfg.get_text("euler2d.init");
    VorticityField2D w0;
    if (init == "random")
        w0 = euler2d::random_vorticity(grid, cfg.seed, cfg.get_real("euler2d.k0"));
    else if (init == "kolmogorov")
        w0 = euler2d::kolmogorov_flow(grid,
                                      static_cast<int>(cfg.get_int("euler2d.kolmogorov_k")));
    else
        throw std::invalid_argument("euler2d.init must be random or kolmogorov");

    const euler2d::RunResult res = euler2d::run(ec, w0);

    Outputs out;
    Csv csv("t,E,Omega,C3,C4,maxgrad,nblobs");
    for (const auto& r : res.series)
        csv.row({r.t, r.energy, r.enstrophy, r.casimir3, r.casimir4, r.max_grad,
                 double(r.nblobs)});
    out.add("diagnostics.csv", csv.str());
    int idx = 0;
    for (const auto& [t, w] : res.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%06d.gfl1", idx++);
        out.add(name, gfl1::encode(detail::field_snapshot(w)));
    }
    nlohmann::json meta = detail::run_metadata(cfg);
    meta["rows"] = res.series.size();
    meta["snapshots"] = res.snapshots.size();
    const auto fit = euler2d::steady_functional_fit(res.snapshots.empty()
                                                        ? w0
                                                        : res.snapshots.back().second);
    meta["steady_fit_residual"] = fit.degenerate ? -1.0 : fit.residual;
    meta["gradient_growth_rate"] = euler2d::gradient_growth(res.series).rate;
    out.add("run.json", meta.dump(2) + "\n");
    return out;
}

inline Outputs run_zeitlin(const config::ExperimentConfig& cfg) {
    if (cfg.get_text("zeitlin.laplacian") != "diagonal")
        throw std::invalid_argument(
            "zeitlin.laplacian: only 'diagonal' is implemented (the Hoppe-type Casimir "
            "Laplacian is recorded as a config option but not implemented)");
    const int N = static_cast<int>(cfg.get_int("zeitlin.n"));
    const double dt = cfg.get_real("zeitlin.dt");
    const long steps = cfg.get_int("zeitlin.steps");
    const int out_every = static_cast<int>(cfg.get_int("zeitlin.output_every"));
    const int snap_every = static_cast<int>(cfg.get_int("zeitlin.snapshot_every"));

    zeitlin::ZeitlinState st = zeitlin::random_state(N, cfg.seed);
    Outputs out;
    Csv csv("t,energy,tr2,tr3,tr4,tr5");
    auto report = [&](double t) {
        csv.row({t, zeitlin::quantized_energy(st.W, N), zeitlin::casimir_trace(st.W, 2),
                 zeitlin::casimir_trace(st.W, 3), zeitlin::casimir_trace(st.W, 4),
                 zeitlin::casimir_trace(st.W, 5)});
    };
    auto snapshot = [&](long s) {
        gfl1::Snapshot snap;
        snap.nx = snap.ny = static_cast<std::uint32_t>(N);
        snap.ncomp = 2;
        snap.data.resize(std::size_t(2) * N * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                snap.data[std::size_t(i) * N + j] = st.W(i, j).real();
                snap.data[std::size_t(N) * N + std::size_t(i) * N + j] = st.W(i, j).imag();
            }
        char name[64];
        std::snprintf(name, sizeof(name), "matrix_%06ld.gfl1", s);
        out.add(name, gfl1::encode(snap));
    };
    report(0.0);
    if (snap_every > 0) snapshot(0);
    for (long s = 1; s <= steps; ++s) {
        st = zeitlin::step_isospectral(st, dt);
        if (s % out_every == 0 || s == steps) report(s * dt);
        if (snap_every > 0 && (s % snap_every == 0 || s == steps)) snapshot(s);
    }
    out.add("diagnostics.csv", csv.str());
    out.add("run.json", detail::run_metadata(cfg).dump(2) + "\n");
    return out;
}

inline Outputs run_pv(const config::ExperimentConfig& cfg) {
    const std::string geo_name = cfg.get_text("pv.geometry");
    pv::Geometry geo;
    if (geo_name == "plane")
        geo = pv::Geometry::plane;
    else if (geo_name == "half_plane")
        geo = pv::Geometry::half_plane;
    else if (geo_name == "sphere")
        geo = pv::Geometry::sphere;
    else if (geo_name == "torus")
        geo = pv::Geometry::torus;
    else
        throw std::invalid_argument("pv.geometry must be plane|half_plane|sphere|torus");

    const int n = static_cast<int>(cfg.get_int("pv.n"));
    std::mt19937_64 rng(cfg.seed);
    auto u = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    pv::VortexSystem sys;
    sys.geometry = geo;
    for (int i = 0; i < n; ++i)
        sys.gamma.push_back(u(0.3, 1.5) * (i % 2 == 0 ? 1.0 : -1.0));
    if (geo == pv::Geometry::torus) {
        double s = 0;
        for (double g : sys.gamma) s += g;
        sys.gamma.back() -= s;
    }
    for (int i = 0; i < n; ++i) {
        while (true) {
            std::array<double, 3> p{0, 0, 0};
            if (geo == pv::Geometry::sphere) {
                const double z = u(-1, 1), phi = u(0, two_pi);
                const double r = std::sqrt(1 - z * z);
                p = {r * std::cos(phi), r * std::sin(phi), z};
            } else if (geo == pv::Geometry::torus) {
                p = {u(0, two_pi), u(0, two_pi), 0};
            } else if (geo == pv::Geometry::half_plane) {
                p = {u(-2, 2), u(0.5, 3.0), 0};
            } else {
                p = {u(-2, 2), u(-2, 2), 0};
            }
            bool ok = true;
            for (const auto& q : sys.pos)
                if (pv::detail::sep2(geo, p, q) < 0.25) ok = false;
            if (ok) {
                sys.pos.push_back(p);
                break;
            }
        }
    }

    const pv::Trajectory traj = integrate(sys, cfg.get_real("pv.t_end"),
                                          cfg.get_real("pv.tol"), cfg.get_real("pv.dt_out"));

    Outputs out;
    std::string header = "t";
    for (int i = 0; i < n; ++i)
        header += ",x" + std::to_string(i) + ",y" + std::to_string(i) + ",z" +
                  std::to_string(i);
    const pv::ConservedSet c0 = conserved(sys);
    for (const auto& [name, val] : c0.values) header += "," + name;
    Csv csv(header);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        pv::VortexSystem probe = sys;
        probe.pos = traj.pos[k];
        std::vector<double> row = {traj.t[k]};
        for (int i = 0; i < n; ++i)
            for (int ccc = 0; ccc < 3; ++ccc) row.push_back(traj.pos[k][i][ccc]);
        for (const auto& [name, val] : conserved(probe).values) row.push_back(val);
        csv.row(row);
    }
    out.add("trajectory.csv", csv.str());

    const std::string sec = cfg.get_text("pv.section_coord");
    if (sec == "x" || sec == "y" || sec == "z") {
        const int vtx = static_cast<int>(cfg.get_int("pv.section_vortex"));
        const double value = cfg.get_real("pv.section_value");
        const int coord = sec == "x" ? 0 : sec == "y" ? 1 : 2;
        pv::SectionSpec spec;
        spec.g = [vtx, coord, value](const std::vector<std::array<double, 3>>& p) {
            return p[vtx][coord] - value;
        };
        Csv pcsv(header);
        for (const auto& pt : poincare_section(traj, spec)) {
            pv::VortexSystem probe = sys;
            probe.pos = pt.pos;
            std::vector<double> row = {pt.t};
            for (int i = 0; i < n; ++i)
                for (int ccc = 0; ccc < 3; ++ccc) row.push_back(pt.pos[i][ccc]);
            for (const auto& [name, val] : conserved(probe).values) row.push_back(val);
            pcsv.row(row);
        }
        out.add("poincare.csv", pcsv.str());
    }
    out.add("run.json", detail::run_metadata(cfg).dump(2) + "\n");
    return out;
}

namespace detail {

inline sticky::StickySystem seeded_sticky(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto u = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    sticky::StickySystem s;
    double x = 0;
    for (int i = 0; i < n; ++i) {
        s.mass.push_back(u(0.5, 2.0));
        x += u(0.1, 0.6);
        s.pos.push_back(x);
        s.vel.push_back(u(-3.0, 3.0));
    }
    return s;
}

}  // namespace detail

inline Outputs run_sticky(const config::ExperimentConfig& cfg) {
    const int n = static_cast<int>(cfg.get_int("sticky.n"));
    const sticky::StickySystem s = detail::seeded_sticky(n, cfg.seed);
    const sticky::EventDrivenResult r = event_driven_run(s, cfg.get_real("sticky.t_end"));
    Outputs out;
    Csv csv("t,walls,composition,velocities");
    for (std::size_t k = 1; k < r.times.size(); ++k) {
        std::string walls, comp, vels;
        for (int w : r.history.events[k - 1].walls)
            walls += (walls.empty() ? "" : "|") + std::to_string(w);
        for (const auto& c : r.states[k]) {
            comp += (comp.empty() ? "" : ";") + std::to_string(c.lo) + "-" +
                    std::to_string(c.hi);
            vels += (vels.empty() ? "" : ";") + fmt(c.vel);
        }
        csv.raw_row(fmt(r.times[k]) + "," + walls + "," + comp + "," + vels);
    }
    out.add("events.csv", csv.str());
    nlohmann::json meta = detail::run_metadata(cfg);
    meta["events"] = r.history.events.size();
    meta["final_clusters"] = r.states.back().size();
    out.add("run.json", meta.dump(2) + "\n");
    return out;
}

inline Outputs run_sticky_minimize(const config::ExperimentConfig& cfg) {
    const int n = static_cast<int>(cfg.get_int("sticky.n"));
    if (n > 5) throw std::invalid_argument("sticky.minimize: n <= 5");
    const sticky::StickySystem s = detail::seeded_sticky(n, cfg.seed);
    const sticky::EventDrivenResult r = event_driven_run(s, 1.0);
    const sticky::ZPoint z1 = extended_endpoint(r, 1.0);
    sticky::ZPoint z0{s.pos, std::vector<double>(n, 0.0)};
    const sticky::MinimizeResult m = variational_minimize(s.mass, z0, z1);
    Outputs out;
    std::string header = "t";
    for (int i = 0; i < n; ++i) header += ",oracle_x" + std::to_string(i);
    for (int i = 0; i < n; ++i) header += ",variational_x" + std::to_string(i);
    Csv csv(header);
    double sup = 0;
    for (int k = 0; k <= 40; ++k) {
        const double t = k / 40.0;
        const auto xo = r.positions_at(t);
        const auto xv = m.path.project_at(t);
        std::vector<double> row = {t};
        for (double v : xo) row.push_back(v);
        for (double v : xv) row.push_back(v);
        csv.row(row);
        for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(xo[i] - xv[i]));
    }
    out.add("paths.csv", csv.str());
    nlohmann::json meta = detail::run_metadata(cfg);
    meta["action"] = m.path.action;
    meta["sup_position_error"] = sup;
    meta["events"] = m.history.events.size();
    out.add("run.json", meta.dump(2) + "\n");
    return out;
}

inline Outputs run_sticky_continuum(const config::ExperimentConfig& cfg) {
    const int S = static_cast<int>(cfg.get_int("sticky.grid"));
    const int n = static_cast<int>(cfg.get_int("sticky.n"));
    if (S < 64) throw std::invalid_argument("sticky.grid >= 64");
    // integer-cell masses so the particle embedding is exact
    std::mt19937_64 rng(cfg.seed);
    auto u = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    std::vector<int> cells(n, 1);
    int used = n;
    for (int i = 0; i < n; ++i) {
        const int extra = static_cast<int>(u(0, (S - used) / std::max(1, n - i)));
        cells[i] += extra;
        used += extra;
    }
    cells[n - 1] += S - used;
    sticky::StickySystem sys;
    double x = 0;
    for (int i = 0; i < n; ++i) {
        sys.mass.push_back(double(cells[i]) / S);
        x += u(0.1, 0.6);
        sys.pos.push_back(x);
        sys.vel.push_back(u(-3.0, 3.0));
    }
    sticky::MonotoneProfile f0;
    std::vector<double> v0;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < cells[i]; ++c) {
            f0.f.push_back(sys.pos[i]);
            v0.push_back(sys.vel[i]);
        }
    const sticky::EventDrivenResult oracle = event_driven_run(sys, 2.0);
    Outputs out;
    Csv csv("t,sup_error");
    int idx = 0;
    for (double t : cfg.get_real_list("sticky.t_list")) {
        const sticky::MonotoneProfile ft = continuum_evolve(f0, v0, t);
        const auto xo = oracle.positions_at(t);
        double sup = 0;
        std::size_t cell = 0;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < cells[i]; ++c, ++cell)
                sup = std::max(sup, std::abs(ft.f[cell] - xo[i]));
        csv.row({t, sup});
        gfl1::Snapshot snap;
        snap.nx = static_cast<std::uint32_t>(S);
        snap.ny = 1;
        snap.ncomp = 1;
        snap.data = ft.f;
        char name[64];
        std::snprintf(name, sizeof(name), "profile_%03d.gfl1", idx++);
        out.add(name, gfl1::encode(snap));
    }
    out.add("comparison.csv", csv.str());
    out.add("run.json", detail::run_metadata(cfg).dump(2) + "\n");
    return out;
}

inline Outputs run_madelung(const config::ExperimentConfig& cfg) {
    const int nx = static_cast<int>(cfg.get_int("madelung.nx"));
    const double t_end = cfg.get_real("madelung.t_end");
    const int levels = static_cast<int>(cfg.get_int("madelung.levels"));
    const double dt0 = cfg.get_real("madelung.dt0");

    madelung::NlsModel model;
    model.potential.resize(nx);
    for (int j = 0; j < nx; ++j)
        model.potential[j] = cfg.get_real("madelung.v_amp") * std::cos(two_pi * j / nx);
    model.f_coeff = {0.0, 1.0};
    madelung::MadelungPair p0;
    p0.rho.resize(nx);
    p0.theta.resize(nx);
    for (int j = 0; j < nx; ++j) {
        const double x = two_pi * j / nx;
        p0.rho[j] = 1.0 + cfg.get_real("madelung.rho_amp") * std::cos(x);
        p0.theta[j] = cfg.get_real("madelung.theta_amp") * std::sin(x);
    }

    Outputs out;
    Csv csv("level,dt,continuity_residual,momentum_residual");
    std::vector<double> cont, mom;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const double dt = dt0 / (1 << lvl);
        madelung::WaveFunction1D w = madelung_forward(p0);
        const long nsteps = std::lround(t_end / dt);
        madelung::MadelungPair prev, mid;
        for (long s = 1; s <= nsteps + 1; ++s) {
            nls_step(w, model, dt);
            if (s == nsteps - 1) prev = madelung_inverse(w);
            if (s == nsteps) mid = madelung_inverse(w);
        }
        const madelung::MadelungPair next = madelung_inverse(w);
        const madelung::BarotropicResiduals r =
            barotropic_residual(prev, mid, next, model, dt);
        cont.push_back(r.continuity);
        mom.push_back(r.momentum);
        csv.row({double(lvl), dt, r.continuity, r.momentum});
    }
    out.add("residuals.csv", csv.str());
    nlohmann::json meta = detail::run_metadata(cfg);
    if (levels >= 2) {
        meta["continuity_order"] =
            std::log2(cont[levels - 2] / cont[levels - 1]);
        meta["momentum_order"] = std::log2(mom[levels - 2] / mom[levels - 1]);
    }
    out.add("run.json", meta.dump(2) + "\n");
    return out;
}

inline Outputs run_filament(const config::ExperimentConfig& cfg) {
    const std::string shape = cfg.get_text("filament.shape");
    const int m = static_cast<int>(cfg.get_int("filament.m"));
    filament::Filament f;
    if (shape == "circle")
        f = filament::circle(cfg.get_real("filament.radius"), m);
    else if (shape == "helix")
        f = filament::helix(cfg.get_real("filament.helix_a"),
                            cfg.get_real("filament.helix_b"), m);
    else if (shape == "file") {
        const gfl1::Snapshot s = gfl1::read_file(cfg.get_text("filament.input"));
        if (s.ncomp != 3 || s.ny != 1)
            throw std::invalid_argument("filament input must be an (m x 1 x 3) GFL1 file");
        f.pts.resize(s.nx);
        for (std::uint32_t j = 0; j < s.nx; ++j)
            f.pts[j] = {s.data[j], s.data[s.nx + j], s.data[2 * s.nx + j]};
    } else {
        throw std::invalid_argument("filament.shape must be circle|helix|file");
    }

    const double dt = cfg.get_real("filament.dt");
    const long steps = cfg.get_int("filament.steps");
    const int out_every = static_cast<int>(cfg.get_int("filament.output_every"));

    Outputs out;
    Csv geom("t,vertex,x,y,z");
    Csv diag("t,length,impulse_x,impulse_y,impulse_z");
    auto report = [&](double t) {
        for (int j = 0; j < f.size(); ++j)
            geom.row({t, double(j), f.pts[j][0], f.pts[j][1], f.pts[j][2]});
        const bool closed = f.closed();
        const filament::Vec3 imp =
            closed ? impulse(f) : filament::Vec3{std::nan(""), std::nan(""), std::nan("")};
        diag.row({t, length(f), imp[0], imp[1], imp[2]});
    };
    report(0.0);
    for (long s = 1; s <= steps; ++s) {
        f = step_rk4(f, dt);
        if (s % out_every == 0 || s == steps) report(s * dt);
    }
    out.add("geometry.csv", geom.str());
    out.add("diagnostics.csv", diag.str());
    out.add("run.json", detail::run_metadata(cfg).dump(2) + "\n");
    return out;
}

namespace detail {

inline VelocityField3D load_field3(const std::string& path) {
    const gfl1::Snapshot s = gfl1::read_file(path);
    const std::uint32_t n = s.nx;
    if (s.ncomp != 3 || s.ny != n * n)
        throw std::invalid_argument("expected a 3D velocity GFL1 file (nx=n, ny=n^2, ncomp=3)");
    VelocityField3D f(static_cast<int>(n));
    const std::size_t plane = std::size_t(n) * n * n;
    for (std::size_t i = 0; i < plane; ++i) {
        f.u[i] = s.data[i];
        f.v[i] = s.data[plane + i];
        f.w[i] = s.data[2 * plane + i];
    }
    return f;
}

}  // namespace detail

inline Outputs run_topo3d(const config::ExperimentConfig& cfg) {
    Outputs out;
    nlohmann::json j = detail::run_metadata(cfg);
    if (cfg.experiment == "topo3d.abc") {
        const int n = static_cast<int>(cfg.get_int("topo3d.n"));
        const VelocityField3D f =
            topo3d::abc_field(n, cfg.get_real("topo3d.A"), cfg.get_real("topo3d.B"),
                              cfg.get_real("topo3d.C"));
        gfl1::Snapshot s;
        s.nx = static_cast<std::uint32_t>(n);
        s.ny = static_cast<std::uint32_t>(n) * n;
        s.ncomp = 3;
        s.data.reserve(3 * f.size());
        s.data.insert(s.data.end(), f.u.begin(), f.u.end());
        s.data.insert(s.data.end(), f.v.begin(), f.v.end());
        s.data.insert(s.data.end(), f.w.begin(), f.w.end());
        out.add("abc.gfl1", gfl1::encode(s));
        j["energy"] = topo3d::energy3d(f);
    } else {
        const VelocityField3D f = detail::load_field3(cfg.get_text("topo3d.input"));
        j["energy"] = topo3d::energy3d(f);
        if (cfg.experiment == "topo3d.helicity") {
            j["helicity"] = topo3d::helicity(f);
        } else {
            j["lambda"] = cfg.get_real("topo3d.lambda");
            j["beltrami_residual"] = topo3d::beltrami_residual(f, cfg.get_real("topo3d.lambda"));
        }
    }
    out.add("result.json", j.dump(2) + "\n");
    return out;
}

inline Outputs run_entropy(const config::ExperimentConfig& cfg) {
    entropy::DecreaseConfig dc;
    const int nx = static_cast<int>(cfg.get_int("entropy.nx"));
    dc.grid = Grid2(nx, nx);
    dc.members = static_cast<int>(cfg.get_int("entropy.members"));
    dc.seed = cfg.seed;
    dc.dt = cfg.get_real("entropy.dt");
    dc.t_end = cfg.get_real("entropy.t_end");
    dc.output_every = static_cast<int>(cfg.get_int("entropy.output_every"));
    dc.nu_h = cfg.get_real("entropy.nu_h");
    dc.n_coords = static_cast<int>(cfg.get_int("entropy.n_coords"));
    dc.eps_list = cfg.get_real_list("entropy.eps_list");
    dc.frozen = cfg.get_bool("entropy.frozen");

    const auto series = entropy::entropy_decrease_experiment(dc);
    Outputs out;
    std::string header = "t";
    for (double eps : dc.eps_list) header += ",H_eps_" + fmt(eps);
    Csv csv(header);
    for (const auto& row : series) {
        std::vector<double> r = {row.t};
        for (double h : row.h) r.push_back(h);
        csv.row(r);
    }
    out.add("entropy.csv", csv.str());
    out.add("run.json", detail::run_metadata(cfg).dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

inline Outputs produce_outputs(const config::ExperimentConfig& cfg) {
    if (cfg.experiment == "euler2d.run") return run_euler2d(cfg);
    if (cfg.experiment == "zeitlin.run") return run_zeitlin(cfg);
    if (cfg.experiment == "pv.run") return run_pv(cfg);
    if (cfg.experiment == "sticky.run") return run_sticky(cfg);
    if (cfg.experiment == "sticky.minimize") return run_sticky_minimize(cfg);
    if (cfg.experiment == "sticky.continuum") return run_sticky_continuum(cfg);
    if (cfg.experiment == "madelung.verify") return run_madelung(cfg);
    if (cfg.experiment == "filament.run") return run_filament(cfg);
    if (cfg.experiment.rfind("topo3d.", 0) == 0) return run_topo3d(cfg);
    if (cfg.experiment == "entropy.run") return run_entropy(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

struct RunStatus {
    int exit_code = 0;
    std::string message;
    nlohmann::json manifest;
};

/// Produce outputs, write them under cfg.out_dir, and emit manifest.json
/// listing every file with its SHA-256. Identical config and seed give
/// bit-identical outputs on the same build.
inline RunStatus run_experiment(const config::ExperimentConfig& cfg) {
    RunStatus status;
    Outputs outputs;
    try {
        outputs = produce_outputs(cfg);
    } catch (const euler2d::CflViolation& e) {
        status.exit_code = 1;
        status.message = e.what();
        return status;
    } catch (const pv::CollapseCandidate& e) {
        status.exit_code = 1;
        status.message = e.what();
        return status;
    } catch (const std::invalid_argument& e) {
        status.exit_code = 2;
        status.message = e.what();
        return status;
    } catch (const std::exception& e) {
        status.exit_code = 1;
        status.message = e.what();
        return status;
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    nlohmann::json manifest;
    manifest["experiment"] = cfg.experiment;
    manifest["seed"] = cfg.seed;
    manifest["version"] = version;
    manifest["files"] = nlohmann::json::array();
    for (const auto& [name, content] : outputs.files) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) {
            status.exit_code = 2;
            status.message = "cannot write " + path.string();
            return status;
        }
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        manifest["files"].push_back(
            {{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    std::ofstream ms(fs::path(cfg.out_dir) / "manifest.json");
    ms << manifest.dump(2) << "\n";
    status.manifest = manifest;
    return status;
}

}  // namespace geoflow::runner
