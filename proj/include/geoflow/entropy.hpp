/// @file entropy.hpp
/// @brief epsilon-entropy estimators for point sets and weighted ensembles:
///        finite-set entropy H = -sum w log2 w, covering/packing bounds for
///        the Kolmogorov epsilon-entropy, occupied-cube counts, the measure
///        variant H_{eps,n}, the (eps, delta) variant, and the 2D-Euler
///        ensemble experiment feeding them.
///
/// Exact minimal covering is NP-hard; eps_entropy_set reports a greedy cover
/// (upper bound) sandwiched against a maximal 2*eps-separated packing (lower
/// bound: a radius-eps ball cannot hold two such points, so packing <= cover).
/// H_{eps,n} is implemented sign-corrected (nonnegative); the printed form of
/// the source formula is available behind a flag.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "geoflow/euler2d.hpp"

namespace geoflow::entropy {

struct WeightedEnsemble {
    std::vector<std::vector<double>> points;  // vectors in R^n, n <= 64
    std::vector<double> weights;              // >= 0, sum to 1

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

namespace detail {

/// compensated (Kahan) sum, so the 1e-12 normalization check is meaningful
/// for large ensembles
inline double kahan_sum(const std::vector<double>& v) {
    double s = 0, c = 0;
    for (double x : v) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace detail

inline void validate(const WeightedEnsemble& e) {
    if (e.points.size() != e.weights.size() || e.points.empty())
        throw std::invalid_argument("WeightedEnsemble: inconsistent or empty");
    if (e.dim() > 64) throw std::invalid_argument("WeightedEnsemble: dimension must be <= 64");
    for (double w : e.weights)
        if (w < 0) throw std::invalid_argument("WeightedEnsemble: negative weight");
    if (std::abs(detail::kahan_sum(e.weights) - 1.0) > 1e-12)
        throw std::invalid_argument("WeightedEnsemble: weights must sum to 1");
    for (const auto& p : e.points)
        if (p.size() != e.dim()) throw std::invalid_argument("WeightedEnsemble: ragged points");
}

/// H(S) = -sum w_i log2 w_i, with 0 log2 0 := 0
inline double finite_entropy(const std::vector<double>& weights) {
    double h = 0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("finite_entropy: negative weight");
        if (w > 0) h -= w * std::log2(w);
    }
    if (std::abs(detail::kahan_sum(weights) - 1.0) > 1e-12)
        throw std::invalid_argument("finite_entropy: weights must sum to 1");
    return h;
}

namespace detail {

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace detail

struct CoverBounds {
    int covering = 0;  ///< greedy eps-ball cover size (upper bound for N_eps)
    int packing = 0;   ///< maximal 2*eps-separated subset size (lower bound)
    double h_upper() const { return std::log2(static_cast<double>(covering)); }
    double h_lower() const { return std::log2(static_cast<double>(packing)); }
};

/// greedy covering and 2*eps-separated packing in fixed input order
inline CoverBounds eps_entropy_set(const std::vector<std::vector<double>>& points, double eps) {
    if (points.empty()) throw std::invalid_argument("eps_entropy_set: empty set");
    if (!(eps > 0)) throw std::invalid_argument("eps_entropy_set: eps must be positive");
    CoverBounds out;
    std::vector<char> covered(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (covered[i]) continue;
        ++out.covering;
        for (std::size_t j = i; j < points.size(); ++j)
            if (!covered[j] && detail::dist2(points[i], points[j]) <= eps * eps) covered[j] = 1;
    }
    std::vector<std::size_t> pack;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool far = true;
        for (std::size_t p : pack)
            if (detail::dist2(points[i], points[p]) <= 4.0 * eps * eps) far = false;
        if (far) pack.push_back(i);
    }
    out.packing = static_cast<int>(pack.size());
    return out;
}

namespace detail {

using CubeKey = std::vector<long long>;

inline CubeKey cube_of(const std::vector<double>& p, int n, double eps) {
    CubeKey k(n);
    for (int c = 0; c < n; ++c) k[c] = static_cast<long long>(std::floor(p[c] / eps));
    return k;
}

}  // namespace detail

/// log2 of the number of occupied eps-cubes of the projection onto the first
/// n coordinates
inline double cube_entropy(const std::vector<std::vector<double>>& points, int n, double eps) {
    if (points.empty()) throw std::invalid_argument("cube_entropy: empty set");
    if (n < 1 || n > static_cast<int>(points[0].size()))
        throw std::invalid_argument("cube_entropy: n out of range");
    std::map<detail::CubeKey, int> cubes;
    for (const auto& p : points) ++cubes[detail::cube_of(p, n, eps)];
    return std::log2(static_cast<double>(cubes.size()));
}

/// the sup-over-n variant, evaluated on a user-supplied list of n values
inline double cube_entropy_sup(const std::vector<std::vector<double>>& points,
                               const std::vector<int>& n_list, double eps) {
    double best = 0;
    for (int n : n_list) best = std::max(best, cube_entropy(points, n, eps));
    return best;
}

struct MeasureEntropy {
    double value = 0.0;
    bool sparse_warning = false;  ///< > 50% of occupied cells hold < 5 samples
};

/// H_{eps,n}(mu) over eps-cubes of the first-n-coordinate projection.
/// sign_corrected=true returns the nonnegative -sum mu log2 mu; false returns
/// the printed-form sign (its negative).
inline MeasureEntropy measure_entropy(const WeightedEnsemble& e, int n, double eps,
                                      bool sign_corrected = true) {
    validate(e);
    if (n < 1 || n > static_cast<int>(e.dim()))
        throw std::invalid_argument("measure_entropy: n out of range");
    std::map<detail::CubeKey, std::pair<double, int>> cubes;  // mass, samples
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto& cell = cubes[detail::cube_of(e.points[i], n, eps)];
        cell.first += e.weights[i];
        cell.second += 1;
    }
    double h = 0;
    int sparse = 0;
    for (const auto& [key, cell] : cubes) {
        if (cell.first > 0) h -= cell.first * std::log2(cell.first);
        if (cell.second < 5) ++sparse;
    }
    MeasureEntropy out;
    out.value = sign_corrected ? h : -h;
    out.sparse_warning = 2 * sparse > static_cast<int>(cubes.size());
    return out;
}

/// H_{eps,delta}: greedily discard the lightest eps-cubes while the discarded
/// mass stays <= delta, then greedily cover the surviving points
inline double eps_delta_entropy(const WeightedEnsemble& e, double eps, double delta) {
    validate(e);
    if (delta < 0 || delta >= 1) throw std::invalid_argument("eps_delta_entropy: delta in [0,1)");
    const int n = static_cast<int>(e.dim());
    std::map<detail::CubeKey, double> mass;
    for (std::size_t i = 0; i < e.size(); ++i)
        mass[detail::cube_of(e.points[i], n, eps)] += e.weights[i];
    std::vector<std::pair<double, detail::CubeKey>> order;
    for (const auto& [key, m] : mass) order.push_back({m, key});
    std::sort(order.begin(), order.end());
    std::map<detail::CubeKey, bool> discarded;
    double dropped = 0;
    for (const auto& [m, key] : order) {
        if (dropped + m > delta) break;
        dropped += m;
        discarded[key] = true;
    }
    std::vector<std::vector<double>> kept;
    for (std::size_t i = 0; i < e.size(); ++i)
        if (!discarded.count(detail::cube_of(e.points[i], n, eps))) kept.push_back(e.points[i]);
    if (kept.empty()) return 0.0;
    return std::log2(static_cast<double>(eps_entropy_set(kept, eps).covering));
}

// ---------------------------------------------------------------------------
// Entropy-decrease experiment for 2D Euler ensembles
// ---------------------------------------------------------------------------

struct DecreaseConfig {
    Grid2 grid{64, 64};
    int members = 32;            // K
    std::uint64_t seed = 1;      // member k uses seed + k
    double dt = 5e-3;
    double t_end = 1.0;
    int output_every = 20;       // steps between entropy evaluations
    double nu_h = 0.0;
    int n_coords = 8;            // embedding dimension (<= 64)
    std::vector<double> eps_list{0.05};
    bool frozen = false;         // skip the dynamics entirely (identity map)
};

/// first n real coordinates of the velocity field from a fixed mode ordering
/// (modes sorted by |k|^2 then lexicographically; Re/Im of u_hat, v_hat)
inline std::vector<double> embed_velocity(const VorticityField2D& w, int n_coords) {
    const Grid2& g = w.grid;
    const SpectralVelocity2 vel = velocity_from_vorticity(w);
    std::vector<std::array<int, 3>> modes;  // |k|^2, sx, sy
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const int sx = g.sx(ix), sy = g.sy(iy);
            if (sx == 0 && sy == 0) continue;
            if (!mode_kept(g, ix, iy)) continue;
            modes.push_back({sx * sx + sy * sy, sx, sy});
        }
    std::sort(modes.begin(), modes.end());
    std::vector<double> out;
    out.reserve(n_coords);
    for (const auto& m : modes) {
        const std::size_t p = g.idx((m[1] + g.nx) % g.nx, (m[2] + g.ny) % g.ny);
        for (double v : {vel.u_hat[p].real(), vel.u_hat[p].imag(), vel.v_hat[p].real(),
                         vel.v_hat[p].imag()}) {
            out.push_back(v);
            if (static_cast<int>(out.size()) == n_coords) return out;
        }
    }
    return out;
}

struct DecreaseRow {
    double t;
    std::vector<double> h;  // one H_{eps,n} per eps in eps_list
};

/// Evolve an ensemble of seeded fields and report H_{eps,n}(mu_t) time series.
/// Purely observational: no decrease is asserted.
inline std::vector<DecreaseRow> entropy_decrease_experiment(const DecreaseConfig& cfg) {
    if (cfg.members < 2) throw std::invalid_argument("entropy experiment: need >= 2 members");
    if (cfg.n_coords < 1 || cfg.n_coords > 64)
        throw std::invalid_argument("entropy experiment: n_coords in 1..64");
    std::vector<VorticityField2D> fields;
    for (int k = 0; k < cfg.members; ++k)
        fields.push_back(euler2d::random_vorticity(cfg.grid, cfg.seed + k));

    euler2d::Workspace ws(cfg.grid);
    const std::size_t sz = cfg.grid.size();
    std::vector<cplx> k1(sz), k2(sz), k3(sz), k4(sz), stage(sz);
    const auto e_half =
        euler2d::detail::viscous_factor(cfg.grid, cfg.nu_h, 4, 0.5 * cfg.dt);
    const auto e_full = euler2d::detail::viscous_factor(cfg.grid, cfg.nu_h, 4, cfg.dt);

    auto snapshot_entropy = [&](double t) {
        WeightedEnsemble ens;
        ens.weights.assign(cfg.members, 1.0 / cfg.members);
        for (const auto& f : fields) ens.points.push_back(embed_velocity(f, cfg.n_coords));
        DecreaseRow row;
        row.t = t;
        for (double eps : cfg.eps_list)
            row.h.push_back(measure_entropy(ens, cfg.n_coords, eps).value);
        return row;
    };

    std::vector<DecreaseRow> series;
    series.push_back(snapshot_entropy(0.0));
    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    for (long s = 1; s <= nsteps; ++s) {
        if (!cfg.frozen)
            for (auto& f : fields)
                euler2d::detail::lawson_rk4_step(f.omega_hat, cfg.grid, cfg.dt, cfg.nu_h, 4, ws,
                                                 k1, k2, k3, k4, stage, e_half, e_full);
        if (s % cfg.output_every == 0 || s == nsteps)
            series.push_back(snapshot_entropy(s * cfg.dt));
    }
    return series;
}

}  // namespace geoflow::entropy
