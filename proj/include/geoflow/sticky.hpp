/// @file sticky.hpp
/// @brief One-dimensional sticking-particle dynamics.
///
/// Four cooperating pieces:
///  - an event-driven simulator (free flight + momentum-conserving merges),
///    the oracle everything else is tested against;
///  - the variational principle on the extended stratified configuration
///    space: states z = (x, y) with hidden per-cluster coordinates y carrying
///    the kinetic energy lost in merges. All inner products are mass-weighted
///    (sum m_i a_i b_i), which reduces to the unweighted construction for
///    equal masses and makes the momentum-conserving merge an orthogonal
///    projection;
///  - the continuum limit: a monotone profile evolved by metric projection of
///    free flight onto the nondecreasing cone (pool-adjacent-violators);
///  - the circle law: the shock velocity as the center of the smallest
///    enclosing ball of the colliding velocities.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace geoflow::sticky {

// ---------------------------------------------------------------------------
// Event-driven oracle
// ---------------------------------------------------------------------------

struct StickySystem {
    std::vector<double> mass;
    std::vector<double> pos;  // nondecreasing
    std::vector<double> vel;

    std::size_t size() const { return mass.size(); }
};

inline void validate(const StickySystem& s) {
    if (s.mass.size() != s.pos.size() || s.mass.size() != s.vel.size() || s.mass.empty())
        throw std::invalid_argument("StickySystem: inconsistent or empty arrays");
    for (double m : s.mass)
        if (!(m > 0)) throw std::invalid_argument("StickySystem: masses must be positive");
    for (std::size_t i = 1; i < s.pos.size(); ++i)
        if (s.pos[i] < s.pos[i - 1] - 1e-14)
            throw std::invalid_argument("StickySystem: positions must be nondecreasing");
}

struct Cluster {
    double mass, pos, vel;
    int lo, hi;  // inclusive range of original particle indices
};

struct CollisionEvent {
    double t;
    std::vector<int> walls;  // interior walls (between particles w and w+1) destroyed
};

struct CollisionHistory {
    std::vector<CollisionEvent> events;
};

struct EventDrivenResult {
    std::vector<double> times;                 // times[0] = 0, then event times
    std::vector<std::vector<Cluster>> states;  // cluster state from times[k] onward
    CollisionHistory history;

    const std::vector<Cluster>& state_before(double t) const {
        std::size_t k = 0;
        while (k + 1 < times.size() && times[k + 1] <= t) ++k;
        return states[k];
    }

    std::vector<double> positions_at(double t) const {
        const auto* cl = &states[0];
        std::size_t k = 0;
        while (k + 1 < times.size() && times[k + 1] <= t + 1e-15) ++k;
        cl = &states[k];
        std::vector<double> x;
        for (const auto& c : *cl)
            for (int i = c.lo; i <= c.hi; ++i) x.push_back(c.pos + (t - times[k]) * c.vel);
        return x;
    }

    std::vector<double> velocities_at(double t) const {
        std::size_t k = 0;
        while (k + 1 < times.size() && times[k + 1] <= t + 1e-15) ++k;
        std::vector<double> v;
        for (const auto& c : states[k])
            for (int i = c.lo; i <= c.hi; ++i) v.push_back(c.vel);
        return v;
    }

    double kinetic_energy_after(std::size_t k) const {
        double e = 0;
        for (const auto& c : states[k]) e += 0.5 * c.mass * c.vel * c.vel;
        return e;
    }

    double momentum_after(std::size_t k) const {
        double p = 0;
        for (const auto& c : states[k]) p += c.mass * c.vel;
        return p;
    }
};

/// Free linear motion between events; at a collision the full contact set
/// merges into one cluster with summed mass and momentum-conserving velocity.
/// Simultaneous multi-collisions merge whole contact chains in one event.
inline EventDrivenResult event_driven_run(const StickySystem& sys, double t_end) {
    validate(sys);
    const int n = static_cast<int>(sys.size());
    std::vector<Cluster> cl(n);
    for (int i = 0; i < n; ++i) cl[i] = {sys.mass[i], sys.pos[i], sys.vel[i], i, i};

    EventDrivenResult out;
    double t = 0.0;

    auto contact_merge = [&](double tev) {
        // repeatedly merge touching, non-separating adjacent clusters
        std::vector<int> walls;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i + 1 < cl.size(); ++i) {
                const double gap = cl[i + 1].pos - cl[i].pos;
                const double scale = 1.0 + std::abs(cl[i].pos);
                if (gap <= 1e-12 * scale && cl[i].vel > cl[i + 1].vel + 1e-14) {
                    walls.push_back(cl[i].hi);
                    Cluster m;
                    m.mass = cl[i].mass + cl[i + 1].mass;
                    m.vel = (cl[i].mass * cl[i].vel + cl[i + 1].mass * cl[i + 1].vel) / m.mass;
                    m.pos = cl[i].pos;
                    m.lo = cl[i].lo;
                    m.hi = cl[i + 1].hi;
                    cl[i] = m;
                    cl.erase(cl.begin() + i + 1);
                    changed = true;
                    break;
                }
            }
        }
        if (!walls.empty()) {
            std::sort(walls.begin(), walls.end());
            out.history.events.push_back({tev, walls});
            out.times.push_back(tev);
            out.states.push_back(cl);
        }
    };

    out.times.push_back(0.0);
    out.states.push_back(cl);
    contact_merge(0.0);  // touching initial data may merge immediately

    while (true) {
        double t_next = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cl.size(); ++i) {
            const double dv = cl[i].vel - cl[i + 1].vel;
            if (dv <= 0) continue;
            const double dt = (cl[i + 1].pos - cl[i].pos) / dv;
            t_next = std::min(t_next, t + dt);
        }
        if (t_next > t_end) break;
        for (auto& c : cl) c.pos += (t_next - t) * c.vel;
        t = t_next;
        contact_merge(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stratified variational principle
// ---------------------------------------------------------------------------

/// extended point z = (x, y)
struct ZPoint {
    std::vector<double> x, y;
};

/// Hidden-coordinate endpoint of an event-driven run: after each merge the
/// orthogonal components grow linearly at the pre-merge relative velocities,
/// so |zdot|^2 is continuous and the lost visible kinetic energy is carried by
/// y exactly.
inline ZPoint extended_endpoint(const EventDrivenResult& run, double t) {
    const std::size_t nparticles = [&] {
        std::size_t n = 0;
        for (const auto& c : run.states[0]) n += c.hi - c.lo + 1;
        return n;
    }();
    ZPoint z;
    z.x = run.positions_at(t);
    z.y.assign(nparticles, 0.0);
    for (std::size_t k = 1; k < run.times.size(); ++k) {
        if (run.times[k] > t + 1e-15) break;
        const double dt = t - run.times[k];
        // clusters created at event k: groups of states[k-1] clusters
        for (const auto& c : run.states[k]) {
            bool existed = false;
            for (const auto& p : run.states[k - 1])
                if (p.lo == c.lo && p.hi == c.hi) existed = true;
            if (existed) continue;
            for (const auto& p : run.states[k - 1])
                if (p.lo >= c.lo && p.hi <= c.hi)
                    for (int i = p.lo; i <= p.hi; ++i) z.y[i] += dt * (p.vel - c.vel);
        }
    }
    return z;
}

/// partition of 0..n-1 into consecutive clusters, encoded by surviving walls
struct Partition {
    int n = 0;
    std::vector<bool> wall;  // wall[i]: particles i and i+1 in different clusters

    static Partition finest(int n) {
        Partition p;
        p.n = n;
        p.wall.assign(std::max(0, n - 1), true);
        return p;
    }

    std::vector<std::pair<int, int>> clusters() const {
        std::vector<std::pair<int, int>> cs;
        int lo = 0;
        for (int i = 0; i < n - 1; ++i)
            if (wall[i]) {
                cs.push_back({lo, i});
                lo = i + 1;
            }
        cs.push_back({lo, n - 1});
        return cs;
    }
};

struct ActionResult {
    bool feasible = false;
    double action = std::numeric_limits<double>::infinity();
    std::vector<double> node_times;   // 0, t_1..t_q, 1
    std::vector<ZPoint> node_points;  // same length as node_times

    /// projected (visible) particle positions at time t, by linear interpolation
    std::vector<double> project_at(double t) const {
        std::size_t s = 0;
        while (s + 2 < node_times.size() && node_times[s + 1] <= t) ++s;
        const double t0 = node_times[s], t1 = node_times[s + 1];
        const double a = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
        std::vector<double> x(node_points[s].x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = (1 - a) * node_points[s].x[i] + a * node_points[s + 1].x[i];
        return x;
    }
};

namespace detail {

/// orthonormal basis (Euclidean, in sqrt-mass coordinates) of the node space
/// V = Delta_{pi_after} (x-part) + Delta_{pi_before}^perp (y-part)
inline Eigen::MatrixXd node_basis(const std::vector<double>& sqm, const Partition& before,
                                  const Partition& after) {
    const int n = before.n;
    std::vector<Eigen::VectorXd> cols;
    for (auto [lo, hi] : after.clusters()) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
        for (int i = lo; i <= hi; ++i) v[i] = sqm[i];
        cols.push_back(v / v.norm());
    }
    for (auto [lo, hi] : before.clusters()) {
        // mean-zero subspace of the cluster: hi - lo independent directions
        for (int i = lo; i < hi; ++i) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
            v[n + i] = 1.0;  // seed, orthogonalized below
            cols.push_back(v);
        }
    }
    // remove the per-cluster mass-weighted mean from the y seeds, then
    // Gram-Schmidt the whole set
    Eigen::MatrixXd B(2 * n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) B.col(c) = cols[c];
    for (auto [lo, hi] : before.clusters()) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
        double nrm2 = 0;
        for (int i = lo; i <= hi; ++i) {
            u[n + i] = sqm[i];
            nrm2 += sqm[i] * sqm[i];
        }
        for (int c = 0; c < B.cols(); ++c) {
            const double d = u.dot(B.col(c)) / nrm2;
            B.col(c) -= d * u;
        }
    }
    // Gram-Schmidt with drop of null columns
    std::vector<Eigen::VectorXd> q;
    for (int c = 0; c < B.cols(); ++c) {
        Eigen::VectorXd v = B.col(c);
        for (const auto& e : q) v -= e.dot(v) * e;
        const double nn = v.norm();
        if (nn > 1e-10) q.push_back(v / nn);
    }
    Eigen::MatrixXd Q(2 * n, q.size());
    for (std::size_t c = 0; c < q.size(); ++c) Q.col(c) = q[c];
    return Q;
}

inline Eigen::VectorXd to_zeta(const std::vector<double>& sqm, const ZPoint& z) {
    const int n = static_cast<int>(z.x.size());
    Eigen::VectorXd v(2 * n);
    for (int i = 0; i < n; ++i) {
        v[i] = sqm[i] * z.x[i];
        v[n + i] = sqm[i] * z.y[i];
    }
    return v;
}

inline ZPoint from_zeta(const std::vector<double>& sqm, const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size()) / 2;
    ZPoint z;
    z.x.resize(n);
    z.y.resize(n);
    for (int i = 0; i < n; ++i) {
        z.x[i] = v[i] / sqm[i];
        z.y[i] = v[n + i] / sqm[i];
    }
    return z;
}

}  // namespace detail

/// Minimal action over paths consistent with a fixed collision history. The
/// path is piecewise linear with free nodes at the event times; node values
/// solve an equality-constrained quadratic problem in closed form. Returns an
/// infeasible result when z1 is incompatible with the history or the optimal
/// path violates the ordering constraints.
inline ActionResult stratum_action(const CollisionHistory& history,
                                   const std::vector<double>& mass, const ZPoint& z0,
                                   const ZPoint& z1) {
    const int n = static_cast<int>(mass.size());
    if (static_cast<int>(z0.x.size()) != n || static_cast<int>(z1.x.size()) != n)
        throw std::invalid_argument("stratum_action: dimension mismatch");
    for (std::size_t e = 1; e < history.events.size(); ++e)
        if (!(history.events[e].t > history.events[e - 1].t))
            throw std::invalid_argument("stratum_action: event times must increase");
    for (const auto& ev : history.events)
        if (ev.t < 0.0 || ev.t > 1.0)
            throw std::invalid_argument("stratum_action: event times must lie in [0,1]");

    std::vector<double> sqm(n);
    for (int i = 0; i < n; ++i) sqm[i] = std::sqrt(mass[i]);

    // partition sequence pi_0 (finest) -> pi_q
    std::vector<Partition> parts;
    parts.push_back(Partition::finest(n));
    for (const auto& ev : history.events) {
        Partition p = parts.back();
        for (int w : ev.walls) {
            if (w < 0 || w >= n - 1 || !p.wall[w])
                throw std::invalid_argument("stratum_action: bad wall in event");
            p.wall[w] = false;
        }
        parts.push_back(p);
    }

    ActionResult res;
    const Partition& last = parts.back();

    // z1 must lie in Y_{pi_q}: x constant per cluster, y cluster-sums zero
    for (auto [lo, hi] : last.clusters()) {
        double msum = 0, ysum = 0;
        for (int i = lo; i <= hi; ++i) {
            if (std::abs(z1.x[i] - z1.x[lo]) > 1e-9) return res;
            msum += mass[i];
            ysum += mass[i] * z1.y[i];
        }
        if (std::abs(ysum) > 1e-9 * std::max(1.0, msum)) return res;
    }
    // z0 is visible data: y = 0
    for (int i = 0; i < n; ++i)
        if (std::abs(z0.y[i]) > 1e-12) return res;

    const int q = static_cast<int>(history.events.size());
    std::vector<double> tnode(q + 2);
    tnode[0] = 0.0;
    for (int e = 0; e < q; ++e) tnode[e + 1] = history.events[e].t;
    tnode[q + 1] = 1.0;

    const Eigen::VectorXd zeta0 = detail::to_zeta(sqm, z0);
    const Eigen::VectorXd zeta1 = detail::to_zeta(sqm, z1);

    // node-space bases for interior nodes 1..q
    std::vector<Eigen::MatrixXd> bases(q);
    std::vector<int> offset(q), dim(q);
    int total = 0;
    for (int e = 0; e < q; ++e) {
        bases[e] = detail::node_basis(sqm, parts[e], parts[e + 1]);
        offset[e] = total;
        dim[e] = static_cast<int>(bases[e].cols());
        total += dim[e];
    }

    // Zero-length end segments pin the adjacent node to the endpoint value
    // (finite action requires equality there). Pinned nodes leave the QP.
    const double eps_t = 1e-13;
    std::vector<bool> pinned(q, false);
    std::vector<Eigen::VectorXd> pin_val(q);
    if (q > 0 && tnode[1] <= eps_t) {
        const Eigen::VectorXd proj = bases[0] * (bases[0].transpose() * zeta0);
        if ((proj - zeta0).norm() > 1e-9) return res;  // z0 not in the node space
        pinned[0] = true;
        pin_val[0] = zeta0;
    }
    if (q > 0 && tnode[q + 1] - tnode[q] <= eps_t) {
        const Eigen::VectorXd proj = bases[q - 1] * (bases[q - 1].transpose() * zeta1);
        if ((proj - zeta1).norm() > 1e-9) return res;
        if (pinned[q - 1] && (pin_val[q - 1] - zeta1).norm() > 1e-9) return res;
        pinned[q - 1] = true;
        pin_val[q - 1] = zeta1;
    }

    // free-variable layout
    std::vector<int> foffset(q, -1);
    int ftotal = 0;
    for (int e = 0; e < q; ++e)
        if (!pinned[e]) {
            foffset[e] = ftotal;
            ftotal += dim[e];
        }
    (void)total;

    // quadratic form: J = sum_s |zeta(t_{s+1}) - zeta(t_s)|^2 / (2 dt_s)
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(std::max(ftotal, 1), std::max(ftotal, 1));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(std::max(ftotal, 1));

    // fixed value of node i (0 = z0, q+1 = z1, pinned interior), if any
    auto fixed_value = [&](int i) -> const Eigen::VectorXd* {
        if (i == 0) return &zeta0;
        if (i == q + 1) return &zeta1;
        if (pinned[i - 1]) return &pin_val[i - 1];
        return nullptr;
    };

    auto add_segment = [&](int left, int right, double dt) {
        if (dt <= eps_t) return;  // degenerate; equality enforced by pinning
        const double w = 1.0 / (2.0 * dt);
        const Eigen::VectorXd* fl = fixed_value(left);
        const Eigen::VectorXd* fr = fixed_value(right);
        if (!fl && !fr) {
            const int el = left - 1, er = right - 1;
            H.block(foffset[el], foffset[el], dim[el], dim[el]) +=
                2 * w * Eigen::MatrixXd::Identity(dim[el], dim[el]);
            H.block(foffset[er], foffset[er], dim[er], dim[er]) +=
                2 * w * Eigen::MatrixXd::Identity(dim[er], dim[er]);
            const Eigen::MatrixXd cross = bases[el].transpose() * bases[er];
            H.block(foffset[el], foffset[er], dim[el], dim[er]) -= 2 * w * cross;
            H.block(foffset[er], foffset[el], dim[er], dim[el]) -= 2 * w * cross.transpose();
        } else if (!fl) {
            const int el = left - 1;
            H.block(foffset[el], foffset[el], dim[el], dim[el]) +=
                2 * w * Eigen::MatrixXd::Identity(dim[el], dim[el]);
            g.segment(foffset[el], dim[el]) -= 2 * w * (bases[el].transpose() * (*fr));
        } else if (!fr) {
            const int er = right - 1;
            H.block(foffset[er], foffset[er], dim[er], dim[er]) +=
                2 * w * Eigen::MatrixXd::Identity(dim[er], dim[er]);
            g.segment(foffset[er], dim[er]) -= 2 * w * (bases[er].transpose() * (*fl));
        }
        // both fixed: contributes only to the constant term, recomputed below
    };

    for (int s = 0; s <= q; ++s) add_segment(s, s + 1, tnode[s + 1] - tnode[s]);

    Eigen::VectorXd sol = Eigen::VectorXd::Zero(std::max(ftotal, 1));
    if (ftotal > 0) sol = Eigen::LDLT<Eigen::MatrixXd>(H).solve(-g);

    // assemble nodes, action, and validity
    res.node_times = tnode;
    res.node_points.resize(q + 2);
    res.node_points[0] = z0;
    res.node_points[q + 1] = z1;
    std::vector<Eigen::VectorXd> zeta_nodes(q + 2);
    zeta_nodes[0] = zeta0;
    zeta_nodes[q + 1] = zeta1;
    for (int e = 0; e < q; ++e) {
        zeta_nodes[e + 1] =
            pinned[e] ? pin_val[e]
                      : Eigen::VectorXd(bases[e] * sol.segment(foffset[e], dim[e]));
        res.node_points[e + 1] = detail::from_zeta(sqm, zeta_nodes[e + 1]);
    }
    double J = 0.0;
    for (int s = 0; s <= q; ++s) {
        const double dt = tnode[s + 1] - tnode[s];
        if (dt <= eps_t) {
            if ((zeta_nodes[s + 1] - zeta_nodes[s]).norm() > 1e-9) return res;
            continue;
        }
        J += (zeta_nodes[s + 1] - zeta_nodes[s]).squaredNorm() / (2.0 * dt);
    }

    // ordering validity at nodes (piecewise linear => sufficient)
    for (int s = 0; s <= q + 1; ++s) {
        const auto& x = res.node_points[s].x;
        for (int i = 0; i + 1 < n; ++i)
            if (x[i] > x[i + 1] + 1e-9) return res;
    }

    res.feasible = true;
    res.action = J;
    return res;
}

struct MinimizeResult {
    CollisionHistory history;
    ActionResult path;
};

namespace detail {

/// all ordered set partitions (event sequences) of the wall subset
inline void event_orders(const std::vector<int>& walls,
                         std::vector<std::vector<std::vector<int>>>& out) {
    if (walls.empty()) {
        out.push_back({});
        return;
    }
    const int k = static_cast<int>(walls.size());
    // iterate over non-empty first blocks, recurse on the rest
    for (int maskbits = 1; maskbits < (1 << k); ++maskbits) {
        std::vector<int> first, rest;
        for (int i = 0; i < k; ++i)
            ((maskbits >> i) & 1 ? first : rest).push_back(walls[i]);
        std::vector<std::vector<std::vector<int>>> tails;
        event_orders(rest, tails);
        for (auto& tail : tails) {
            std::vector<std::vector<int>> seq;
            seq.push_back(first);
            for (auto& b : tail) seq.push_back(b);
            out.push_back(std::move(seq));
        }
    }
}

}  // namespace detail

/// Global minimizer over admissible histories for N <= 6: enumerate ordered
/// wall-destruction sequences, optimize event times by coordinate-wise
/// golden-section search (the action is jointly convex in times and nodes),
/// and return the smallest feasible action.
inline MinimizeResult variational_minimize(const std::vector<double>& mass, const ZPoint& z0,
                                           const ZPoint& z1) {
    const int n = static_cast<int>(mass.size());
    if (n > 6) throw std::invalid_argument("variational_minimize: N <= 6 required");
    if (n < 1) throw std::invalid_argument("variational_minimize: empty system");

    MinimizeResult best;
    best.path.action = std::numeric_limits<double>::infinity();

    const int nwalls = n - 1;
    for (int subset = 0; subset < (1 << nwalls); ++subset) {
        std::vector<int> walls;
        for (int w = 0; w < nwalls; ++w)
            if ((subset >> w) & 1) walls.push_back(w);

        // endpoint compatibility with the final partition is time-independent;
        // prune the subset before enumerating event orders
        Partition fin = Partition::finest(n);
        for (int w : walls) fin.wall[w] = false;
        bool compatible = true;
        for (auto [lo, hi] : fin.clusters()) {
            double msum = 0, ysum = 0;
            for (int i = lo; i <= hi; ++i) {
                if (std::abs(z1.x[i] - z1.x[lo]) > 1e-9) compatible = false;
                msum += mass[i];
                ysum += mass[i] * z1.y[i];
            }
            if (std::abs(ysum) > 1e-9 * std::max(1.0, msum)) compatible = false;
        }
        if (!compatible) continue;

        std::vector<std::vector<std::vector<int>>> orders;
        detail::event_orders(walls, orders);
        // dedupe: event_orders enumerates ordered block sequences; each is one
        // candidate history
        for (const auto& seq : orders) {
            const int q = static_cast<int>(seq.size());
            CollisionHistory h;
            for (int e = 0; e < q; ++e)
                h.events.push_back({(e + 1.0) / (q + 1.0), seq[e]});

            auto eval = [&](const std::vector<double>& times) {
                for (int e = 0; e < q; ++e) {
                    const double lo = e == 0 ? 0.0 : times[e - 1];
                    if (!(times[e] > lo) || times[e] > 1.0) return ActionResult{};
                }
                CollisionHistory ht = h;
                for (int e = 0; e < q; ++e) ht.events[e].t = times[e];
                return stratum_action(ht, mass, z0, z1);
            };

            std::vector<double> sqm(mass.size());
            for (std::size_t i = 0; i < mass.size(); ++i) sqm[i] = std::sqrt(mass[i]);
            auto segment_lengths = [&](const ActionResult& r) {
                std::vector<double> len(q + 1);
                for (int s = 0; s <= q; ++s)
                    len[s] = (detail::to_zeta(sqm, r.node_points[s + 1]) -
                              detail::to_zeta(sqm, r.node_points[s]))
                                 .norm();
                return len;
            };
            // exact time gradient by the envelope theorem:
            // dJ/dt_e = (v_left^2 - v_right^2)/2 at the optimal nodes
            auto time_gradient = [&](const ActionResult& r, const std::vector<double>& tt) {
                const std::vector<double> len = segment_lengths(r);
                Eigen::VectorXd g(q);
                for (int e = 0; e < q; ++e) {
                    const double dtl = (e == 0 ? tt[0] : tt[e] - tt[e - 1]);
                    const double dtr = (e == q - 1 ? 1.0 - tt[e] : tt[e + 1] - tt[e]);
                    const double vl = len[e] / std::max(dtl, 1e-12);
                    const double vr = len[e + 1] / std::max(dtr, 1e-12);
                    g[e] = 0.5 * (vl * vl - vr * vr);
                }
                return g;
            };

            std::vector<double> times(q);
            for (int e = 0; e < q; ++e) times[e] = h.events[e].t;
            ActionResult cur = eval(times);
            // warm-up: redistribute times proportionally to segment lengths
            // (time stationarity of the action is speed continuity, so the
            // joint optimum travels at constant speed and J = length^2/2)
            for (int it = 0; it < 200 && q > 0 && cur.feasible; ++it) {
                const std::vector<double> len = segment_lengths(cur);
                double total_len = 0;
                for (double l : len) total_len += std::max(l, 1e-12);
                std::vector<double> tnew(q);
                double acc = 0, moved = 0;
                for (int e = 0; e < q; ++e) {
                    acc += std::max(len[e], 1e-12) / total_len;
                    tnew[e] = std::min(std::max(acc, 1e-9), 1.0 - 1e-9);
                    if (e > 0) tnew[e] = std::max(tnew[e], tnew[e - 1] + 1e-12);
                    moved = std::max(moved, std::abs(tnew[e] - times[e]));
                }
                const ActionResult next = eval(tnew);
                if (!next.feasible) break;
                times = tnew;
                cur = next;
                if (moved < 1e-12) break;
            }
            // Newton polish on the reduced time problem with the exact gradient
            for (int newton = 0; newton < 12 && q > 0 && cur.feasible; ++newton) {
                const Eigen::VectorXd g = time_gradient(cur, times);
                if (g.lpNorm<Eigen::Infinity>() < 1e-12) break;
                Eigen::MatrixXd Ht(q, q);
                const double hfd = 1e-6;
                bool fd_ok = true;
                for (int e = 0; e < q && fd_ok; ++e) {
                    std::vector<double> tp = times;
                    tp[e] += hfd;
                    const ActionResult rp = eval(tp);
                    if (!rp.feasible) {
                        fd_ok = false;
                        break;
                    }
                    Ht.col(e) = (time_gradient(rp, tp) - g) / hfd;
                }
                if (!fd_ok) break;
                Ht = 0.5 * (Ht + Ht.transpose().eval());
                const Eigen::VectorXd step = Ht.ldlt().solve(-g);
                if (!step.allFinite()) break;
                // backtracking: halve the step until it stays inside the time
                // simplex and does not increase the action
                double alpha = 1.0;
                bool accepted = false;
                for (int bt = 0; bt < 40 && !accepted; ++bt, alpha *= 0.5) {
                    std::vector<double> tnew = times;
                    bool inside = true;
                    for (int e = 0; e < q; ++e) {
                        tnew[e] += alpha * step[e];
                        if (tnew[e] <= (e == 0 ? 1e-9 : tnew[e - 1] + 1e-12) ||
                            tnew[e] >= 1.0 - 1e-9)
                            inside = false;
                    }
                    if (!inside) continue;
                    const ActionResult next = eval(tnew);
                    if (!next.feasible || next.action > cur.action) continue;
                    times = tnew;
                    cur = next;
                    accepted = true;
                }
                if (!accepted) break;
                if (alpha * step.lpNorm<Eigen::Infinity>() < 1e-13) break;
            }
            const bool better =
                cur.feasible &&
                (cur.action < best.path.action - 1e-12 ||
                 (cur.action < best.path.action + 1e-9 &&
                  h.events.size() < best.history.events.size()));
            if (better) {
                best.path = cur;
                best.history = h;
                for (int e = 0; e < q; ++e) best.history.events[e].t = times[e];
            }
        }
    }
    if (!std::isfinite(best.path.action))
        throw std::runtime_error("variational_minimize: no admissible history found");
    return best;
}

// ---------------------------------------------------------------------------
// Continuum monotone formulation
// ---------------------------------------------------------------------------

struct MonotoneProfile {
    std::vector<double> f;  // samples on a uniform grid of [0,1], nondecreasing
};

inline void validate(const MonotoneProfile& p) {
    if (p.f.size() < 64)
        throw std::invalid_argument("MonotoneProfile: need at least 64 samples");
    for (std::size_t i = 1; i < p.f.size(); ++i)
        if (p.f[i] < p.f[i - 1] - 1e-12)
            throw std::invalid_argument("MonotoneProfile: not nondecreasing");
}

/// weighted L^2 projection onto the nondecreasing cone (pool adjacent
/// violators, stack form, O(n))
inline std::vector<double> pav_nondecreasing(const std::vector<double>& y,
                                             const std::vector<double>& w) {
    struct Block {
        double sum, weight;
        std::size_t count;
    };
    std::vector<Block> stack;
    stack.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        Block b{y[i] * w[i], w[i], 1};
        // merge while the previous block mean exceeds the new block mean
        while (!stack.empty() && stack.back().sum * b.weight > b.sum * stack.back().weight) {
            b.sum += stack.back().sum;
            b.weight += stack.back().weight;
            b.count += stack.back().count;
            stack.pop_back();
        }
        stack.push_back(b);
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : stack) {
        const double v = b.sum / b.weight;
        for (std::size_t k = 0; k < b.count; ++k) out.push_back(v);
    }
    return out;
}

/// sticky evolution of a monotone profile: metric projection of the free
/// flight f0 + t v0 onto the monotone cone
inline MonotoneProfile continuum_evolve(const MonotoneProfile& f0,
                                        const std::vector<double>& v0, double t) {
    validate(f0);
    if (v0.size() != f0.f.size())
        throw std::invalid_argument("continuum_evolve: velocity size mismatch");
    std::vector<double> free_flight(f0.f.size());
    for (std::size_t i = 0; i < free_flight.size(); ++i) free_flight[i] = f0.f[i] + t * v0[i];
    const std::vector<double> w(free_flight.size(), 1.0);
    MonotoneProfile out;
    out.f = pav_nondecreasing(free_flight, w);
    return out;
}

// ---------------------------------------------------------------------------
// Circle law: smallest enclosing ball
// ---------------------------------------------------------------------------

struct Ball {
    std::array<double, 3> center{0, 0, 0};
    double radius = -1.0;  // negative: empty
};

namespace detail {

inline double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b, int d) {
    double s = 0;
    for (int c = 0; c < d; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return s;
}

/// smallest ball with all support points on its boundary (circumball in the
/// support's affine hull)
inline Ball ball_from_support(const std::vector<std::array<double, 3>>& sup, int d) {
    Ball b;
    if (sup.empty()) return b;
    if (sup.size() == 1) {
        b.center = sup[0];
        b.radius = 0.0;
        return b;
    }
    const int k = static_cast<int>(sup.size()) - 1;
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double dot = 0;
            for (int c = 0; c < d; ++c)
                dot += (sup[i + 1][c] - sup[0][c]) * (sup[j + 1][c] - sup[0][c]);
            A(i, j) = 2.0 * dot;
        }
        rhs[i] = dist2(sup[i + 1], sup[0], d);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return b;  // affinely dependent support: no ball
    const Eigen::VectorXd lam = lu.solve(rhs);
    b.center = sup[0];
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < d; ++c) b.center[c] += lam[i] * (sup[i + 1][c] - sup[0][c]);
    b.radius = std::sqrt(dist2(b.center, sup[0], d));
    return b;
}

inline bool contains(const Ball& b, const std::array<double, 3>& p, int d) {
    if (b.radius < 0) return false;
    return dist2(b.center, p, d) <= b.radius * b.radius * (1 + 1e-12) + 1e-24;
}

inline Ball welzl(std::vector<std::array<double, 3>>& pts, std::size_t limit,
                  std::vector<std::array<double, 3>>& sup, int d) {
    if (limit == 0 || sup.size() == static_cast<std::size_t>(d) + 1)
        return ball_from_support(sup, d);
    Ball b = welzl(pts, limit - 1, sup, d);
    const auto& p = pts[limit - 1];
    if (contains(b, p, d)) return b;
    sup.push_back(p);
    b = welzl(pts, limit - 1, sup, d);
    sup.pop_back();
    // move-to-front heuristic
    std::rotate(pts.begin(), pts.begin() + (limit - 1), pts.begin() + limit);
    return b;
}

}  // namespace detail

/// exact smallest enclosing ball (randomized incremental, move-to-front)
inline Ball smallest_enclosing_ball(std::vector<std::array<double, 3>> pts, int d,
                                    std::uint64_t seed = 0x5eed) {
    if (pts.empty()) throw std::invalid_argument("smallest_enclosing_ball: empty set");
    if (pts.size() > 64) throw std::invalid_argument("smallest_enclosing_ball: at most 64 points");
    if (d < 1 || d > 3) throw std::invalid_argument("smallest_enclosing_ball: d in {1,2,3}");
    std::mt19937_64 rng(seed);
    for (std::size_t i = pts.size(); i > 1; --i)
        std::swap(pts[i - 1], pts[rng() % i]);
    std::vector<std::array<double, 3>> sup;
    return detail::welzl(pts, pts.size(), sup, d);
}

/// circle law: the joint shock velocity is the center of the smallest ball
/// covering the colliding velocities
inline std::array<double, 3> shock_velocity(const std::vector<std::array<double, 3>>& velocities,
                                            int d) {
    return smallest_enclosing_ball(velocities, d).center;
}

}  // namespace geoflow::sticky
