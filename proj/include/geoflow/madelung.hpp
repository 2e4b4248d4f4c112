/// @file madelung.hpp
/// @brief Madelung correspondence on the periodic line: forward/inverse
///        transform psi = sqrt(rho exp(i theta)) (so |psi|^2 = rho and
///        arg psi = theta/2), a Strang split-step integrator for
///        i psi_t = -psi_xx + V psi - f(|psi|^2) psi, and the residual
///        evaluator for the barotropic system
///            rho_t + (rho v)_x = 0,
///            v_t + v v_x + (2V - 2 f(rho) - 2 (sqrt(rho))_xx/sqrt(rho))_x = 0,
///        with v = theta_x.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "geoflow/fft.hpp"
#include "geoflow/spectral2d.hpp"  // two_pi, is_pow2, cplx

namespace geoflow::madelung {

struct WaveFunction1D {
    double length = two_pi;
    std::vector<cplx> psi;

    int n() const { return static_cast<int>(psi.size()); }
    double x(int j) const { return length * j / n(); }
};

struct MadelungPair {
    double length = two_pi;
    std::vector<double> rho;    // positive samples
    std::vector<double> theta;  // continuous branch along the grid
    int winding = 0;            // phase winding of psi across the period

    int n() const { return static_cast<int>(rho.size()); }
};

struct NlsModel {
    std::vector<double> potential;  // V samples (empty = 0)
    std::vector<double> f_coeff;    // f(rho) = sum_k f_coeff[k] rho^k

    double f(double rho) const {
        double acc = 0.0, p = 1.0;
        for (double c : f_coeff) {
            acc += c * p;
            p *= rho;
        }
        return acc;
    }
    double V(int j) const { return potential.empty() ? 0.0 : potential[j]; }
};

inline int mode_index(int j, int n) { return j <= n / 2 ? j : j - n; }

inline WaveFunction1D madelung_forward(const MadelungPair& p) {
    WaveFunction1D w;
    w.length = p.length;
    w.psi.resize(p.rho.size());
    for (int j = 0; j < p.n(); ++j) {
        if (!(p.rho[j] > 0))
            throw std::invalid_argument("madelung_forward: rho must be positive");
        w.psi[j] = std::sqrt(p.rho[j]) *
                   cplx{std::cos(0.5 * p.theta[j]), std::sin(0.5 * p.theta[j])};
    }
    return w;
}

/// Inverse transform; the zero-free condition min|psi| > 1e-6 is enforced
/// (wave functions with zeros are refused, not regularized).
inline MadelungPair madelung_inverse(const WaveFunction1D& w) {
    MadelungPair p;
    p.length = w.length;
    const int n = w.n();
    p.rho.resize(n);
    p.theta.resize(n);
    for (int j = 0; j < n; ++j) {
        if (std::abs(w.psi[j]) <= 1e-6)
            throw std::invalid_argument("madelung_inverse: psi has a (near-)zero");
        p.rho[j] = std::norm(w.psi[j]);
    }
    double theta = 2.0 * std::arg(w.psi[0]);
    p.theta[0] = theta;
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        const cplx ratio = w.psi[j % n] / w.psi[j - 1];
        const double dphi = std::arg(ratio);
        total += dphi;
        if (j < n) {
            theta += 2.0 * dphi;
            p.theta[j] = theta;
        }
    }
    p.winding = static_cast<int>(std::lround(total / two_pi));
    return p;
}

/// int |psi|^2 dx
inline double norm_l2sq(const WaveFunction1D& w) {
    double s = 0;
    for (const auto& c : w.psi) s += std::norm(c);
    return s * w.length / w.n();
}

/// Strang split step: half kinetic, full potential/nonlinear, half kinetic.
/// Each substep is unitary, so the L^2 norm is conserved to round-off.
inline void nls_step(WaveFunction1D& w, const NlsModel& model, double dt) {
    const int n = w.n();
    if (!is_pow2(n)) throw std::invalid_argument("nls_step: grid must be a power of two");
    const double kmax = two_pi * (n / 2) / w.length;
    if (!(dt * kmax * kmax < std::numbers::pi))
        throw std::invalid_argument("nls_step: dt too large for the fastest linear phase");
    if (!model.potential.empty() && static_cast<int>(model.potential.size()) != n)
        throw std::invalid_argument("nls_step: potential size mismatch");

    auto half_kinetic = [&]() {
        fft::forward1(w.psi, n);
        for (int j = 0; j < n; ++j) {
            const double k = two_pi * mode_index(j, n) / w.length;
            const double phase = -k * k * 0.5 * dt;
            w.psi[j] *= cplx{std::cos(phase), std::sin(phase)};
        }
        fft::backward1(w.psi, n);
    };

    half_kinetic();
    for (int j = 0; j < n; ++j) {
        const double phase = -(model.V(j) - model.f(std::norm(w.psi[j]))) * dt;
        w.psi[j] *= cplx{std::cos(phase), std::sin(phase)};
    }
    half_kinetic();
}

namespace detail {

inline std::vector<double> spectral_deriv(const std::vector<double>& f, double length) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> a(f.begin(), f.end());
    fft::forward1(a, n);
    for (int j = 0; j < n; ++j) {
        const int m = mode_index(j, n);
        const double k = (2 * m == n) ? 0.0 : two_pi * m / length;  // drop Nyquist
        a[j] *= cplx{0, k};
    }
    fft::backward1(a, n);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

/// derivative of a possibly winding theta: linear slope + periodic remainder
inline std::vector<double> theta_deriv(const MadelungPair& p) {
    const int n = p.n();
    const double slope = (p.winding * 2.0) * two_pi / p.length;  // d theta/dx average
    std::vector<double> per(n);
    for (int j = 0; j < n; ++j) per[j] = p.theta[j] - slope * (p.length * j / n);
    std::vector<double> d = spectral_deriv(per, p.length);
    for (double& v : d) v += slope;
    return d;
}

}  // namespace detail

struct BarotropicResiduals {
    double continuity = 0.0;  // L2 norm of rho_t + (rho v)_x
    double momentum = 0.0;    // L2 norm of v_t + v v_x + (...)_x
};

/// Residuals of the barotropic system on a centered time triple
/// (pairs at t-dt, t, t+dt). Spatial derivatives are spectral; time
/// derivatives are second-order centered differences.
inline BarotropicResiduals barotropic_residual(const MadelungPair& prev,
                                               const MadelungPair& mid,
                                               const MadelungPair& next,
                                               const NlsModel& model, double dt) {
    const int n = mid.n();
    if (prev.n() != n || next.n() != n)
        throw std::invalid_argument("barotropic_residual: grid mismatch");
    for (double r : mid.rho)
        if (r < 1e-9) throw std::invalid_argument("barotropic_residual: rho below floor");

    const std::vector<double> v = detail::theta_deriv(mid);
    const std::vector<double> v_prev = detail::theta_deriv(prev);
    const std::vector<double> v_next = detail::theta_deriv(next);

    std::vector<double> rho_v(n), sqrt_rho(n);
    for (int j = 0; j < n; ++j) {
        rho_v[j] = mid.rho[j] * v[j];
        sqrt_rho[j] = std::sqrt(mid.rho[j]);
    }
    const std::vector<double> d_rho_v = detail::spectral_deriv(rho_v, mid.length);
    const std::vector<double> vx = detail::spectral_deriv(v, mid.length);

    // quantum pressure 2 (sqrt rho)_xx / sqrt rho, spectrally
    const std::vector<double> s1 = detail::spectral_deriv(sqrt_rho, mid.length);
    const std::vector<double> s2 = detail::spectral_deriv(s1, mid.length);
    std::vector<double> bernoulli(n);
    for (int j = 0; j < n; ++j)
        bernoulli[j] = 2.0 * model.V(j) - 2.0 * model.f(mid.rho[j]) -
                       2.0 * s2[j] / sqrt_rho[j];
    const std::vector<double> dbern = detail::spectral_deriv(bernoulli, mid.length);

    const double dx = mid.length / n;
    double c2 = 0, m2 = 0;
    for (int j = 0; j < n; ++j) {
        const double rc = (next.rho[j] - prev.rho[j]) / (2 * dt) + d_rho_v[j];
        const double rm = (v_next[j] - v_prev[j]) / (2 * dt) + v[j] * vx[j] + dbern[j];
        c2 += rc * rc;
        m2 += rm * rm;
    }
    return {std::sqrt(c2 * dx), std::sqrt(m2 * dx)};
}

}  // namespace geoflow::madelung
