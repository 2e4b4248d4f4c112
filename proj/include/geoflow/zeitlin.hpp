/// @file zeitlin.hpp
/// @brief SU(N) sine-bracket truncation of 2D Euler on the torus.
///
/// Basis convention (N odd): with w = exp(2*pi*i/N), clock g = diag(w^{2j})
/// and shift h (h e_j = e_{j+1}), the Weyl basis is
///     T_m = w^{-m1*m2} g^{m1} h^{m2},
/// which satisfies T_m T_n = w^{m x n} T_{m+n}, T_m^dag = T_{-m}, and the sine
/// bracket [T_m, T_n] = 2i sin(2*pi*(m x n)/N) T_{m+n}. A real vorticity with
/// coefficients omega_hat_k maps to the skew-Hermitian traceless matrix
///     W = i sum_k omega_hat_k T_k,   |k_i| <= (N-1)/2.
/// The quantized Laplacian acts diagonally on T_k with eigenvalue -|k|^2
/// (symmetrized representatives), so Delta_N P = W is solved coefficientwise.
/// Time stepping is an isospectral Cayley/midpoint scheme: W' = Q W Q^dag with
/// unitary Q, so the spectrum and every tr(W^k) are preserved to round-off.
///
/// All T_m phases are powers of w with integer exponent -m1*m2 + 2*m1*j
/// (j the row index), evaluated through a root-of-unity table.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "geoflow/spectral2d.hpp"

namespace geoflow::zeitlin {

using Matrix = Eigen::MatrixXcd;

struct ZeitlinState {
    int N = 0;
    Matrix W;  ///< N x N skew-Hermitian, traceless

    ZeitlinState() = default;
    ZeitlinState(int N_, Matrix W_) : N(N_), W(std::move(W_)) {}
};

inline void require_odd(int N) {
    if (N < 3 || N % 2 == 0)
        throw std::invalid_argument("zeitlin: N must be an odd integer >= 3");
}

/// band limit of the mode <-> matrix map
inline int band(int N) { return (N - 1) / 2; }

namespace detail {

inline const std::vector<cplx>& roots(int N) {
    thread_local int cached_n = 0;
    thread_local std::vector<cplx> cached;
    if (cached_n != N) {
        cached.resize(N);
        for (int t = 0; t < N; ++t)
            cached[t] = cplx{std::cos(two_pi * t / N), std::sin(two_pi * t / N)};
        cached_n = N;
    }
    return cached;
}

inline int phase_index(int N, int m1, int m2, int j) {
    const long long e = -static_cast<long long>(m1) * m2 + 2LL * m1 * j;
    return static_cast<int>(((e % N) + N) % N);
}

}  // namespace detail

/// T_k for integer wavevector k (taken mod N); k == 0 (mod N) is rejected.
inline Matrix basis_matrix(int N, int k1, int k2) {
    require_odd(N);
    const int m1 = ((k1 % N) + N) % N;
    const int m2 = ((k2 % N) + N) % N;
    if (m1 == 0 && m2 == 0)
        throw std::invalid_argument("basis_matrix: k must be nonzero mod N");
    Matrix T = Matrix::Zero(N, N);
    const auto& w = detail::roots(N);
    for (int l = 0; l < N; ++l) {
        const int j = (l + m2) % N;
        T(j, l) = w[detail::phase_index(N, m1, m2, j)];
    }
    return T;
}

/// coefficient of T_m in W: tr(T_m^dag W)/N, using the one-diagonal support
inline cplx basis_coefficient(const Matrix& W, int N, int k1, int k2) {
    const int m1 = ((k1 % N) + N) % N;
    const int m2 = ((k2 % N) + N) % N;
    const auto& w = detail::roots(N);
    cplx acc{0, 0};
    for (int l = 0; l < N; ++l) {
        const int j = (l + m2) % N;
        acc += std::conj(w[detail::phase_index(N, m1, m2, j)]) * W(j, l);
    }
    return acc / double(N);
}

/// symmetrized squared wavenumber of the class of k mod N
inline double laplacian_eig(int N, int k1, int k2) {
    const int B = band(N);
    int s1 = ((k1 % N) + N) % N;
    int s2 = ((k2 % N) + N) % N;
    if (s1 > B) s1 -= N;
    if (s2 > B) s2 -= N;
    return double(s1) * s1 + double(s2) * s2;
}

/// W = i sum omega_hat_k T_k over the admissible band. The field must be
/// band-limited to |k_i| <= (N-1)/2.
inline ZeitlinState to_matrix(const VorticityField2D& w, int N) {
    require_odd(N);
    const Grid2& g = w.grid;
    const int B = band(N);
    Matrix W = Matrix::Zero(N, N);
    const auto& rt = detail::roots(N);
    const cplx I{0, 1};
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const cplx c = w.omega_hat[g.idx(ix, iy)];
            if (c == cplx{0, 0}) continue;
            const int s1 = g.sx(ix), s2 = g.sy(iy);
            if (std::abs(s1) > B || std::abs(s2) > B)
                throw std::invalid_argument("to_matrix: field exceeds the admissible band");
            const int m1 = ((s1 % N) + N) % N;
            const int m2 = ((s2 % N) + N) % N;
            for (int l = 0; l < N; ++l) {
                const int j = (l + m2) % N;
                W(j, l) += I * c * rt[detail::phase_index(N, m1, m2, j)];
            }
        }
    }
    return {N, std::move(W)};
}

/// inverse of to_matrix on the admissible band
inline VorticityField2D from_matrix(const ZeitlinState& st, const Grid2& g) {
    require_odd(st.N);
    const int B = band(st.N);
    VorticityField2D w(g);
    const cplx I{0, 1};
    for (int s1 = -B; s1 <= B; ++s1) {
        for (int s2 = -B; s2 <= B; ++s2) {
            if (s1 == 0 && s2 == 0) continue;
            if (std::abs(s1) >= g.nx / 2 || std::abs(s2) >= g.ny / 2)
                throw std::invalid_argument("from_matrix: grid too coarse for the band");
            const cplx c = basis_coefficient(st.W, st.N, s1, s2) / I;
            w.omega_hat[g.idx((s1 + g.nx) % g.nx, (s2 + g.ny) % g.ny)] = c;
        }
    }
    w.omega_hat[0] = 0.0;
    return w;
}

/// P solving Delta_N P = W, diagonal on the T_k basis
inline Matrix poisson_solve(const Matrix& W, int N) {
    const int B = band(N);
    const auto& rt = detail::roots(N);
    Matrix P = Matrix::Zero(N, N);
    for (int s2 = -B; s2 <= B; ++s2) {
        const int m2 = ((s2 % N) + N) % N;
        for (int s1 = -B; s1 <= B; ++s1) {
            if (s1 == 0 && s2 == 0) continue;
            const int m1 = ((s1 % N) + N) % N;
            cplx c{0, 0};
            for (int l = 0; l < N; ++l) {
                const int j = (l + m2) % N;
                c += std::conj(rt[detail::phase_index(N, m1, m2, j)]) * W(j, l);
            }
            c /= -double(N) * laplacian_eig(N, s1, s2);
            for (int l = 0; l < N; ++l) {
                const int j = (l + m2) % N;
                P(j, l) += c * rt[detail::phase_index(N, m1, m2, j)];
            }
        }
    }
    return P;
}

/// dW/dt = [P, W]; skew-Hermitian and traceless whenever W is
inline Matrix zeitlin_rhs(const Matrix& W, int N) {
    const Matrix P = poisson_solve(W, N);
    return P * W - W * P;
}

/// quantized kinetic energy 2 pi^2 sum |omega_hat_k|^2/|k|^2 = (2 pi^2/N) tr(P W)
inline double quantized_energy(const Matrix& W, int N) {
    const Matrix P = poisson_solve(W, N);
    return 2.0 * std::numbers::pi * std::numbers::pi / N * (P * W).trace().real();
}

/// tr((-i W)^k): the real Casimir invariant of the skew-Hermitian flow
inline double casimir_trace(const Matrix& W, int k) {
    const Matrix H = cplx{0, -1} * W;
    Matrix M = H;
    for (int i = 1; i < k; ++i) M = M * H;
    return M.trace().real();
}

/// max deviation from skew-Hermitian plus trace magnitude
inline double structure_defect(const Matrix& W) {
    return (W + W.adjoint()).cwiseAbs().maxCoeff() + std::abs(W.trace());
}

/// project back onto skew-Hermitian traceless (round-off hygiene)
inline void reproject(Matrix& W) {
    W = 0.5 * (W - W.adjoint().eval());
    const cplx tr = W.trace() / double(W.rows());
    W.diagonal().array() -= tr;
}

struct StepStats {
    int iterations = 0;
};

/// Isospectral midpoint step: fixed-point iteration for the midpoint state X,
/// P = Delta^{-1} X, Q = Cayley((dt/2) P), W' = Q W Q^dag. Unitary conjugation
/// preserves the spectrum exactly; the fixed point makes the scheme second
/// order. Throws on non-convergence within 50 iterations.
inline ZeitlinState step_isospectral(const ZeitlinState& st, double dt,
                                     StepStats* stats = nullptr, double tol = 1e-12,
                                     int max_iter = 50) {
    const int N = st.N;
    const Matrix& W = st.W;
    const Matrix Id = Matrix::Identity(N, N);
    Matrix X = W;
    Matrix Wn = W;
    const double scale = std::max(1.0, W.norm());
    for (int it = 1; it <= max_iter; ++it) {
        const Matrix P = poisson_solve(X, N);
        const Matrix A = (0.5 * dt) * P;
        const Matrix Q = (Id - A).partialPivLu().solve(Id + A);
        Wn = Q * W * Q.adjoint();
        Matrix Xn = 0.5 * (W + Wn);
        const double delta = (Xn - X).norm();
        X = std::move(Xn);
        if (delta <= tol * scale) {
            if (stats) stats->iterations = it;
            reproject(Wn);
            return {N, std::move(Wn)};
        }
    }
    throw std::runtime_error("step_isospectral: fixed point did not converge in 50 iterations");
}

/// classical RK4 on the matrix flow, kept as a cross-check integrator
inline ZeitlinState step_rk4(const ZeitlinState& st, double dt) {
    const int N = st.N;
    const Matrix k1 = zeitlin_rhs(st.W, N);
    const Matrix k2 = zeitlin_rhs(st.W + 0.5 * dt * k1, N);
    const Matrix k3 = zeitlin_rhs(st.W + 0.5 * dt * k2, N);
    const Matrix k4 = zeitlin_rhs(st.W + dt * k3, N);
    Matrix W = st.W + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    reproject(W);
    return {N, std::move(W)};
}

/// random band-limited skew-Hermitian traceless state of unit Frobenius norm
inline ZeitlinState random_state(int N, std::uint64_t seed) {
    require_odd(N);
    const Grid2 g(256, 256);
    VorticityField2D w(g);
    std::mt19937_64 rng(seed);
    auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    const int B = std::min(band(N), g.nx / 3);
    for (int s1 = -B; s1 <= B; ++s1)
        for (int s2 = -B; s2 <= B; ++s2) {
            if (s1 == 0 && s2 == 0) continue;
            w.omega_hat[g.idx((s1 + g.nx) % g.nx, (s2 + g.ny) % g.ny)] = cplx{u01(), u01()};
        }
    make_real_symmetric(g, w.omega_hat);
    ZeitlinState st = to_matrix(w, N);
    st.W /= st.W.norm();
    return st;
}

}  // namespace geoflow::zeitlin
