/// @file fft.hpp
/// @brief Thin RAII layer over FFTW complex transforms (rank 1..3, in-place).
///
/// Forward transforms divide by the mode count, so coefficients are true
/// Fourier coefficients: f(x) = sum_k fhat_k exp(+i k.x). Plan creation is
/// guarded by a mutex (FFTW planning is not thread safe); execution through
/// fftw_execute_dft is reentrant, so transforms on distinct buffers may run
/// concurrently.

#pragma once

#include <array>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace geoflow::fft {

using cplx = std::complex<double>;

namespace detail {

struct PlanKey {
    int sign;
    std::array<int, 3> dims;  // unused trailing dims are 0
    bool operator<(const PlanKey& o) const {
        if (sign != o.sign) return sign < o.sign;
        return dims < o.dims;
    }
};

// Plans are created FFTW_UNALIGNED so they stay valid for any buffer with the
// same layout (new-array execute).
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int rank, const int* n, int sign) {
        PlanKey key{sign, {0, 0, 0}};
        for (int r = 0; r < rank; ++r) key.dims[r] = n[r];
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int r = 0; r < rank; ++r) total *= static_cast<std::size_t>(n[r]);
        std::vector<cplx> scratch(total);
        fftw_plan p = fftw_plan_dft(
            rank, n, reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw_plan_dft failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

  private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

inline void execute(int rank, const int* n, int sign, cplx* data) {
    fftw_plan p = PlanCache::instance().get(rank, n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace detail

/// physical -> spectral, normalized by 1/n
inline void forward1(std::vector<cplx>& a, int n) {
    detail::execute(1, &n, FFTW_FORWARD, a.data());
    const double s = 1.0 / n;
    for (auto& v : a) v *= s;
}

/// spectral -> physical
inline void backward1(std::vector<cplx>& a, int n) {
    detail::execute(1, &n, FFTW_BACKWARD, a.data());
}

inline void forward2(std::vector<cplx>& a, int nx, int ny) {
    const int n[2] = {nx, ny};
    detail::execute(2, n, FFTW_FORWARD, a.data());
    const double s = 1.0 / (static_cast<double>(nx) * ny);
    for (auto& v : a) v *= s;
}

inline void backward2(std::vector<cplx>& a, int nx, int ny) {
    const int n[2] = {nx, ny};
    detail::execute(2, n, FFTW_BACKWARD, a.data());
}

inline void forward3(std::vector<cplx>& a, int n0, int n1, int n2) {
    const int n[3] = {n0, n1, n2};
    detail::execute(3, n, FFTW_FORWARD, a.data());
    const double s = 1.0 / (static_cast<double>(n0) * n1 * n2);
    for (auto& v : a) v *= s;
}

inline void backward3(std::vector<cplx>& a, int n0, int n1, int n2) {
    const int n[3] = {n0, n1, n2};
    detail::execute(3, n, FFTW_BACKWARD, a.data());
}

}  // namespace geoflow::fft
