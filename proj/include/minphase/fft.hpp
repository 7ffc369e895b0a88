#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace minphase {

using cplx = std::complex<double>;

namespace detail {

// FFTW's planner is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct fftw_buffer_deleter {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

}  // namespace detail

// Unnormalized complex DFT of a fixed length. sign = -1 is forward (e^{-2 pi i jk/n}).
class fft_plan {
public:
    fft_plan(std::size_t n, int sign) : n_(n) {
        buf_.reset(fftw_alloc_complex(n));
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(),
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fft_plan(const fft_plan&) = delete;
    fft_plan& operator=(const fft_plan&) = delete;
    ~fft_plan() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    std::size_t size() const noexcept { return n_; }
    cplx* data() noexcept { return reinterpret_cast<cplx*>(buf_.get()); }

    void execute() { fftw_execute(plan_); }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex[], detail::fftw_buffer_deleter> buf_;
    fftw_plan plan_{};
};

inline std::vector<cplx> fft(std::span<const cplx> x, int sign = -1) {
    fft_plan p(x.size(), sign);
    std::copy(x.begin(), x.end(), p.data());
    p.execute();
    return {p.data(), p.data() + x.size()};
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// X_k = sum_j x_j exp(i*alpha*j*k), k = 0..m-1 (Bluestein).
inline std::vector<cplx> chirp_z(std::span<const cplx> x, std::size_t m, double alpha) {
    const std::size_t n = x.size();
    if (n == 0 || m == 0) return std::vector<cplx>(m, cplx{});
    const std::size_t len = next_pow2(n + m - 1);

    // j*j is exact in double up to 2^26, so the only phase error is the final rounding.
    auto chirp = [alpha](std::size_t j) {
        const double jj = static_cast<double>(j) * static_cast<double>(j);
        return std::polar(1.0, 0.5 * alpha * jj);
    };

    fft_plan fa(len, -1), fb(len, -1), inv(len, +1);
    cplx* a = fa.data();
    cplx* b = fb.data();
    std::fill(a, a + len, cplx{});
    std::fill(b, b + len, cplx{});
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp(j);
    for (std::size_t k = 0; k < m; ++k) b[k] = std::conj(chirp(k));
    for (std::size_t j = 1; j < n; ++j) b[len - j] = std::conj(chirp(j));
    fa.execute();
    fb.execute();
    cplx* c = inv.data();
    for (std::size_t i = 0; i < len; ++i) c[i] = a[i] * b[i];
    inv.execute();
    std::vector<cplx> out(m);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < m; ++k) out[k] = c[k] * chirp(k) * scale;
    return out;
}

}  // namespace minphase
