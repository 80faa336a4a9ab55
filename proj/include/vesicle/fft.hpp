#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "vesicle/grid.hpp"

namespace vesicle {

// Thin trait layer over the fftw/fftwf entry points so the field type can
// stay templated on the real type. Only double is exercised by the solver
// (the contract pins 64-bit floats); float exists for completeness.
template <typename Real>
struct fftw_api;

template <>
struct fftw_api<double> {
    using complex = fftw_complex;
    using plan = fftw_plan;
    static double* alloc_real(std::size_t n) { return fftw_alloc_real(n); }
    static complex* alloc_complex(std::size_t n) { return fftw_alloc_complex(n); }
    static void free(void* p) { fftw_free(p); }
    static plan plan_r2c(int n0, int n1, int n2, double* in, complex* out) {
        return fftw_plan_dft_r2c_3d(n0, n1, n2, in, out, FFTW_ESTIMATE);
    }
    static plan plan_c2r(int n0, int n1, int n2, complex* in, double* out) {
        return fftw_plan_dft_c2r_3d(n0, n1, n2, in, out, FFTW_ESTIMATE);
    }
    static void execute_r2c(plan p, double* in, complex* out) {
        fftw_execute_dft_r2c(p, in, out);
    }
    static void execute_c2r(plan p, complex* in, double* out) {
        fftw_execute_dft_c2r(p, in, out);
    }
    static void destroy(plan p) { fftw_destroy_plan(p); }
};

template <>
struct fftw_api<float> {
    using complex = fftwf_complex;
    using plan = fftwf_plan;
    static float* alloc_real(std::size_t n) { return fftwf_alloc_real(n); }
    static complex* alloc_complex(std::size_t n) { return fftwf_alloc_complex(n); }
    static void free(void* p) { fftwf_free(p); }
    static plan plan_r2c(int n0, int n1, int n2, float* in, complex* out) {
        return fftwf_plan_dft_r2c_3d(n0, n1, n2, in, out, FFTW_ESTIMATE);
    }
    static plan plan_c2r(int n0, int n1, int n2, complex* in, float* out) {
        return fftwf_plan_dft_c2r_3d(n0, n1, n2, in, out, FFTW_ESTIMATE);
    }
    static void execute_r2c(plan p, float* in, complex* out) {
        fftwf_execute_dft_r2c(p, in, out);
    }
    static void execute_c2r(plan p, complex* in, float* out) {
        fftwf_execute_dft_c2r(p, in, out);
    }
    static void destroy(plan p) { fftwf_destroy_plan(p); }
};

/**
 * Per-grid transform context: plans, aligned scratch, and wavenumber axes.
 *
 * Memory layout notes. Fields are x-fastest, so the FFTW logical dims are
 * (nz, ny, nx) and the half-complex cube is nz*ny*(nx/2+1) with the kx
 * index fastest. Plans use FFTW_ESTIMATE: slightly slower transforms but
 * the plan (and hence every result) is reproducible run to run, which the
 * determinism contract requires. All public results are normalized so that
 * inverse(forward(u)) == u.
 */
template <typename Real = double>
class FftContext {
  public:
    using api = fftw_api<Real>;
    using cplx = typename api::complex;

    explicit FftContext(const GridSpec& g) : grid_(g) {
        g.validate();
        nk_ = std::size_t(g.nx / 2 + 1) * g.ny * g.nz;
        real_ = api::alloc_real(g.npts());
        cplx_ = api::alloc_complex(nk_);
        plan_fwd_ = api::plan_r2c(g.nz, g.ny, g.nx, real_, cplx_);
        plan_bwd_ = api::plan_c2r(g.nz, g.ny, g.nx, cplx_, real_);
        kx_ = axis_wavenumbers(g.nx, g.lx);
        ky_ = axis_wavenumbers(g.ny, g.ly);
        kz_ = axis_wavenumbers(g.nz, g.lz);
    }
    ~FftContext() {
        api::destroy(plan_fwd_);
        api::destroy(plan_bwd_);
        api::free(real_);
        api::free(cplx_);
    }
    FftContext(const FftContext&) = delete;
    FftContext& operator=(const FftContext&) = delete;

    const GridSpec& grid() const { return grid_; }
    std::size_t nk() const { return nk_; }

    // Unnormalized forward transform into caller storage.
    void forward(const std::vector<Real>& in, std::vector<std::complex<Real>>& out) {
        for (std::size_t i = 0; i < in.size(); ++i) real_[i] = in[i];
        out.resize(nk_);
        api::execute_r2c(plan_fwd_, real_, reinterpret_cast<cplx*>(out.data()));
    }

    // Inverse transform with the 1/N normalization folded in. The complex
    // input is clobbered (multi-dimensional c2r works in place on it).
    void inverse(std::vector<std::complex<Real>>& in, std::vector<Real>& out) {
        out.resize(grid_.npts());
        api::execute_c2r(plan_bwd_, reinterpret_cast<cplx*>(in.data()), real_);
        const Real norm = Real(1) / Real(grid_.npts());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * norm;
    }

    // Signed-alias wavenumbers for one axis: 2*pi*m/L for m <= n/2, then
    // negative frequencies; the Nyquist mode appears once at +n/2.
    static std::vector<Real> axis_wavenumbers(int n, double L) {
        std::vector<Real> k(n);
        const Real f = Real(2) * Real(M_PI) / Real(L);
        for (int m = 0; m < n; ++m) {
            int alias = (m <= n / 2) ? m : m - n;
            k[m] = f * Real(alias);
        }
        return k;
    }

    // Visit every retained half-spectrum mode: cb(flat_index, kx, ky, kz,
    // hermitian_weight). Weight is 2 for modes whose conjugate partner was
    // dropped by the r2c layout, else 1 (kx = 0 and the even-n Nyquist
    // plane are self-conjugate).
    template <typename F>
    void for_each_mode(F&& cb) const {
        const int nxh = grid_.nx / 2 + 1;
        std::size_t idx = 0;
        for (int kz = 0; kz < grid_.nz; ++kz)
            for (int ky = 0; ky < grid_.ny; ++ky)
                for (int i = 0; i < nxh; ++i, ++idx) {
                    Real w = (i == 0 || i == grid_.nx / 2) ? Real(1) : Real(2);
                    cb(idx, kx_[i], ky_[ky], kz_[kz], w);
                }
    }

    const std::vector<Real>& kx() const { return kx_; }
    const std::vector<Real>& ky() const { return ky_; }
    const std::vector<Real>& kz() const { return kz_; }

  private:
    GridSpec grid_;
    std::size_t nk_ = 0;
    Real* real_ = nullptr;
    cplx* cplx_ = nullptr;
    typename api::plan plan_fwd_{}, plan_bwd_{};
    std::vector<Real> kx_, ky_, kz_;
};

// Context cache keyed by grid geometry. Plans are expensive relative to a
// 16^3 transform, and the stepping loop hits the same grid millions of
// times, so share one context per grid.
template <typename Real = double>
inline FftContext<Real>& fft_context(const GridSpec& g) {
    using Key = std::tuple<int, int, int, double, double, double>;
    static std::map<Key, std::unique_ptr<FftContext<Real>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    Key key{g.nx, g.ny, g.nz, g.lx, g.ly, g.lz};
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<FftContext<Real>>(g)).first;
    return *it->second;
}

} // namespace vesicle
