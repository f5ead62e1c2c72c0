#pragma once

#include <fftw3.h>

#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "kdv/grid.hpp"

namespace kdv {

/// FFT-backed Fourier differentiation on a periodic uniform grid.
///
/// Wavenumbers are theta_k = 2*pi*k/(b-a) in the half-complex (r2c) layout
/// k = 0..N/2. The Nyquist slot k = N/2 carries theta = 0, so every
/// derivative application (p = 1, 2, 3) kills that mode. This keeps the real
/// representation of D1 exactly skew-symmetric and makes D1^2 coincide with
/// D1 applied twice, which the discrete conservation identities rely on.
///
/// Plans are created once per grid with FFTW_UNALIGNED and executed through
/// the new-array interface, so concurrent calls on distinct inputs are safe.
/// Construction itself goes through the (non-reentrant) FFTW planner and must
/// not race with other plan construction.
class SpectralOperator {
public:
    explicit SpectralOperator(GridPtr grid)
        : grid_(std::move(grid)), n_(grid_->size()), modes_(n_ / 2 + 1), theta_(modes_) {
        const double scale = 2.0 * std::numbers::pi / grid_->length();
        for (int k = 0; k < modes_; ++k) theta_[k] = scale * k;
        theta_[modes_ - 1] = 0.0;  // Nyquist convention

        std::vector<double> ubuf(n_);
        std::vector<std::complex<double>> cbuf(modes_);
        fwd_ = fftw_plan_dft_r2c_1d(n_, ubuf.data(),
                                    reinterpret_cast<fftw_complex*>(cbuf.data()),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_c2r_1d(n_, reinterpret_cast<fftw_complex*>(cbuf.data()),
                                    ubuf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (fwd_ == nullptr || bwd_ == nullptr)
            throw ConfigError("spectral: FFTW plan creation failed");
    }

    ~SpectralOperator() {
        if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
        if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
    }

    SpectralOperator(const SpectralOperator&) = delete;
    SpectralOperator& operator=(const SpectralOperator&) = delete;
    SpectralOperator(SpectralOperator&& o) noexcept
        : grid_(std::move(o.grid_)), n_(o.n_), modes_(o.modes_),
          theta_(std::move(o.theta_)), fwd_(o.fwd_), bwd_(o.bwd_) {
        o.fwd_ = nullptr;
        o.bwd_ = nullptr;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int size() const { return n_; }
    int modes() const { return modes_; }
    const std::vector<double>& wavenumbers() const { return theta_; }

    /// Unnormalized forward transform (input preserved).
    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    /// Backward transform including the 1/N normalization. Clobbers `spec`.
    void inverse(std::complex<double>* spec, double* out) const {
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(spec), out);
        const double inv_n = 1.0 / n_;
        for (int j = 0; j < n_; ++j) out[j] *= inv_n;
    }

    /// Multiply a spectrum by (i theta)^p in place. theta carries a zero in
    /// the Nyquist slot, so that mode is annihilated for every p.
    void apply_symbol(std::complex<double>* spec, int p) const {
        switch (p) {
            case 1:
                for (int k = 0; k < modes_; ++k) spec[k] *= std::complex<double>(0.0, theta_[k]);
                break;
            case 2:
                for (int k = 0; k < modes_; ++k) spec[k] *= -theta_[k] * theta_[k];
                break;
            case 3:
                for (int k = 0; k < modes_; ++k)
                    spec[k] *= std::complex<double>(0.0, -theta_[k] * theta_[k] * theta_[k]);
                break;
            default:
                throw ConfigError("spectral: derivative order must be 1, 2 or 3");
        }
    }

    /// D1^p u via FFT; the result is real by construction of the half-complex
    /// transform pair.
    GridFunction apply_d1(const GridFunction& u, int p = 1) const {
        if (!(u.grid() == *grid_))
            throw GridMismatchError("apply_d1: grid function does not match operator grid");
        if (p < 1 || p > 3) throw ConfigError("apply_d1: derivative order must be 1, 2 or 3");
        std::vector<std::complex<double>> spec(modes_);
        forward(u.data(), spec.data());
        apply_symbol(spec.data(), p);
        GridFunction out(grid_);
        inverse(spec.data(), out.data());
        return out;
    }

    /// Dense N x N realization of D1^p, assembled directly from the inverse
    /// DFT of the symbol (independent of the FFT execution path). Meant as a
    /// cross-check for small N.
    std::vector<double> dense_matrix(int p = 1) const {
        if (p < 1 || p > 3) throw ConfigError("dense_matrix: derivative order must be 1, 2 or 3");
        // Entries depend on (j - m) mod N only.
        std::vector<double> stencil(n_);
        for (int r = 0; r < n_; ++r) {
            std::complex<double> acc(0.0, 0.0);
            for (int k = 1; k < n_ / 2; ++k) {  // Nyquist and DC excluded
                const std::complex<double> sym =
                    std::pow(std::complex<double>(0.0, theta_[k]), p);
                const double phase = 2.0 * std::numbers::pi * k * r / n_;
                acc += sym * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            stencil[r] = 2.0 * acc.real() / n_;  // + conj modes
        }
        std::vector<double> mat(static_cast<size_t>(n_) * n_);
        for (int j = 0; j < n_; ++j)
            for (int m = 0; m < n_; ++m) mat[static_cast<size_t>(j) * n_ + m] = stencil[(j - m + n_) % n_];
        return mat;
    }

private:
    GridPtr grid_;
    int n_;
    int modes_;
    std::vector<double> theta_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace kdv
