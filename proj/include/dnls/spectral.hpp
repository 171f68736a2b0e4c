#pragma once

// Fourier-collocation representation of 2pi-periodic complex fields.
//
// Conventions, used consistently by every module:
//   forward:  u_hat(k) = (1/M) sum_j u(x_j) e^{-i k x_j},  x_j = 2 pi j / M
//   inverse:  u(x_j)   = sum_k u_hat(k) e^{i k x_j}
//   storage:  centered wavenumbers k in [-M/2, M/2), index i = k + M/2,
//             the k = -M/2 (Nyquist) coefficient is pinned to zero
//   norms:    ||u||_{H^s}^2 = 2 pi sum_k <k>^{2s} |u_hat(k)|^2, so that the
//             s = 0 case equals the physical integral of |u|^2 over the torus

#include <span>
#include <string>
#include <vector>

#include "dnls/util.hpp"

namespace dnls {

struct GridSpec {
    int M = 0;    // collocation size, even
    int N = 0;    // low/high cutoff: low keeps |k| <= N
    int pad = 2;  // padding factor for cubic pointwise products

    void validate() const;  // throws std::invalid_argument
};

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(int M) : M_(M), c_(static_cast<size_t>(M)) {}

    static SpectralField from_mode(int M, int k, cplx amp);

    int size() const { return M_; }
    bool empty() const { return M_ == 0; }

    int min_wavenumber() const { return -M_ / 2; }
    int max_wavenumber() const { return M_ / 2 - 1; }

    cplx& at(int k) { return c_[static_cast<size_t>(k + M_ / 2)]; }
    const cplx& at(int k) const { return c_[static_cast<size_t>(k + M_ / 2)]; }

    std::span<cplx> coeffs() { return c_; }
    std::span<const cplx> coeffs() const { return c_; }

    bool finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx s);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

private:
    int M_ = 0;
    std::vector<cplx> c_;
};

enum class Band { low, high };

struct ConjMask {
    bool a = false;
    bool b = false;
    bool c = false;
};

// Forward collocation transform of M samples at x_j = 2 pi j / M.
// Rejects non-finite input; pins the Nyquist coefficient to zero.
SpectralField transform_forward(std::span<const cplx> samples);

// Synthesis at the M collocation points; exact inverse of transform_forward.
std::vector<cplx> transform_inverse(const SpectralField& f);

// Synthesis on a finer grid of n >= M points (same trigonometric polynomial).
std::vector<cplx> synthesize(const SpectralField& f, int n);

// P_N (low: |k| <= N) and Q_N (high: |k| > N). low + high = identity, bit-exact.
SpectralField project(const SpectralField& f, int N, Band part);

// sqrt(2 pi sum <k>^{2s} |u_hat|^2); s = 0 gives the physical L^2 norm.
double sobolev_norm(const SpectralField& f, double s);

// ||u||_{L^2}^2 = 2 pi sum |u_hat|^2 (compensated).
double l2_norm_sq(const SpectralField& f);

// <u, phi> = integral of u conj(phi) = 2 pi sum u_hat conj(phi_hat).
cplx pairing(const SpectralField& u, const SpectralField& phi);

// Dealiased pointwise triple product: factors optionally conjugated, evaluated
// on a pad*M grid and truncated back to M modes. For pad >= 2 the retained
// band is alias-free for any representable inputs.
SpectralField cubic_product(const SpectralField& a, const SpectralField& b,
                            const SpectralField& c, ConjMask mask, int pad = 2);

// |u|^2 u; same contract as cubic_product(u, u, u, {.c = true}) but with a
// single synthesis pass.
SpectralField cubic_self(const SpectralField& u, int pad = 2);

namespace detail {
// Unnormalized DFT, sign = -1 forward / +1 backward, FFTW-backed, thread-safe.
void dft(int n, const cplx* in, cplx* out, int sign);
}  // namespace detail

}  // namespace dnls
