#pragma once

// Discrete surrogates for the space-time restriction-norm machinery: weighted
// lattice norms, the L^4 / X^{3/8,0} ratio, the Schroedinger resonance
// identity, and the high-frequency damping scaling experiment.
//
// A SpaceTimeField holds spatial Fourier coefficients at L equispaced time
// samples spanning [0, T). Dual time frequencies live on tau_j = (2 pi / T) j,
// j in [-L/2, L/2). Restriction-norm infima are not computed; windowed
// surrogates (cosine taper) stand in for them.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dnls/spectral.hpp"

namespace dnls {

struct SpaceTimeField {
    int L = 0;       // time samples, even
    int M = 0;       // spatial modes, even (centered, Nyquist pinned)
    double T = 0.0;  // window length

    std::vector<cplx> vals;  // vals[m * M + (k + M/2)]

    SpaceTimeField() = default;
    SpaceTimeField(int L_, int M_, double T_);

    cplx& at(int m, int k) { return vals[static_cast<size_t>(m) * M + (k + M / 2)]; }
    const cplx& at(int m, int k) const {
        return vals[static_cast<size_t>(m) * M + (k + M / 2)];
    }
    double time(int m) const { return T * m / L; }
};

// Two sides of the resonance identity. With tau = {tau, tau1, tau2, tau3},
// tau = tau1 + tau2 + tau3, the factor equals the modulus bound exactly.
double resonance_factor(long long k1, long long k2, long long k3,
                        const std::array<double, 4>& tau);
long long modulus_bound(long long k1, long long k2, long long k3);

// || <tau + k^2>^b <k>^s u_hat ||, scaled so b = s = 0 gives the space-time
// L^2 norm of the window.
double xbs_norm(const SpaceTimeField& F, double b, double s);

// L^4 norm over the window (rectangle rule in time, dealiased in space).
double l4_norm(const SpaceTimeField& F, int pad = 2);

// ||F||_{L^4} / ||F||_{X^{3/8,0}}; rejects the zero field.
double l4_ratio(const SpaceTimeField& F);

// Tukey-style taper: cosine ramps of width_fraction * T at both window ends.
void apply_cosine_taper(SpaceTimeField& F, double width_fraction);

// V(t) phi sampled on the lattice: phi_hat(k) e^{-i k^2 t_m}.
SpaceTimeField free_evolution(const SpectralField& phi, int L, double T);

// Spatial band projection applied samplewise.
SpaceTimeField st_project(const SpaceTimeField& F, int N, Band part);

// Exact pointwise product A * B * conj(C) computed on a 2x padded lattice in
// both directions and restricted to the original tau/k bands.
SpaceTimeField st_triple_product(const SpaceTimeField& A, const SpaceTimeField& B,
                                 const SpaceTimeField& C);

struct DampingPoint {
    int N = 0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
};

struct DampingReport {
    std::vector<DampingPoint> points;
    double slope = 0.0;  // log median_ratio vs log N
    double eps = 0.0;
    int trials = 0;
};

// ratio(N) = ||P_{N/2}u1 P_{N/2}u2 conj(Q_N u3)||_{X^{-1/2+eps,0}} over unit
// X^{1/2,0} trial fields; slope of the log-log median fit is returned.
DampingReport damping_scaling(std::span<const int> N_list, int trials,
                              std::uint64_t seed, int M, int L, double T,
                              double eps = 1.0 / 16.0);

// Random field with unit X^{1/2,0} norm (Gaussian coefficients shaped by the
// <tau + k^2>^{-1/2} weight, then normalized exactly).
SpaceTimeField random_unit_xhalf(int L, int M, double T, std::uint64_t seed);

}  // namespace dnls
