#pragma once

// Right-hand sides and closed-form objects for the damped-driven cubic
// Schroedinger flow on the torus:
//
//   full:          u_t = -i u_xx - gamma u - i s |u|^2 u + f
//   renormalized:  Lambda(u) = |u|^2 u - (1/pi) ||u||_{L^2}^2 u
//   modified:      v_t = -i v_xx - gamma v - i s |v|^2 v - (i/pi)(a - ||v||^2) v + f
//                  a'  = -2 gamma a + 2 Re<f, v>
//   low/high split of u = v + w at cutoff N, the companion z-equation, and
//   the steady state g of the linear damped-driven flow.

#include "dnls/spectral.hpp"

namespace dnls {

struct PhysParams {
    double gamma = 0.0;
    SpectralField forcing;      // time-independent, on the working grid
    int nonlin_sign = +1;       // sign s of the cubic term
    bool cubic_enabled = true;  // false: linear damped-driven flow only

    void validate() const;  // gamma > 0, finite forcing, sign in {-1,+1}
};

struct ModifiedState {
    SpectralField v;
    double a = 0.0;  // carried scalar, a >= 0
};

struct ModifiedRhs {
    SpectralField dv;
    double da = 0.0;
};

struct DecompState {
    SpectralField v;
    SpectralField w;
    int cutoff = 0;  // N of the low/high split
};

struct DecompRhs {
    SpectralField dv;
    SpectralField dw;
};

SpectralField rhs_full(const SpectralField& u, const PhysParams& p, int pad = 2);

// Wick-ordered cubic term; removes the resonant mean-intensity rotation.
SpectralField wick_lambda(const SpectralField& u, int pad = 2);

ModifiedRhs rhs_modified(const ModifiedState& s, const PhysParams& p, int pad = 2);

// Coupled system for u = v + w; dv + dw telescopes to rhs_full(v + w).
DecompRhs rhs_decomposition(const DecompState& s, const PhysParams& p, int pad = 2);

// z_t = -i z_xx - gamma z - i s Q_N(|v|^2 v), z supported in |k| > N.
// Rejects z with low-frequency content.
SpectralField rhs_z(const SpectralField& z, const SpectralField& v, int N,
                    const PhysParams& p, int pad = 2);

// g_hat(k) = f_hat(k) / (-i k^2 + gamma): equilibrium of the linear flow.
SpectralField steady_state_g(const SpectralField& f, double gamma);

}  // namespace dnls
