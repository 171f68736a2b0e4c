#pragma once

// Time integration with the diagonal linear semigroup e^{(i k^2 - gamma) t}
// and the constant forcing treated exactly per mode (Duhamel), composed with
// the cubic sub-flow by Strang splitting.
//
// The cubic sub-flow u_t = -i s |u|^2 u is solved exactly at collocation
// points: u <- u e^{-i s |u|^2 dt}. The phase map is evaluated on an odd
// (M-1)-point grid, which carries the Nyquist-free mode set losslessly, so
// the sub-step is an exact isometry of the state space.

#include <stdexcept>
#include <variant>
#include <vector>

#include "dnls/equations.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

enum class Method { strang_split, etd_rk2, rk4_reference };

struct SchemeSpec {
    Method method = Method::strang_split;
    double dt = 0.0;
    double horizon = 0.0;
    int store_every = 1;

    void validate() const;
    long long total_steps() const;
};

// Resolution-aware default: min(1e-3, 0.1 * 2 pi / M^2).
double default_dt(int M);

struct DiagnosticsSpec {
    std::vector<double> hs_list;                                 // H^s norms to record
    std::vector<std::pair<std::string, SpectralField>> probes;   // pairing probes
    std::vector<int> tail_cutoffs;                               // ||Q_N u|| to record
};

struct DiagnosticRecord {
    double t = 0.0;
    double l2_sq = 0.0;
    std::vector<std::pair<double, double>> hs_norms;   // (s, ||u||_{H^s})
    std::vector<std::pair<std::string, cplx>> pairings;
    std::vector<std::pair<int, double>> tail;          // (N, ||Q_N u||)
    double energy_residual = 0.0;  // of the interval ending at this sample
};

using StateVariant = std::variant<SpectralField, ModifiedState, DecompState>;

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVariant> states;
    std::vector<DiagnosticRecord> diagnostics;
    std::vector<SpectralField> aux_z;  // decomposition runs: companion z per sample

    size_t samples() const { return times.size(); }
    // The field the diagnostics refer to: u, v (modified), or v + w.
    SpectralField primary_field(size_t i) const;
};

class BlowupError : public std::runtime_error {
public:
    BlowupError(double t, double norm);
    double t;
    double norm;
};

// Exact per-mode solution of u_hat' = (i k^2 - gamma) u_hat + f_hat over dt.
SpectralField linear_step(const SpectralField& u, double dt, const PhysParams& p,
                          bool with_forcing);

// Exact collocation phase map of the cubic sub-flow; preserves |u(x_j)| and
// hence the L^2 norm.
SpectralField nonlinear_step(const SpectralField& u, double dt, int sign);

struct AValueTable {
    std::vector<double> t;
    std::vector<double> a;
    double eval(double time) const;  // piecewise linear, clamped ends
};

struct IntegrateOptions {
    DiagnosticsSpec diag;
    double blowup_factor = 1e6;
    int pad = 2;
    long long start_step = 0;           // resume support: times are step*dt
    const AValueTable* a_table = nullptr;  // modified runs: tabulated a(t)
};

Trajectory integrate_full(const SpectralField& u0, const PhysParams& p,
                          const SchemeSpec& scheme, const IntegrateOptions& opt = {});

Trajectory integrate_modified(const ModifiedState& s0, const PhysParams& p,
                              const SchemeSpec& scheme, const IntegrateOptions& opt = {});

// Evolves (v, w) so that v + w reproduces the full-equation step map, and
// co-evolves z from z(0) = Q_N v(0) - g_N with source kicks at shared nodes.
Trajectory integrate_decomposition(const DecompState& s0, const PhysParams& p,
                                   const SchemeSpec& scheme, const IntegrateOptions& opt = {});

// z-equation driven by a fixed field v (e.g. 0 or the steady state).
Trajectory integrate_z_const_v(const SpectralField& z0, const SpectralField& v, int N,
                               const PhysParams& p, const SchemeSpec& scheme,
                               const IntegrateOptions& opt = {});

}  // namespace dnls
