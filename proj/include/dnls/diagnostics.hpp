#pragma once

// Post-processing of trajectories: the quantities the dissipation estimates
// constrain. Pure functions over immutable trajectories.

#include <span>

#include "dnls/integrate.hpp"

namespace dnls {

struct ResidualReport {
    std::vector<double> per_interval;  // residual of [t_m, t_{m+1}], one per gap
    double max_per_unit_time = 0.0;
    double mean_per_unit_time = 0.0;
};

// Balance of d/dt ||u||^2 + 2 gamma ||u||^2 = 2 Re<f, u> over each sampled
// interval, with trapezoid quadrature on the stored samples.
ResidualReport energy_residual(const Trajectory& traj, const PhysParams& p);

// Convenience: copy the per-interval residuals into the records (slot on the
// sample that closes the interval).
void fill_energy_residuals(Trajectory& traj, const PhysParams& p);

struct AbsorbingReport {
    double M0 = 0.0;            // 2 ||f|| / gamma
    int violations = 0;         // samples beyond the decay envelope + tolerance
    double max_excess = 0.0;    // worst (||u||^2 - envelope), clipped at 0
    double entry_time = -1.0;   // first sample with ||u|| <= M0; -1 if never
    bool persistent = false;    // stayed within M0 (1 + 1e-6) after entry
};

AbsorbingReport absorbing_check(const Trajectory& traj, const SpectralField& u0,
                                const PhysParams& p);

struct EquicontinuityReport {
    double modulus = 0.0;  // sup over sample pairs of |Delta ||u||^2| / |Delta t|
    double bracket = 0.0;  // 3 gamma sup ||u||^2 + ||f||^2 / gamma from the run
};

EquicontinuityReport equicontinuity_modulus(const Trajectory& traj, const PhysParams& p);

// epsilon(N) = ||Q_N field|| for each cutoff; non-increasing in N.
std::vector<std::pair<int, double>> tail_profile(const SpectralField& field,
                                                 std::span<const int> cutoffs);

// <u, probe> = integral of u conj(probe); conjugate-symmetric, sesquilinear.
cplx weak_pairing(const SpectralField& u, const SpectralField& probe);

struct DecayFit {
    double rate = 0.0;           // slope of log ||w|| vs t
    double log_prefactor = 0.0;  // intercept at t = 0
    int points_used = 0;         // samples above the resolution floor
};

// Least-squares fit of log(series) vs t; values below 1e-12 are censored.
DecayFit decay_fit(std::span<const double> times, std::span<const double> values);

}  // namespace dnls
