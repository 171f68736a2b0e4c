#pragma once

// Flat key-value configuration (JSON syntax) with whole-file validation:
// every error is reported, unknown keys are rejected, and the validated
// object hashes to a stable 64-bit id used by checkpoints and reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnls/equations.hpp"
#include "dnls/integrate.hpp"

namespace dnls {

struct ModeAmp {
    int k = 0;
    cplx amp;
};

struct ProfileSpec {
    double exponent = 0.0;  // |coeff(k)| = amplitude * <k>^exponent, |k| <= kmax
    int kmax = 0;
    double amplitude = 1.0;
};

struct SimConfig {
    // physical
    double gamma = 0.0;
    int nonlin_sign = +1;
    bool nonlinearity = true;
    std::vector<ModeAmp> f_modes;
    std::optional<ProfileSpec> f_profile;

    // initial data
    std::vector<ModeAmp> u0_modes;
    std::optional<ProfileSpec> u0_profile;
    std::optional<double> u0_scale;  // rescale ||u0|| to this value

    // grid
    int M = 0;
    int N = 0;
    int pad = 2;

    // scheme
    Method method = Method::strang_split;
    std::optional<double> dt;  // default: default_dt(M)
    double horizon = 0.0;
    int store_every = 1;

    // experiment / study parameters
    std::string experiment;
    std::vector<int> n_list;
    int ensemble = 8;
    double burn_in = 0.0;
    std::vector<int> tail_list;
    std::vector<double> hs_list{1.0, 2.0};
    int probes_kmax = 4;
    std::optional<double> a0;

    // space-time lattice studies
    int trials = 100;
    int L = 64;
    double window = two_pi;
    double eps = 1.0 / 16.0;
    std::vector<int> N_list;

    // io
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};
    long long checkpoint_every = 0;  // 0: final checkpoint only

    double dt_value() const { return dt ? *dt : default_dt(M); }
    SchemeSpec scheme() const;
    GridSpec grid() const { return GridSpec{M, N, pad}; }
};

struct ParseResult {
    std::optional<SimConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty() && config.has_value(); }
};

ParseResult parse_config(const std::string& text);

// Canonical serialization of the validated config (sorted keys, defaults
// materialized); hash is FNV-1a over those bytes.
std::string canonical_config(const SimConfig& cfg);
std::uint64_t config_hash(const SimConfig& cfg);

// Deterministic realizations on the configured grid.
SpectralField build_forcing(const SimConfig& cfg);
SpectralField build_initial(const SimConfig& cfg, std::uint64_t member = 0);
PhysParams build_phys(const SimConfig& cfg);

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h = 0xcbf29ce484222325ull);

}  // namespace dnls
