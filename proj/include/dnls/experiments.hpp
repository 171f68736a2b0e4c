#pragma once

// Scripted end-to-end scenarios with pass/fail summaries. Each experiment is
// a pure function of (config, seed): re-running reproduces the report
// bit-identically. Reports and per-trajectory diagnostics are written under
// the configured output directory.

#include <json.hpp>

#include "dnls/config.hpp"
#include "dnls/diagnostics.hpp"

namespace dnls {

struct CheckRecord {
    std::string claim;    // what is being checked, by name
    double measured = 0.0;
    double bound = 0.0;   // threshold/target the measurement is held against
    bool pass = false;
    std::string note;
};

struct ExperimentReport {
    std::string name;
    nlohmann::ordered_json config_snapshot;
    std::vector<CheckRecord> checks;
    std::vector<std::string> artifacts;
    bool inconclusive = false;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
    void write(const std::filesystem::path& dir) const;
};

ExperimentReport run_absorbing_ball(const SimConfig& cfg);
ExperimentReport run_weak_limit(const SimConfig& cfg);
ExperimentReport run_decomposition(const SimConfig& cfg);
ExperimentReport run_smoothing(const SimConfig& cfg);

// Dispatch by name ("absorbing_ball", "weak_limit", "decomposition",
// "smoothing"); throws std::invalid_argument for unknown names.
ExperimentReport run_experiment(const std::string& name, const SimConfig& cfg);

// The probe family used for weak pairings: e^{ikx} for |k| <= kmax plus the
// constant mode (k = 0).
std::vector<std::pair<std::string, SpectralField>> probe_family(int M, int kmax);

// Attractor proxy: burn-in run of the full equation from the configured u0.
SpectralField attractor_proxy(const SimConfig& cfg, std::uint64_t member = 0);

}  // namespace dnls
