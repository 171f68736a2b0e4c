#pragma once

// Persistence: bit-exact binary checkpoints (raw coefficient bits, integrity
// checksum, config-hash guard) and diagnostic exports (CSV and JSON mirrors,
// 17-significant-digit floats). All artifact writes are temp-file + rename.

#include <filesystem>
#include <string>

#include "dnls/config.hpp"
#include "dnls/integrate.hpp"

namespace dnls {

struct Checkpoint {
    std::uint64_t config_hash = 0;
    long long step = 0;
    StateVariant state;
    SpectralField aux_z;  // decomposition runs only (empty otherwise)
};

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One row per sample: t, l2_sq, h{s}..., energy_residual, tail_N{N}...,
// pairing_{id}_re, pairing_{id}_im. Fixed order, documented header line.
void export_csv(const Trajectory& traj, const std::filesystem::path& path);
void export_json(const Trajectory& traj, const std::filesystem::path& path);
void export_timeseries(const Trajectory& traj, const std::string& format,
                       const std::filesystem::path& path);

// temp + rename so interrupted runs never leave partial artifacts
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace dnls
