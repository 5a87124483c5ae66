#pragma once

// End-to-end quench experiment: prepare, evolve, measure, estimate, mitigate and
// compare against the free-fermion oracle over a time grid.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sshq/config.hpp"
#include "sshq/observables.hpp"
#include "sshq/randmeas.hpp"

namespace sshq {

inline constexpr const char* kArtifactVersion = "sshq 0.1.0";

struct RunOptions {
    /// 0 = hardware concurrency.
    unsigned threads = 1;
    /// Infinite-shot mode: exact Pauli-design averages replace sampled unitaries and shots.
    bool exact_probabilities = false;
};

struct EntropyPoint {
    double t = 0.0;
    std::optional<double> raw;
    std::optional<double> mitigated;
    double oracle = 0.0;
    std::optional<double> sigma;
    std::vector<std::string> flags;

    int n_layers = 0;
    double p_tot_true = 0.0;
    double p_tot_estimated = 0.0;
    double full_purity = 0.0;
    /// Subsystem purity for both estimator variants (equal in exact mode).
    double purity_unbiased = 0.0;
    double purity_plugin = 0.0;
    double sigma_unbiased = 0.0;
    double sigma_plugin = 0.0;
};

struct TwistPoint {
    double t = 0.0;
    TwistResult spin_raw, spin_post, spin_exact;
    TwistResult particle_raw, particle_post, particle_exact;
    bool post_empty = false;
    std::uint64_t rejected = 0;
    int n_layers = 0;
    double p_tot_true = 0.0;
};

struct QuenchRun {
    InitialState initial = InitialState::Neel;
    std::vector<EntropyPoint> entropy;
    std::vector<TwistPoint> twist;
    double shift_offset = 0.0;
    /// Shot data by time index, kept only when save_shots is set.
    std::vector<std::vector<ShotTable>> shots;
    std::vector<Counts> twist_shots;
};

struct ExperimentResult {
    std::vector<QuenchRun> runs;
};

/// Runs every configured initial state. The configuration must already be validated.
/// Output is bitwise independent of options.threads.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes CSVs, the manifest and optional shot/circuit files. With several initial
/// states each gets a subdirectory named after it.
void write_experiment(const ExperimentConfig& config, const ExperimentResult& result, const std::filesystem::path& out_dir,
                      const RunOptions& options = {});

/// Oracle entropy of `subset` (0-based): free-fermion block entropy for contiguous
/// blocks, exact reduced-state purity otherwise.
double oracle_entropy(InitialState initial, double t, int L, Boundary boundary, std::span<const int> subset, EvolutionMode mode);

/// Directory that holds the files of one initial state.
std::filesystem::path run_directory(const ExperimentConfig& config, const std::filesystem::path& out_dir, InitialState initial);

} // namespace sshq
