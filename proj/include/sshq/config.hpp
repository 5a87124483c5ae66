#pragma once

// Experiment configuration: line-oriented `key = value` text with `#` comments.
// See README.md for the full schema.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sshq/circuit.hpp"
#include "sshq/randmeas.hpp"

namespace sshq {

/// Invalid configuration; `line` is 0 when the problem is not tied to one line.
class ConfigError : public InputError {
  public:
    ConfigError(const std::string& source, int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    int line_;
    std::string field_;
};

enum class ShiftChoice { None, ZeroAtT0, ValleyToZero };
enum class PTotSource {
    /// Per time point from the measured full-system purity.
    Estimated,
    /// The simulator's own p_tot (validation aid).
    True,
};

struct OutputSelection {
    bool entropy = true;
    bool twist = true;
    bool berry = true;
};

struct ExperimentConfig {
    int L = 4;
    Boundary boundary = Boundary::Periodic;
    std::vector<InitialState> initials{InitialState::Neel};
    std::vector<double> times;
    /// 0-based qubits; empty selects sites 1..L/2.
    std::vector<int> subsystem;
    int n_unitaries = 100;
    std::uint64_t n_shots = 4096;
    /// Identity-basis shots for the twist observables; 0 means n_shots.
    std::uint64_t twist_shots = 0;
    double p_layer = 0.0;
    double readout_flip = 0.0;
    EstimatorVariant estimator = EstimatorVariant::Unbiased;
    bool mitigate = true;
    PTotSource p_tot_source = PTotSource::Estimated;
    ShiftChoice shift = ShiftChoice::None;
    EvolutionMode evolution = EvolutionMode::Decomposed;
    OutputSelection outputs;
    bool save_shots = false;
    bool dump_circuit = false;
    std::uint64_t seed = 1;
    int q_spin = 1;
    int q_particle = 2;

    /// Line on which each key was set (for validation messages).
    std::map<std::string, int> key_lines;
    std::string source = "<config>";

    std::vector<int> resolved_subsystem() const;
    std::uint64_t resolved_twist_shots() const { return twist_shots ? twist_shots : n_shots; }
    QuenchSpec quench(InitialState initial) const;

    /// Throws ConfigError naming the field, or CapacityError for L > 24.
    void validate() const;
    /// Canonical `key = value` text that parses back to the same configuration.
    std::string to_text() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Evaluates `pi`, numbers, and products/quotients of them such as `3*pi/8`.
double parse_time_expression(const std::string& text);

std::string to_string(ShiftChoice s);
std::string to_string(EstimatorVariant v);

} // namespace sshq
