#pragma once

// Experiment runner behind the command-line tool.
//
// Config format: one `key=value` per line, `#` starts a comment, blank lines
// are ignored. Keys:
//
//   mode                 trajectory | normalized-chain | cr-estimate |
//                        invariance-suite | si-check | constant-sigma
//   algorithm            csa | xnes | sa | oneplusone | constant (| all for invariance-suite)
//   algorithm.kappa_m, algorithm.kappa_sigma, algorithm.p, algorithm.p_target, algorithm.tau
//   objective            registry name, see objectives::parse_objective (| all for invariance-suite)
//   n                    dimension
//   x0                   scalar fill (0.8) or n comma-separated values
//   sigma0               initial (or, for constant-sigma, fixed) step-size
//   seed, replicates, max_evals, target_f, require_target
//   steps, burn_in       normalized-chain and cr-estimate
//   stride               keep every stride-th trace row
//   horizon              invariance-suite iterations per pair
//   trials               si-check pairs

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbsars/algorithms.hpp"
#include "cbsars/core.hpp"

namespace cbsars::cli {

enum class Mode { trajectory, normalized_chain, cr_estimate, invariance_suite, si_check, constant_sigma };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

/// A config problem. key() names the offending field; line() is 0 for
/// overrides and whole-config checks.
class ConfigError : public InvalidInput {
public:
    ConfigError(std::string key, std::size_t line, const std::string& message);

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

struct RunConfig {
    Mode mode = Mode::trajectory;
    std::string algorithm;
    algorithms::AlgorithmOptions algorithm_options;
    std::string objective;
    Eigen::Index n = 0;
    std::vector<double> x0{0.8};  ///< one value means fill
    double sigma0 = 1.0;
    std::optional<std::uint64_t> seed;
    std::size_t replicates = 1;
    std::size_t max_evals = 1'000'000;
    std::optional<double> target_f;
    bool require_target = false;
    std::size_t steps = 100'000;
    std::optional<std::size_t> burn_in;
    std::optional<std::size_t> stride;  ///< unset: 1, or max_evals / 10^4 for constant-sigma
    std::size_t horizon = 1000;
    int trials = 1000;

    /// Sets one key from its text value. Throws ConfigError naming key and line.
    void set(std::string_view key, std::string_view value, std::size_t line = 0);

    /// Whole-config checks (required keys, cross-field constraints).
    void validate() const;

    Vector start_point() const;

    std::size_t resolved_stride() const;

    /// Candidates per iteration after auto-sizing (4 + floor(3 ln n) for comma and SA).
    std::size_t population() const;

    /// The resolved config as space-separated key=value pairs.
    std::string describe() const;
};

/// Parses and validates the key=value text. Later keys may not repeat earlier ones.
RunConfig parse_config(std::string_view text);

/// Parses without the final validate(), so overrides can still be applied.
RunConfig parse_config_partial(std::string_view text);

enum ExitCode : int { ok = 0, config_error = 1, target_not_reached = 2, invariant_violation = 3 };

struct ExperimentOutcome {
    int exit_code = ExitCode::ok;
    std::vector<std::filesystem::path> files;
    std::string message;  ///< one-paragraph human summary
};

/// Runs the configured mode and writes CSV files under `out_dir`: one trace per
/// replicate (trace_<r>.csv) and summary.csv. Every file starts with a header
/// row and a `# config ...` row. Throws ConfigError for invalid configs.
ExperimentOutcome run_experiment(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace cbsars::cli
