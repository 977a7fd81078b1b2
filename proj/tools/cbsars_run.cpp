// Command-line front end for the experiment runner.
//
//   cbsars_run --config run.cfg --out results/ [--mode m] [--seed s] [--set key=value ...]
//
// Exit codes: 0 success, 1 config error, 2 target not reached, 3 invariant violation.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cbsars/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw cbsars::cli::ConfigError("--config", 0, "cannot read '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Comparison-based step-size adaptive randomized search experiments"};
    std::string config_path;
    std::string mode;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--mode", mode, "trajectory | normalized-chain | cr-estimate | invariance-suite | si-check | constant-sigma");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "base seed (overrides the config)");
    app.add_option("--set", overrides, "override one config key, key=value (repeatable)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cbsars::cli::ExitCode::config_error;
    }

    using namespace cbsars::cli;
    try {
        RunConfig config = config_path.empty() ? RunConfig{} : parse_config_partial(read_file(config_path));
        if (!mode.empty()) {
            config.set("mode", mode);
        }
        if (seed) {
            config.set("seed", std::to_string(*seed));
        }
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(kv, 0, "--set expects key=value");
            }
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        config.validate();
        const auto outcome = run_experiment(config, out_dir);
        std::cout << outcome.message << "\n";
        for (const auto& f : outcome.files) {
            std::cout << "  wrote " << f.string() << "\n";
        }
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ExitCode::config_error;
    } catch (const cbsars::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return ExitCode::invariant_violation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::invariant_violation;
    }
}
