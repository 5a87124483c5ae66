#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sshq/config.hpp"
#include "sshq/experiment.hpp"
#include "sshq/report.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;

std::filesystem::path default_output(const std::filesystem::path& config) {
    const char* root = std::getenv("SSHQ_OUTPUT_ROOT");
    const std::filesystem::path base = root && *root ? std::filesystem::path(root) : std::filesystem::path("runs");
    return base / config.stem();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flat-band SSH quench simulator with randomized-measurement estimators"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool exact = false;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Configuration file")->required();
    run->add_option("--out", out_dir, "Output directory (default: $SSHQ_OUTPUT_ROOT/<config name>, or runs/<config name>)");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    run->add_flag("--exact-probabilities", exact, "Infinite-shot mode: exact design averages instead of sampling");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Summarize deviations from the oracle columns of a finished run");
    report->add_option("dir", report_dir, "Run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*run) {
            auto cfg = sshq::load_config(config_path);
            if (seed) cfg.seed = *seed;
            const std::filesystem::path out = out_dir.empty() ? default_output(config_path) : std::filesystem::path(out_dir);
            sshq::RunOptions opts{threads, exact};
            const auto result = sshq::run_experiment(cfg, opts);
            sshq::write_experiment(cfg, result, out, opts);
            fmt::print("wrote {}\n", out.string());
            return 0;
        }
        const auto rep = sshq::compare_report(report_dir);
        std::cout << rep.text;
        return 0;
    } catch (const sshq::CapacityError& e) {
        fmt::print(stderr, "capacity error: {}\n", e.what());
        return kExitCapacity;
    } catch (const sshq::InputError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        fmt::print(stderr, "fatal: {}\n", e.what());
        return kExitFailure;
    }
}
