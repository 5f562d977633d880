#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace levcode {

/// Flat experiment configuration. Populated from a key=value config file
/// and/or command-line overrides; defaults follow the reference experiments
/// (n=50, k=20, d=30). Seeds have no entropy defaults: every command
/// validates that the seeds it consumes were given explicitly, otherwise the
/// stochastic results would not be checkable.
struct ExperimentConfig {
    std::size_t n = 50;
    std::size_t k = 20;
    std::size_t d = 30;
    std::vector<std::size_t> rhos = {2};

    std::optional<std::uint64_t> seed_data;
    std::optional<std::uint64_t> seed_sampler;
    std::optional<std::uint64_t> seed_straggler;

    std::optional<double> step;            // default 1e-7 (regression), 1e-5 (mnist)
    std::optional<double> grad_tol;        // default 0.1 (regression), 5.0 (mnist)
    std::optional<std::size_t> max_iters;  // default 5000 (regression), 2000 (mnist)

    std::string weighted = "both";  // on | off | both
    std::size_t runs = 20;
    std::size_t checks = 100;  // sampled responder sets for code-check
    std::size_t limit = 10000;
    std::pair<int, int> classes = {4, 9};

    std::string mnist_images;
    std::string mnist_labels;
    std::string mnist_test_images;
    std::string mnist_test_labels;
    std::string out_dir = ".";
};

ExperimentConfig parse_config_file(const std::string& path);

/// Apply one key=value override (same keys as the config file). Unknown keys
/// or unparsable values raise InvalidInputError.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Stable serialization of every field, and its FNV-1a 64-bit digest. The
/// digest is stamped into every summary CSV so outputs are traceable to the
/// exact configuration that produced them.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

// Commands behind the CLI subcommands. Each writes CSV files under
// cfg.out_dir, logs a short human-readable summary, and returns 0 on
// success. Configuration and data errors are thrown.
int cmd_code_check(const ExperimentConfig& cfg, std::ostream& log);
int cmd_regression(const ExperimentConfig& cfg, std::ostream& log);
int cmd_mnist(const ExperimentConfig& cfg, std::ostream& log);
int cmd_leverage(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace levcode
