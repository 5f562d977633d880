// Command-line front end: code-check / regression / mnist / leverage.
//
// Options layer in order: built-in defaults, then --config file, then
// explicit flags. All stochastic commands require explicit seeds.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "levcode/errors.hpp"
#include "levcode/experiment.hpp"

namespace {

struct RawOptions {
    std::string config_path;
    // flag name in apply_override key form -> value as typed on the command line
    std::map<std::string, std::string> values;
};

void add_common_options(CLI::App* cmd, RawOptions& raw) {
    cmd->add_option("--config", raw.config_path, "key=value config file");
    static const char* keys[] = {
        "n", "k", "d", "rho", "runs", "checks", "limit", "classes", "weighted", "step", "tol",
        "max-iters", "seed-data", "seed-sampler", "seed-straggler", "mnist-images", "mnist-labels",
        "mnist-test-images", "mnist-test-labels", "out"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [&raw, key](const std::string& value) { raw.values[key] = value; });
    }
}

levcode::ExperimentConfig resolve(const RawOptions& raw) {
    levcode::ExperimentConfig cfg;
    if (!raw.config_path.empty()) cfg = levcode::parse_config_file(raw.config_path);
    for (const auto& [key, value] : raw.values) levcode::apply_override(cfg, key, value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"straggler-resilient distributed gradient descent simulator"};
    app.require_subcommand(1);

    RawOptions raw;
    int (*command)(const levcode::ExperimentConfig&, std::ostream&) = nullptr;

    auto* code_check = app.add_subcommand(
        "code-check", "verify the decode identity over responder sets");
    add_common_options(code_check, raw);
    code_check->callback([&] { command = levcode::cmd_code_check; });

    auto* regression = app.add_subcommand(
        "regression", "synthetic linear regression experiment, weighted vs unweighted");
    add_common_options(regression, raw);
    regression->callback([&] { command = levcode::cmd_regression; });

    auto* mnist = app.add_subcommand(
        "mnist", "binary-class logistic regression on local MNIST IDX files");
    add_common_options(mnist, raw);
    mnist->callback([&] { command = levcode::cmd_mnist; });

    auto* leverage = app.add_subcommand(
        "leverage", "emit per-row and per-part leverage scores");
    add_common_options(leverage, raw);
    leverage->callback([&] { command = levcode::cmd_leverage; });

    CLI11_PARSE(app, argc, argv);

    try {
        return command(resolve(raw), std::cout);
    } catch (const levcode::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
