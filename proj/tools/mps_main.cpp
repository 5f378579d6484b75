#include <cstdio>
#include <cstdlib>
#include <thread>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mps/io.hpp"
#include "mps/transform.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommandOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
};

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("MPS_THREADS")) {
        const int threads = std::atoi(env);
        const int autodetect = int(std::thread::hardware_concurrency());
        mps::set_fft_threads(threads <= 0 ? std::max(1, autodetect) : threads);
    }

    CLI::App app{"mps: pseudo-spectral solver and verification harness for the stationary "
                 "micropolar system"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "solve the regularized fixed-point problem and write a snapshot"},
        {"verify", "audit residuals, energy ledger and trilinear pairings on a snapshot"},
        {"liouville", "evaluate the localized ledger and annulus decay tables"},
        {"sweep", "run the (epsilon, R) continuation and the lambda homotopy scan"},
    };

    std::map<std::string, CommandOptions> options;
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        auto& opt = options[name];
        sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
        sub->add_option("--set", opt.overrides, "override a config key, e.g. params.epsilon=0.25");
        sub->add_option("--out", opt.out_dir, "output directory (overrides run.output_dir)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    const CommandOptions& opt = options[command];

    try {
        std::string text = read_file(opt.config_path);
        text = mps::apply_override(text, "run.command=\"" + command + "\"");
        for (const auto& assignment : opt.overrides) text = mps::apply_override(text, assignment);
        if (!opt.out_dir.empty())
            text = mps::apply_override(text, "run.output_dir=\"" + opt.out_dir + "\"");
        const mps::Config config = mps::parse_config(text);
        return mps::run(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"status\":\"input_error\",\"error\":\"%s\"}\n", e.what());
        return 1;
    }
}
