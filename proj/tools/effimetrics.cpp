// effimetrics <hurst|apen|predict|pipeline|synth|scatter> [--config FILE]
//             [--out DIR] [--seed N] [--set key=value ...] [inputs ...]

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "report.hpp"

namespace {

void print_diagnostic(const std::string& command, const std::string& kind, const std::string& message)
{
    effimetrics::report::Json diag;
    diag["status"] = "error";
    diag["command"] = command;
    diag["kind"] = kind;
    diag["message"] = message;
    std::cerr << diag.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Market efficiency (DFA Hurst, ApEn) and nearest-neighbour prediction power"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::vector<std::string> overrides;
    std::vector<std::string> inputs;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"hurst", "DFA Hurst exponent per estimation window"},
        {"apen", "Approximate entropy per estimation window"},
        {"predict", "Walk-forward nearest-neighbour hit rates and per-day traces"},
        {"pipeline", "Rolling H, ApEn and hit rate per market plus cross-market correlations"},
        {"synth", "Generate a synthetic price panel as CSV files"},
        {"scatter", "Scatter data (x,y,label) from a pipeline summary"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "flat key=value configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed (unsigned 64-bit)");
        sub->add_option("--set", overrides, "override a configuration key (key=value)");
        sub->add_option("inputs", inputs, "price CSV files (date,close)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        effimetrics::KeyValueConfig kv;
        if (!config_path.empty()) {
            kv = effimetrics::KeyValueConfig::load(config_path);
        }
        for (const auto& o : overrides) {
            kv.set(std::string_view(o));
        }
        if (!out_dir.empty()) {
            kv.set("out", out_dir);
        }
        if (!seed.empty()) {
            kv.set("seed", seed);
        }
        if (!inputs.empty()) {
            std::string joined;
            for (const auto& i : inputs) {
                joined += (joined.empty() ? "" : ",") + i;
            }
            kv.set("inputs", joined);
        }
        const effimetrics::RunConfig rc = effimetrics::to_run_config(kv);
        return effimetrics::report::run_command(command, rc);
    } catch (const effimetrics::report::DegenerateWindow& e) {
        print_diagnostic(command, "degenerate_window", e.what());
        return 3;
    } catch (const effimetrics::ConfigError& e) {
        print_diagnostic(command, "config", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_diagnostic(command, "rejected", e.what());
        return 1;
    }
}
