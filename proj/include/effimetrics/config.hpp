#ifndef EFFIMETRICS_CONFIG_HPP
#define EFFIMETRICS_CONFIG_HPP

// Flat `key = value` run configuration. Lines starting with '#' are comments.
// Later assignments (including command-line overrides) replace earlier ones.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "effimetrics/csv_io.hpp"
#include "effimetrics/pipeline.hpp"
#include "effimetrics/synthetic.hpp"

namespace effimetrics {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>")
    {
        KeyValueConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string_view row = detail::trim(line);
            if (row.empty() || row.front() == '#') {
                continue;
            }
            try {
                cfg.set(row);
            } catch (const ConfigError& e) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config '" + path.string() + "'");
        }
        return parse(in, path.string());
    }

    /// Applies one `key=value` assignment.
    void set(std::string_view assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
        }
        const std::string key(detail::trim(assignment.substr(0, eq)));
        if (key.empty()) {
            throw ConfigError("empty key in '" + std::string(assignment) + "'");
        }
        values_[key] = std::string(detail::trim(assignment.substr(eq + 1)));
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    template <typename T>
    T get_number(const std::string& key, T fallback) const
    {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        T out{};
        if (!detail::parse_number(std::string_view(it->second), out)) {
            throw ConfigError("key '" + key + "': cannot parse '" + it->second + "' as a number");
        }
        return out;
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        if (it->second == "true" || it->second == "1" || it->second == "yes") {
            return true;
        }
        if (it->second == "false" || it->second == "0" || it->second == "no") {
            return false;
        }
        throw ConfigError("key '" + key + "': expected a boolean, got '" + it->second + "'");
    }

    std::vector<std::string> get_list(const std::string& key) const
    {
        std::vector<std::string> out;
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return out;
        }
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string_view t = detail::trim(item);
            if (!t.empty()) {
                out.emplace_back(t);
            }
        }
        return out;
    }

    std::vector<std::string> unknown_keys(const std::set<std::string>& known) const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_) {
            if (known.count(k) == 0) {
                out.push_back(k);
            }
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
};

enum class WindowMode { rolling, full };

struct SynthConfig {
    std::string kind = "fgn";  // fgn | surrogate
    PanelSpec panel;
    double mean = 0.0;         // surrogate kind only
    double start_price = 100.0;
};

struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path input_dir;
    std::filesystem::path out_dir = "effimetrics-out";
    std::filesystem::path scatter_summary;  // empty: <out_dir>/summary.json
    PipelineConfig pipeline;
    WindowMode window = WindowMode::rolling;
    bool write_csv = true;
    bool write_json = true;
    bool surrogate = false;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    SynthConfig synth;

    /// Explicit inputs followed by the *.csv files of input_dir in name order.
    std::vector<std::filesystem::path> resolve_inputs() const
    {
        std::vector<std::filesystem::path> out = inputs;
        if (!input_dir.empty()) {
            std::vector<std::filesystem::path> found;
            for (const auto& entry : std::filesystem::directory_iterator(input_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        }
        return out;
    }
};

inline const std::set<std::string>& known_config_keys()
{
    static const std::set<std::string> keys{
        "inputs",          "input_dir",       "out",            "formats",
        "seed",            "threads",         "window",         "estimation_len",
        "shift_len",       "prediction_len",  "allow_overlap",  "dfa.scales",
        "dfa.degree",      "dfa.fit_min",     "dfa.fit_max",    "dfa.cover_tail",
        "apen.m",          "apen.r_fraction", "apen.method",    "nn.m",
        "nn.tau",          "nn.k",            "pipeline.surrogate", "scatter.summary",
        "synth.kind",      "synth.markets",   "synth.hurst_min", "synth.hurst_max",
        "synth.length",    "synth.scale",     "synth.mean",     "synth.start_price",
    };
    return keys;
}

inline RunConfig to_run_config(const KeyValueConfig& kv)
{
    const auto unknown = kv.unknown_keys(known_config_keys());
    if (!unknown.empty()) {
        throw ConfigError("unknown config key '" + unknown.front() + "'");
    }
    RunConfig rc;
    for (const auto& p : kv.get_list("inputs")) {
        rc.inputs.emplace_back(p);
    }
    rc.input_dir = kv.get("input_dir", "");
    rc.out_dir = kv.get("out", rc.out_dir.string());
    rc.scatter_summary = kv.get("scatter.summary", "");
    rc.seed = kv.get_number<std::uint64_t>("seed", rc.seed);
    rc.threads = kv.get_number<unsigned>("threads", rc.threads);
    rc.surrogate = kv.get_bool("pipeline.surrogate", false);

    const std::string window = kv.get("window", "rolling");
    if (window == "rolling") {
        rc.window = WindowMode::rolling;
    } else if (window == "full") {
        rc.window = WindowMode::full;
    } else {
        throw ConfigError("window must be 'rolling' or 'full'");
    }
    if (kv.has("formats")) {
        rc.write_csv = rc.write_json = false;
        for (const auto& f : kv.get_list("formats")) {
            if (f == "csv") {
                rc.write_csv = true;
            } else if (f == "json") {
                rc.write_json = true;
            } else {
                throw ConfigError("unknown output format '" + f + "'");
            }
        }
    }

    auto& plan = rc.pipeline.plan;
    plan.estimation_len = kv.get_number<std::size_t>("estimation_len", plan.estimation_len);
    plan.shift_len = kv.get_number<std::size_t>("shift_len", plan.shift_len);
    plan.prediction_len = kv.get_number<std::size_t>("prediction_len", plan.shift_len);
    plan.allow_prediction_overlap = kv.get_bool("allow_overlap", false);

    auto& dfa = rc.pipeline.dfa;
    if (kv.has("dfa.scales")) {
        dfa.scales.clear();
        for (const auto& s : kv.get_list("dfa.scales")) {
            std::size_t v = 0;
            if (!detail::parse_number(std::string_view(s), v)) {
                throw ConfigError("dfa.scales: cannot parse '" + s + "'");
            }
            dfa.scales.push_back(v);
        }
    }
    dfa.detrend_degree = kv.get_number<int>("dfa.degree", dfa.detrend_degree);
    dfa.cover_tail = kv.get_bool("dfa.cover_tail", false);
    if (kv.has("dfa.fit_min") || kv.has("dfa.fit_max")) {
        dfa.fit_range = std::pair{kv.get_number<std::size_t>("dfa.fit_min", 0),
                                  kv.get_number<std::size_t>("dfa.fit_max", SIZE_MAX)};
    }

    auto& apen = rc.pipeline.apen;
    apen.m = kv.get_number<int>("apen.m", apen.m);
    apen.r_fraction = kv.get_number<double>("apen.r_fraction", apen.r_fraction);
    const std::string method = kv.get("apen.method", "sorted");
    if (method == "sorted") {
        apen.method = ApEnMethod::sorted;
    } else if (method == "naive") {
        apen.method = ApEnMethod::naive;
    } else {
        throw ConfigError("apen.method must be 'sorted' or 'naive'");
    }

    auto& nn = rc.pipeline.nn;
    nn.m = kv.get_number<int>("nn.m", nn.m);
    nn.tau = kv.get_number<int>("nn.tau", nn.tau);
    nn.k = kv.get_number<int>("nn.k", nn.k);

    auto& synth = rc.synth;
    synth.kind = kv.get("synth.kind", synth.kind);
    if (synth.kind != "fgn" && synth.kind != "surrogate") {
        throw ConfigError("synth.kind must be 'fgn' or 'surrogate'");
    }
    synth.panel.markets = kv.get_number<std::size_t>("synth.markets", synth.panel.markets);
    synth.panel.hurst_min = kv.get_number<double>("synth.hurst_min", synth.panel.hurst_min);
    synth.panel.hurst_max = kv.get_number<double>("synth.hurst_max", synth.panel.hurst_max);
    synth.panel.n = kv.get_number<std::size_t>("synth.length", synth.panel.n);
    synth.panel.scale = kv.get_number<double>("synth.scale", synth.panel.scale);
    synth.panel.seed = rc.seed;
    synth.mean = kv.get_number<double>("synth.mean", synth.mean);
    synth.start_price = kv.get_number<double>("synth.start_price", synth.start_price);
    if (!(synth.start_price > 0.0)) {
        throw ConfigError("synth.start_price must be positive");
    }

    try {
        rc.pipeline.plan.validate();
        rc.pipeline.apen.validate();
        rc.pipeline.nn.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

}  // namespace effimetrics

#endif
