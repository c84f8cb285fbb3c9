// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: effimetrics_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "effimetrics/apen.hpp"
#include "effimetrics/dfa.hpp"
#include "effimetrics/nn_predictor.hpp"
#include "effimetrics/pipeline.hpp"
#include "effimetrics/synthetic.hpp"
#include "../oracles.hpp"

using namespace effimetrics;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed)
{
    GaussianStream g(seed);
    std::vector<double> x(n);
    for (double& v : x) v = g.normal();
    return x;
}

constexpr int kPanelSeeds = 10;

// Panels for seeds 1..10, generated once and shared by criteria 5, 6 and 8.
const std::vector<std::vector<ReturnSeries>>& panels()
{
    static const auto cache = [] {
        std::vector<std::vector<ReturnSeries>> out;
        for (int s = 1; s <= kPanelSeeds; ++s) {
            PanelSpec spec;
            spec.seed = static_cast<std::uint64_t>(s);
            std::vector<ReturnSeries> markets;
            for (auto& m : make_panel(spec)) markets.push_back(std::move(m.returns));
            out.push_back(std::move(markets));
        }
        return out;
    }();
    return cache;
}

CorrelationReport panel_correlations(const std::vector<ReturnSeries>& markets, const PipelineConfig& cfg)
{
    const auto summaries = run_panel(markets, cfg);
    return cross_market_correlations(summaries);
}

std::vector<CorrelationReport>& default_reports()
{
    static std::vector<CorrelationReport> reports;
    if (reports.empty()) {
        for (const auto& p : panels()) reports.push_back(panel_correlations(p, PipelineConfig{}));
    }
    return reports;
}

Verdict hurst_recovery()
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (double target : {0.3, 0.5, 0.7}) {
        double sum = 0.0;
        for (int s = 0; s < 50; ++s) {
            sum += estimate_hurst(gen_fgn(FgnSpec{target, 10000, static_cast<std::uint64_t>(s + 1)}).values()).hurst;
        }
        const double mean = sum / 50.0;
        ok = ok && std::abs(mean - target) <= 0.03;
        detail += "H*=" + fmt(target, 1) + " mean=" + fmt(mean) + "; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + "runtime " + fmt(secs, 1) + " s"};
}

Verdict apen_oracle()
{
    std::mt19937_64 rng(11);
    double worst = 0.0, worst_ref = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng() % 491;
        auto x = gaussian(n, 5000 + trial);
        if (trial % 5 == 0) {
            for (double& v : x) v = std::round(v * 3.0);
        }
        ApEnConfig fast, naive;
        naive.method = ApEnMethod::naive;
        const double a = compute_apen(x, fast).value;
        const double b = compute_apen(x, naive).value;
        worst = std::max(worst, std::abs(a - b));
        worst_ref = std::max(worst_ref, std::abs(b - oracle::apen(x, 2, 0.2)));
    }
    return {worst <= 1e-12 && worst_ref <= 1e-12,
            "max |sorted-naive| = " + fmt(worst, 17) + ", max |naive-enumeration| = " + fmt(worst_ref, 17)};
}

Verdict apen_ordering()
{
    std::vector<double> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    const double base = compute_apen(alt).value;
    int wins = 0;
    double max_shuffled_gap = 1e9;
    for (int s = 0; s < 50; ++s) {
        auto shuffled = alt;
        std::mt19937_64 rng(static_cast<std::uint64_t>(s + 1));
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double other = compute_apen(shuffled).value;
        wins += base < other ? 1 : 0;
        max_shuffled_gap = std::min(max_shuffled_gap, other - base);
    }
    return {base < 0.02 && wins == 50, "ApEn(alternating) = " + fmt(base, 6) + ", below shuffled in " +
                                           std::to_string(wins) + "/50, smallest gap " + fmt(max_shuffled_gap)};
}

Verdict nn_calibration()
{
    const SubPeriod sp{1, {0, 1260}, {1260, 1512}};
    double sum = 0.0;
    for (int s = 0; s < 100; ++s) {
        const auto x = gaussian(1512, 40'000 + s);
        const ReturnSeries r("N", business_days(kSyntheticStart, x.size()), x);
        sum += walk_forward_hit_rate(r, sp, EmbeddingConfig{}).hit_rate;
    }
    const double mean = sum / 100.0;

    const double pattern[4] = {0.012, 0.004, -0.007, -0.015};
    std::vector<double> p(1512);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = pattern[i % 4];
    const ReturnSeries periodic("P", business_days(kSyntheticStart, p.size()), p);
    const double periodic_rate = walk_forward_hit_rate(periodic, sp, EmbeddingConfig{}).hit_rate;
    return {std::abs(mean - 0.5) <= 0.02 && periodic_rate == 1.0,
            "i.i.d. mean hit rate = " + fmt(mean) + ", periodic hit rate = " + fmt(periodic_rate, 6)};
}

Verdict panel_relations()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto& reports = default_reports();
    const double secs = seconds_since(t0);
    int ok_seeds = 0;
    std::string detail;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const bool ok = r.rho_nn_h > 0.5 && r.rho_nn_a < 0.0 && r.rho_h_a < 0.0;
        ok_seeds += ok ? 1 : 0;
        if (!ok) {
            detail += " seed " + std::to_string(i + 1) + ": NN_H=" + fmt(r.rho_nn_h, 3) + " NN_A=" +
                      fmt(r.rho_nn_a, 3) + " H_A=" + fmt(r.rho_h_a, 3) + ";";
        }
    }
    double nnh = 0, nna = 0, ha = 0;
    for (const auto& r : reports) {
        nnh += r.rho_nn_h / kPanelSeeds;
        nna += r.rho_nn_a / kPanelSeeds;
        ha += r.rho_h_a / kPanelSeeds;
    }
    return {ok_seeds == kPanelSeeds && secs < 600.0,
            std::to_string(ok_seeds) + "/10 seeds satisfy all three; means NN_H=" + fmt(nnh, 3) + " NN_A=" +
                fmt(nna, 3) + " H_A=" + fmt(ha, 3) + "; runtime " + fmt(secs, 1) + " s;" + detail};
}

Verdict surrogate_control()
{
    std::vector<CorrelationReport> reports;
    for (std::size_t i = 0; i < panels().size(); ++i) {
        const auto sur = surrogate_panel(panels()[i], static_cast<std::uint64_t>(i + 1));
        reports.push_back(panel_correlations(sur, PipelineConfig{}));
    }
    bool small = true;
    std::string detail;
    int pos[3] = {0, 0, 0};
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double rho[3] = {reports[i].rho_h_a, reports[i].rho_nn_h, reports[i].rho_nn_a};
        for (int c = 0; c < 3; ++c) {
            pos[c] += rho[c] > 0.0 ? 1 : 0;
            if (std::abs(rho[c]) >= 0.4) {
                small = false;
                static const char* names[3] = {"H_A", "NN_H", "NN_A"};
                detail += " seed " + std::to_string(i + 1) + " " + names[c] + "=" + fmt(rho[c], 3) + ";";
            }
        }
    }
    bool unstable = true;
    for (int c = 0; c < 3; ++c) unstable = unstable && pos[c] > 0 && pos[c] < kPanelSeeds;
    return {small && unstable, "positive signs H_A " + std::to_string(pos[0]) + "/10, NN_H " +
                                   std::to_string(pos[1]) + "/10, NN_A " + std::to_string(pos[2]) + "/10;" +
                                   (small ? " all |rho| < 0.4" : " |rho| >= 0.4 at" + detail)};
}

Verdict dfa_oracle()
{
    std::mt19937_64 rng(77);
    double worst_h = 0.0, worst_f = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 64 + rng() % (2048 - 64 + 1);
        const auto x = gaussian(n, 9000 + trial);
        DfaConfig cfg;
        cfg.scales = dyadic_scales(4 + rng() % 13, n / 4);
        if (cfg.scales.size() < 2) cfg.scales = {4, 8};
        cfg.detrend_degree = trial % 4 == 0 ? 2 : 1;
        const auto res = estimate_hurst(x, cfg);
        worst_h = std::max(worst_h, std::abs(res.hurst - oracle::dfa_hurst(x, cfg.scales, cfg.detrend_degree)));
        for (const auto& s : res.per_scale) {
            const double ref = oracle::dfa_fluctuation(x, s.scale, cfg.detrend_degree);
            worst_f = std::max(worst_f, std::abs(s.fluctuation - ref) / ref);
        }
    }
    return {worst_h <= 1e-10 && worst_f <= 1e-10,
            "max |H - H_ref| = " + fmt(worst_h, 14) + ", max relative F error = " + fmt(worst_f, 14)};
}

Verdict k_sweep()
{
    bool ok = true;
    std::string detail;
    for (int k : {5, 10, 20, 50}) {
        int positive = 0;
        double min_rho = 1.0;
        for (std::size_t i = 0; i < panels().size(); ++i) {
            double rho = 0.0;
            if (k == EmbeddingConfig{}.k) {
                rho = default_reports()[i].rho_nn_h;
            } else {
                PipelineConfig cfg;
                cfg.nn.k = k;
                rho = panel_correlations(panels()[i], cfg).rho_nn_h;
            }
            positive += rho > 0.0 ? 1 : 0;
            min_rho = std::min(min_rho, rho);
        }
        ok = ok && positive == kPanelSeeds;
        detail += "K=" + std::to_string(k) + ": " + std::to_string(positive) + "/10 positive (min " +
                  fmt(min_rho, 3) + "); ";
    }
    return {ok, detail};
}

int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + EFFIMETRICS_CLI_PATH + "\" " + args + " > \"" + log.string() +
                            "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Compares every regular file of two output directories byte for byte.
bool identical_dirs(const fs::path& a, const fs::path& b, std::size_t& files)
{
    std::vector<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a)) names_a.push_back(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names_b.push_back(e.path().filename().string());
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b) return false;
    files = names_a.size();
    for (const auto& n : names_a) {
        if (slurp(a / n) != slurp(b / n)) return false;
    }
    return true;
}

Verdict determinism(const fs::path& work)
{
    const fs::path panel = work / "panel";
    const fs::path log = work / "determinism.log";
    if (run_cli("synth --seed 1 --out \"" + panel.string() + "\"", log) != 0) {
        return {false, "synth failed: " + slurp(log)};
    }
    bool ok = true;
    std::string detail;
    for (const bool surrogate : {false, true}) {
        const std::string extra = surrogate ? " --set pipeline.surrogate=true" : "";
        const std::string tag = surrogate ? "surrogate" : "plain";
        const fs::path a = work / ("det_" + tag + "_a");
        const fs::path b = work / ("det_" + tag + "_b");
        for (const auto& out : {a, b}) {
            const int rc = run_cli("pipeline --seed 7 --set input_dir=\"" + panel.string() + "\"" + extra +
                                       " --out \"" + out.string() + "\"",
                                   log);
            if (rc != 0) return {false, "pipeline exited " + std::to_string(rc) + ": " + slurp(log)};
        }
        std::size_t files = 0;
        const bool same = identical_dirs(a, b, files);
        ok = ok && same && files > 0;
        detail += tag + ": " + std::to_string(files) + " files " + (same ? "identical" : "DIFFER") + "; ";
    }
    return {ok, detail};
}

std::size_t data_rows(const fs::path& csv)
{
    std::ifstream in(csv);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += line.empty() ? 0 : 1;
    return n == 0 ? 0 : n - 1;
}

Verdict end_to_end(const fs::path& work)
{
    const fs::path panel = work / "e2e_panel";
    const fs::path out = work / "e2e_out";
    const fs::path log = work / "e2e.log";
    int rc = run_cli("synth --seed 1 --out \"" + panel.string() + "\"", log);
    if (rc == 0) rc = run_cli("pipeline --set input_dir=\"" + panel.string() + "\" --out \"" + out.string() + "\"", log);
    if (rc == 0) rc = run_cli("scatter --out \"" + out.string() + "\"", log);
    if (rc != 0) return {false, "exit " + std::to_string(rc) + ": " + slurp(log)};
    const std::size_t markets = PanelSpec{}.markets;
    bool ok = true;
    std::string detail;
    for (const char* f : {"scatter_HA.csv", "scatter_NNA.csv", "scatter_NNH.csv"}) {
        const std::size_t rows = data_rows(out / f);
        ok = ok && rows == markets;
        detail += std::string(f) + " " + std::to_string(rows) + " points; ";
    }
    return {ok, detail + "expected " + std::to_string(markets)};
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "effimetrics_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"Hurst recovery on fGn (n=10000, 50 seeds, +/-0.03)", hurst_recovery},
        {"ApEn sorted path equals naive reference (<=1e-12)", apen_oracle},
        {"ApEn ordering: alternating < 0.02 and < shuffled (50 seeds)", apen_ordering},
        {"NN null calibration 0.50+/-0.02 and periodic hit rate 1.0", nn_calibration},
        {"Synthetic panel: rho_NN_H > 0.5, rho_NN_A < 0, rho_H_A < 0 on 10 seeds", panel_relations},
        {"Surrogate panel: all |rho| < 0.4 with unstable signs over 10 seeds", surrogate_control},
        {"DFA equals direct implementation (<=1e-10)", dfa_oracle},
        {"rho_NN_H > 0 for K in {5,10,20,50} on 10 seeds", k_sweep},
        {"pipeline artifacts byte-identical across runs", [&] { return determinism(work); }},
        {"synth -> pipeline -> scatter end to end", [&] { return end_to_end(work); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first
                  << " | " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " acceptance criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
