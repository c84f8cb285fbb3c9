#ifndef EFFIMETRICS_TOOLS_REPORT_HPP
#define EFFIMETRICS_TOOLS_REPORT_HPP

// Subcommands of the effimetrics CLI. Each writes its artifacts under the
// configured output directory and throws on any rejection; the caller turns
// exceptions into a diagnostic and a nonzero exit status.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "effimetrics/apen.hpp"
#include "effimetrics/config.hpp"
#include "effimetrics/csv_io.hpp"
#include "effimetrics/dfa.hpp"
#include "effimetrics/nn_predictor.hpp"
#include "effimetrics/pipeline.hpp"
#include "effimetrics/synthetic.hpp"

namespace effimetrics::report {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class DegenerateWindow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

inline void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

/// Doubles print with round-trip precision; NaN becomes JSON null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : "NaN"; }

inline Json range_json(IndexRange r) { return Json::array({r.begin, r.end}); }

inline std::vector<ReturnSeries> load_returns(const RunConfig& rc)
{
    const auto paths = rc.resolve_inputs();
    if (paths.empty()) {
        throw ConfigError("no input files (set 'inputs', 'input_dir' or pass files)");
    }
    std::vector<ReturnSeries> out;
    out.reserve(paths.size());
    for (const auto& p : paths) {
        out.push_back(log_returns(ingest_csv(p)));
    }
    return out;
}

struct Window {
    std::size_t t;
    IndexRange range;
};

/// Estimation windows t = 1..T of the rolling calendar, or the whole series.
inline std::vector<Window> estimation_windows(const ReturnSeries& r, const RunConfig& rc)
{
    std::vector<Window> out;
    if (rc.window == WindowMode::full) {
        out.push_back({1, {0, r.size()}});
        return out;
    }
    const auto periods = build_window_plan(r.size(), rc.pipeline.plan);
    for (const auto& sp : periods) {
        out.push_back({sp.index, sp.estimation});
    }
    out.push_back({periods.size() + 1, final_estimation_window(r.size(), rc.pipeline.plan)});
    return out;
}

inline Json window_dates(const ReturnSeries& r, IndexRange range)
{
    if (range.size() == 0) {
        return Json(nullptr);
    }
    return Json::array({format_date(r.dates()[range.begin]), format_date(r.dates()[range.end - 1])});
}

inline void prepare_out(const RunConfig& rc) { fs::create_directories(rc.out_dir); }

inline int cmd_hurst(const RunConfig& rc)
{
    prepare_out(rc);
    std::vector<std::string> degenerate;
    for (const auto& r : load_returns(rc)) {
        Json doc;
        doc["market_id"] = r.market_id();
        doc["windows"] = Json::array();
        for (const auto& w : estimation_windows(r, rc)) {
            const DfaResult res = estimate_hurst(r.segment(w.range), rc.pipeline.dfa);
            Json jw;
            jw["t"] = w.t;
            jw["estimation"] = range_json(w.range);
            jw["dates"] = window_dates(r, w.range);
            jw["degenerate"] = res.degenerate;
            jw["hurst"] = number(res.hurst);
            jw["log_intercept"] = number(res.log_intercept);
            jw["r_squared"] = number(res.r_squared);
            Json scales = Json::array();
            std::string csv = "scale,fluctuation\n";
            for (const auto& s : res.per_scale) {
                scales.push_back({{"scale", s.scale}, {"fluctuation", number(s.fluctuation)}});
                csv += std::to_string(s.scale) + "," + csv_number(s.fluctuation) + "\n";
            }
            jw["per_scale"] = scales;
            doc["windows"].push_back(jw);
            if (rc.write_csv) {
                write_text(rc.out_dir / ("hurst_" + r.market_id() + "_t" + std::to_string(w.t) + ".csv"),
                           csv);
            }
            if (res.degenerate) {
                degenerate.push_back(r.market_id() + " t=" + std::to_string(w.t));
            }
        }
        if (rc.write_json) {
            write_json(rc.out_dir / ("hurst_" + r.market_id() + ".json"), doc);
        }
    }
    if (!degenerate.empty()) {
        std::string list;
        for (const auto& d : degenerate) {
            list += (list.empty() ? "" : ", ") + d;
        }
        throw DegenerateWindow("degenerate DFA window (zero fluctuation): " + list);
    }
    return 0;
}

inline int cmd_apen(const RunConfig& rc)
{
    prepare_out(rc);
    for (const auto& r : load_returns(rc)) {
        Json doc;
        doc["market_id"] = r.market_id();
        doc["m"] = rc.pipeline.apen.m;
        doc["r_fraction"] = rc.pipeline.apen.r_fraction;
        doc["windows"] = Json::array();
        std::string csv = "t,apen,phi_m,phi_m_plus_1,tolerance,n_used\n";
        for (const auto& w : estimation_windows(r, rc)) {
            ApEnResult res;
            try {
                res = compute_apen(r.segment(w.range), rc.pipeline.apen);
            } catch (const std::domain_error& e) {
                throw std::domain_error(r.market_id() + " t=" + std::to_string(w.t) + ": " + e.what());
            }
            doc["windows"].push_back({{"t", w.t},
                                      {"estimation", range_json(w.range)},
                                      {"dates", window_dates(r, w.range)},
                                      {"apen", number(res.value)},
                                      {"phi_m", number(res.phi_m)},
                                      {"phi_m_plus_1", number(res.phi_m_plus_1)},
                                      {"tolerance", number(res.tolerance)},
                                      {"n_used", res.n_used}});
            csv += std::to_string(w.t) + "," + csv_number(res.value) + "," + csv_number(res.phi_m) + "," +
                   csv_number(res.phi_m_plus_1) + "," + csv_number(res.tolerance) + "," +
                   std::to_string(res.n_used) + "\n";
        }
        if (rc.write_json) {
            write_json(rc.out_dir / ("apen_" + r.market_id() + ".json"), doc);
        }
        if (rc.write_csv) {
            write_text(rc.out_dir / ("apen_" + r.market_id() + ".csv"), csv);
        }
    }
    return 0;
}

inline int cmd_predict(const RunConfig& rc)
{
    prepare_out(rc);
    for (const auto& r : load_returns(rc)) {
        Json doc;
        doc["market_id"] = r.market_id();
        doc["m"] = rc.pipeline.nn.m;
        doc["tau"] = rc.pipeline.nn.tau;
        doc["k"] = rc.pipeline.nn.k;
        doc["subperiods"] = Json::array();
        std::string trace = "date,predicted,actual,hit\n";
        for (const auto& sp : build_window_plan(r.size(), rc.pipeline.plan)) {
            const WalkForwardRun run = walk_forward(r, sp, rc.pipeline.nn);
            doc["subperiods"].push_back({{"t", sp.index},
                                         {"estimation", range_json(sp.estimation)},
                                         {"prediction", range_json(sp.prediction)},
                                         {"hits", run.result.hits},
                                         {"total", run.result.total},
                                         {"hit_rate", number(run.result.hit_rate)}});
            for (const auto& d : run.days) {
                trace += format_date(d.date) + "," + to_string(d.predicted) + "," + to_string(d.actual) +
                         "," + (d.hit ? "1" : "0") + "\n";
            }
        }
        if (rc.write_json) {
            write_json(rc.out_dir / ("predict_" + r.market_id() + ".json"), doc);
        }
        if (rc.write_csv) {
            write_text(rc.out_dir / ("predict_" + r.market_id() + "_trace.csv"), trace);
        }
    }
    return 0;
}

inline Json measure_json(const ReturnSeries& r, const SubPeriodMeasure& m)
{
    return {{"t", m.t},
            {"estimation", range_json(m.estimation)},
            {"prediction", range_json(m.prediction)},
            {"estimation_dates", window_dates(r, m.estimation)},
            {"H", number(m.hurst)},
            {"A", number(m.apen)},
            {"NN", number(m.hit_rate)},
            {"hits", m.hits},
            {"predicted_days", m.predicted_days},
            {"excluded", m.excluded}};
}

inline Json config_json(const RunConfig& rc)
{
    const auto& p = rc.pipeline;
    return {{"estimation_len", p.plan.estimation_len},
            {"shift_len", p.plan.shift_len},
            {"prediction_len", p.plan.prediction_len},
            {"dfa_scales", p.dfa.scales},
            {"dfa_degree", p.dfa.detrend_degree},
            {"dfa_cover_tail", p.dfa.cover_tail},
            {"apen_m", p.apen.m},
            {"apen_r_fraction", p.apen.r_fraction},
            {"nn_m", p.nn.m},
            {"nn_tau", p.nn.tau},
            {"nn_k", p.nn.k},
            {"surrogate", rc.surrogate},
            {"seed", rc.seed}};
}

inline std::string subperiod_csv_rows(const MarketSummary& s)
{
    std::string out;
    for (const auto& m : s.per_subperiod) {
        out += s.market_id + "," + std::to_string(m.t) + "," + csv_number(m.hurst) + "," +
               csv_number(m.apen) + "," + csv_number(m.hit_rate) + "\n";
    }
    return out;
}

inline int cmd_pipeline(const RunConfig& rc)
{
    rc.pipeline.validate();
    prepare_out(rc);
    std::vector<ReturnSeries> markets = load_returns(rc);
    if (rc.surrogate) {
        markets = surrogate_panel(markets, rc.seed);
    }
    const std::vector<MarketSummary> summaries = run_panel(markets, rc.pipeline, rc.threads);

    Json doc;
    doc["config"] = config_json(rc);
    doc["markets"] = Json::array();
    std::string flat = "market,t,H,A,NN\n";
    for (std::size_t j = 0; j < summaries.size(); ++j) {
        const auto& s = summaries[j];
        const auto& r = markets[j];
        Json js;
        js["market_id"] = s.market_id;
        js["mean_hurst"] = number(s.mean_hurst);
        js["mean_apen"] = number(s.mean_apen);
        js["mean_hit_rate"] = number(s.mean_hit_rate);
        js["periods_used"] = s.periods_used;
        js["first_last"] = {{"hurst_first", number(s.first_last.hurst_first)},
                            {"apen_first", number(s.first_last.apen_first)},
                            {"hurst_last", number(s.first_last.hurst_last)},
                            {"apen_last", number(s.first_last.apen_last)}};
        js["subperiods"] = Json::array();
        for (const auto& m : s.per_subperiod) {
            js["subperiods"].push_back(measure_json(r, m));
        }
        js["final_window"] = measure_json(r, s.final_window);
        doc["markets"].push_back(js);

        const std::string rows = subperiod_csv_rows(s);
        flat += rows;
        if (rc.write_csv) {
            write_text(rc.out_dir / ("subperiods_" + s.market_id + ".csv"), "market,t,H,A,NN\n" + rows);
        }
    }

    Json corr;
    corr["n_markets"] = summaries.size();
    if (summaries.size() >= 3) {
        const CorrelationReport rep = cross_market_correlations(summaries);
        corr["rho_H_A"] = number(rep.rho_h_a);
        corr["rho_NN_H"] = number(rep.rho_nn_h);
        corr["rho_NN_A"] = number(rep.rho_nn_a);
    } else {
        corr["rho_H_A"] = nullptr;
        corr["rho_NN_H"] = nullptr;
        corr["rho_NN_A"] = nullptr;
        corr["note"] = "at least 3 markets are needed for cross-market correlations";
    }
    if (rc.write_json) {
        write_json(rc.out_dir / "summary.json", doc);
        write_json(rc.out_dir / "correlations.json", corr);
    }
    if (rc.write_csv) {
        write_text(rc.out_dir / "subperiods.csv", flat);
    }
    return 0;
}

inline int cmd_synth(const RunConfig& rc)
{
    prepare_out(rc);
    const SynthConfig& sc = rc.synth;
    PanelSpec spec = sc.panel;
    spec.seed = rc.seed;

    std::vector<ReturnSeries> series;
    std::vector<double> targets;
    if (sc.kind == "fgn") {
        for (auto& m : make_panel(spec)) {
            series.push_back(std::move(m.returns));
            targets.push_back(m.hurst_target);
        }
    } else {
        for (std::size_t j = 0; j < spec.markets; ++j) {
            SurrogateSpec s{sc.mean, spec.scale, spec.n, derive_seed(spec.seed, j + 1), panel_market_id(j)};
            series.push_back(gen_surrogate(s));
            targets.push_back(0.5);
        }
    }

    Json manifest;
    manifest["kind"] = sc.kind;
    manifest["seed"] = spec.seed;
    manifest["length"] = spec.n;
    manifest["scale"] = spec.scale;
    manifest["markets"] = Json::array();
    for (std::size_t j = 0; j < series.size(); ++j) {
        const PriceSeries prices = prices_from_returns(series[j], sc.start_price);
        const std::string file = series[j].market_id() + ".csv";
        std::ostringstream csv;
        write_price_csv(csv, prices);
        write_text(rc.out_dir / file, csv.str());
        manifest["markets"].push_back(
            {{"market_id", series[j].market_id()}, {"hurst_target", targets[j]}, {"file", file}});
    }
    write_json(rc.out_dir / "panel.json", manifest);
    return 0;
}

inline int cmd_scatter(const RunConfig& rc)
{
    const fs::path summary_path = rc.scatter_summary.empty() ? rc.out_dir / "summary.json" : rc.scatter_summary;
    std::ifstream in(summary_path);
    if (!in) {
        throw std::runtime_error("cannot open summary '" + summary_path.string() + "'");
    }
    const Json doc = Json::parse(in);
    if (!doc.contains("markets") || !doc["markets"].is_array()) {
        throw std::runtime_error("'" + summary_path.string() + "' has no markets array");
    }
    prepare_out(rc);
    std::string ha = "x,y,label\n", nna = "x,y,label\n", nnh = "x,y,label\n";
    for (const auto& m : doc["markets"]) {
        const auto label = m.at("market_id").get<std::string>();
        auto field = [&](const char* key) {
            const auto& v = m.at(key);
            if (!v.is_number()) {
                throw std::runtime_error("market '" + label + "' has no numeric " + key);
            }
            return v.get<double>();
        };
        const double h = field("mean_hurst");
        const double a = field("mean_apen");
        const double nn = field("mean_hit_rate");
        ha += format_double(a) + "," + format_double(h) + "," + label + "\n";
        nna += format_double(a) + "," + format_double(nn) + "," + label + "\n";
        nnh += format_double(h) + "," + format_double(nn) + "," + label + "\n";
    }
    write_text(rc.out_dir / "scatter_HA.csv", ha);
    write_text(rc.out_dir / "scatter_NNA.csv", nna);
    write_text(rc.out_dir / "scatter_NNH.csv", nnh);
    return 0;
}

inline int run_command(const std::string& command, const RunConfig& rc)
{
    if (command == "hurst") return cmd_hurst(rc);
    if (command == "apen") return cmd_apen(rc);
    if (command == "predict") return cmd_predict(rc);
    if (command == "pipeline") return cmd_pipeline(rc);
    if (command == "synth") return cmd_synth(rc);
    if (command == "scatter") return cmd_scatter(rc);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace effimetrics::report

#endif
