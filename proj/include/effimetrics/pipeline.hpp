#ifndef EFFIMETRICS_PIPELINE_HPP
#define EFFIMETRICS_PIPELINE_HPP

// Rolling per-market estimation of H_t, A_t and NN_t, their averages over the
// sub-periods that have an out-of-sample year, and the cross-market
// correlations between those averages.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "effimetrics/apen.hpp"
#include "effimetrics/dfa.hpp"
#include "effimetrics/nn_predictor.hpp"
#include "effimetrics/stats.hpp"
#include "effimetrics/timeseries.hpp"

namespace effimetrics {

struct PipelineConfig {
    WindowPlan plan;
    DfaConfig dfa;
    ApEnConfig apen;
    EmbeddingConfig nn;

    void validate() const
    {
        plan.validate();
        dfa.validate(plan.estimation_len);
        apen.validate();
        nn.validate();
    }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SubPeriodMeasure {
    std::size_t t = 0;
    IndexRange estimation;
    IndexRange prediction;  // empty for the final estimation-only window
    double hurst = kNaN;
    double apen = kNaN;
    double hit_rate = kNaN;
    std::size_t hits = 0;
    std::size_t predicted_days = 0;
    bool excluded = false;  // DFA degenerate; dropped from every average
};

struct EndpointMeasures {
    double hurst_first = kNaN;
    double apen_first = kNaN;
    double hurst_last = kNaN;
    double apen_last = kNaN;
};

struct MarketSummary {
    std::string market_id;
    // t = 1 .. T-1, each with an out-of-sample year.
    std::vector<SubPeriodMeasure> per_subperiod;
    // t = T, the last estimation window; no prediction.
    SubPeriodMeasure final_window;
    double mean_hurst = kNaN;
    double mean_apen = kNaN;
    double mean_hit_rate = kNaN;
    std::size_t periods_used = 0;
    EndpointMeasures first_last;
};

namespace detail {

inline void measure_efficiency(const ReturnSeries& returns, SubPeriodMeasure& row,
                               const PipelineConfig& config)
{
    const auto window = returns.segment(row.estimation);
    const DfaResult dfa = estimate_hurst(window, config.dfa);
    if (dfa.degenerate) {
        row.excluded = true;
        return;
    }
    row.hurst = dfa.hurst;
    row.apen = compute_apen(window, config.apen).value;
}

}  // namespace detail

inline MarketSummary run_market(const ReturnSeries& returns, const PipelineConfig& config)
{
    config.validate();
    const auto periods = build_window_plan(returns.size(), config.plan);

    MarketSummary summary;
    summary.market_id = returns.market_id();
    summary.per_subperiod.reserve(periods.size());
    double sum_h = 0.0, sum_a = 0.0, sum_nn = 0.0;
    for (const SubPeriod& sp : periods) {
        SubPeriodMeasure row;
        row.t = sp.index;
        row.estimation = sp.estimation;
        row.prediction = sp.prediction;
        detail::measure_efficiency(returns, row, config);
        const HitRateResult hr = walk_forward_hit_rate(returns, sp, config.nn);
        row.hit_rate = hr.hit_rate;
        row.hits = hr.hits;
        row.predicted_days = hr.total;
        if (!row.excluded) {
            sum_h += row.hurst;
            sum_a += row.apen;
            sum_nn += row.hit_rate;
            ++summary.periods_used;
        }
        summary.per_subperiod.push_back(row);
    }
    if (summary.periods_used > 0) {
        const auto n = static_cast<double>(summary.periods_used);
        summary.mean_hurst = sum_h / n;
        summary.mean_apen = sum_a / n;
        summary.mean_hit_rate = sum_nn / n;
    }

    summary.final_window.t = periods.size() + 1;
    summary.final_window.estimation = final_estimation_window(returns.size(), config.plan);
    summary.final_window.prediction = {summary.final_window.estimation.end,
                                       summary.final_window.estimation.end};
    detail::measure_efficiency(returns, summary.final_window, config);

    summary.first_last.hurst_first = summary.per_subperiod.front().hurst;
    summary.first_last.apen_first = summary.per_subperiod.front().apen;
    summary.first_last.hurst_last = summary.final_window.hurst;
    summary.first_last.apen_last = summary.final_window.apen;
    return summary;
}

inline MarketSummary run_market(const PriceSeries& prices, const PipelineConfig& config)
{
    return run_market(log_returns(prices), config);
}

/// Pearson product-moment correlation.
inline double pearson(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("pearson needs two equal-length sequences of at least 3 values");
    }
    const double mx = stats::mean(xs);
    const double my = stats::mean(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw std::domain_error("pearson undefined for a constant sequence");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationReport {
    double rho_h_a = kNaN;
    double rho_nn_h = kNaN;
    double rho_nn_a = kNaN;
    std::size_t n_markets = 0;
};

/// Coefficients over market means. Markets are visited in id order so the
/// report does not depend on the order of the input list.
inline CorrelationReport cross_market_correlations(std::span<const MarketSummary> summaries)
{
    if (summaries.size() < 3) {
        throw std::invalid_argument("cross-market correlations need at least 3 markets");
    }
    std::vector<const MarketSummary*> ordered;
    for (const auto& s : summaries) {
        if (!std::isfinite(s.mean_hurst) || !std::isfinite(s.mean_apen) ||
            !std::isfinite(s.mean_hit_rate)) {
            throw std::domain_error("market '" + s.market_id + "' has no usable sub-periods");
        }
        ordered.push_back(&s);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->market_id < b->market_id; });
    std::vector<double> h, a, nn;
    for (const auto* s : ordered) {
        h.push_back(s->mean_hurst);
        a.push_back(s->mean_apen);
        nn.push_back(s->mean_hit_rate);
    }
    CorrelationReport r;
    r.rho_h_a = pearson(h, a);
    r.rho_nn_h = pearson(nn, h);
    r.rho_nn_a = pearson(nn, a);
    r.n_markets = summaries.size();
    return r;
}

/// Runs every market, `threads` at a time. Output order follows input order;
/// the first failure is rethrown after all workers finish.
inline std::vector<MarketSummary> run_panel(std::span<const ReturnSeries> markets,
                                            const PipelineConfig& config, unsigned threads = 0)
{
    config.validate();
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, markets.size())));
    std::vector<MarketSummary> out(markets.size());
    std::vector<std::exception_ptr> errors(markets.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < markets.size(); i = next++) {
            try {
                out[i] = run_market(markets[i], config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

}  // namespace effimetrics

#endif
