#ifndef EFFIMETRICS_TIMESERIES_HPP
#define EFFIMETRICS_TIMESERIES_HPP

// Price and return series, plus the rolling estimation/prediction calendar
// that every estimator in the library runs over.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace effimetrics {

using Date = std::chrono::year_month_day;

inline std::string format_date(const Date& d)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

/// Half-open index interval [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const IndexRange&) const = default;
};

/// Dated closing prices of one market. Dates strictly increase and every
/// price is positive; the constructor enforces both.
class PriceSeries {
public:
    struct Observation {
        Date date;
        double price;
    };

    PriceSeries(std::string market_id, std::vector<Observation> observations)
        : market_id_(std::move(market_id)), obs_(std::move(observations))
    {
        if (obs_.size() < 2) {
            throw std::invalid_argument("price series '" + market_id_ +
                                        "' needs at least 2 observations");
        }
        for (std::size_t i = 0; i < obs_.size(); ++i) {
            if (!(obs_[i].price > 0.0) || !std::isfinite(obs_[i].price)) {
                throw std::invalid_argument("non-positive price on " +
                                            format_date(obs_[i].date) + " in '" +
                                            market_id_ + "'");
            }
            if (i > 0 && !(obs_[i - 1].date < obs_[i].date)) {
                throw std::invalid_argument("dates not strictly increasing at " +
                                            format_date(obs_[i].date) + " in '" +
                                            market_id_ + "'");
            }
        }
    }

    const std::string& market_id() const { return market_id_; }
    const std::vector<Observation>& observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }

private:
    std::string market_id_;
    std::vector<Observation> obs_;
};

/// Log returns with the date of the later price of each pair. Values are kept
/// contiguous so estimators can take spans over them.
class ReturnSeries {
public:
    ReturnSeries() = default;
    ReturnSeries(std::string market_id, std::vector<Date> dates, std::vector<double> values)
        : market_id_(std::move(market_id)), dates_(std::move(dates)), values_(std::move(values))
    {
        if (dates_.size() != values_.size()) {
            throw std::invalid_argument("return series dates/values length mismatch");
        }
    }

    const std::string& market_id() const { return market_id_; }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> segment(IndexRange r) const
    {
        if (r.begin > r.end || r.end > values_.size()) {
            throw std::out_of_range("segment outside return series");
        }
        return std::span<const double>(values_).subspan(r.begin, r.size());
    }

private:
    std::string market_id_;
    std::vector<Date> dates_;
    std::vector<double> values_;
};

inline ReturnSeries log_returns(const PriceSeries& prices)
{
    const auto& obs = prices.observations();
    std::vector<Date> dates;
    std::vector<double> values;
    dates.reserve(obs.size() - 1);
    values.reserve(obs.size() - 1);
    for (std::size_t t = 1; t < obs.size(); ++t) {
        // PriceSeries already rejects these; kept for series built elsewhere.
        if (!(obs[t].price > 0.0) || !(obs[t - 1].price > 0.0)) {
            throw std::invalid_argument("non-positive price on " + format_date(obs[t].date));
        }
        dates.push_back(obs[t].date);
        values.push_back(std::log(obs[t].price) - std::log(obs[t - 1].price));
    }
    return ReturnSeries(prices.market_id(), std::move(dates), std::move(values));
}

/// Trading days per "year" used for the default calendar.
inline constexpr std::size_t kTradingDaysPerYear = 252;

struct WindowPlan {
    std::size_t estimation_len = 5 * kTradingDaysPerYear;
    std::size_t shift_len = kTradingDaysPerYear;
    std::size_t prediction_len = kTradingDaysPerYear;
    // When false, prediction_len must not exceed shift_len so prediction
    // years of consecutive sub-periods never overlap.
    bool allow_prediction_overlap = false;

    void validate() const
    {
        if (estimation_len == 0 || shift_len == 0 || prediction_len == 0) {
            throw std::invalid_argument("window plan lengths must be positive");
        }
        if (!allow_prediction_overlap && prediction_len > shift_len) {
            throw std::invalid_argument("prediction_len exceeds shift_len without overlap allowed");
        }
    }
};

struct SubPeriod {
    std::size_t index = 1;  // t, 1-based
    IndexRange estimation;
    IndexRange prediction;
};

inline std::size_t minimum_observations(const WindowPlan& plan)
{
    return plan.estimation_len + plan.prediction_len;
}

/// Sub-periods anchored at the start of the series with stride shift_len.
/// Partial trailing windows are dropped.
inline std::vector<SubPeriod> build_window_plan(std::size_t n_obs, const WindowPlan& plan)
{
    plan.validate();
    const std::size_t need = minimum_observations(plan);
    if (n_obs < need) {
        throw std::invalid_argument("series has " + std::to_string(n_obs) +
                                    " observations, window plan requires at least " +
                                    std::to_string(need));
    }
    const std::size_t count = (n_obs - need) / plan.shift_len + 1;
    std::vector<SubPeriod> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start = k * plan.shift_len;
        SubPeriod sp;
        sp.index = k + 1;
        sp.estimation = {start, start + plan.estimation_len};
        sp.prediction = {sp.estimation.end, sp.estimation.end + plan.prediction_len};
        out.push_back(sp);
    }
    return out;
}

/// The last anchored estimation window that fits in the series (t = T). It
/// has no out-of-sample year and is used only for endpoint comparisons.
inline IndexRange final_estimation_window(std::size_t n_obs, const WindowPlan& plan)
{
    plan.validate();
    if (n_obs < plan.estimation_len) {
        throw std::invalid_argument("series shorter than one estimation window");
    }
    const std::size_t start = (n_obs - plan.estimation_len) / plan.shift_len * plan.shift_len;
    return {start, start + plan.estimation_len};
}

}  // namespace effimetrics

#endif
