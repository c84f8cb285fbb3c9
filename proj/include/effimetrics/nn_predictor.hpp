#ifndef EFFIMETRICS_NN_PREDICTOR_HPP
#define EFFIMETRICS_NN_PREDICTOR_HPP

// Nearest-neighbour direction forecasting on delay-embedded returns.
//
// Positions are 0-based offsets into the library window. The delay vector at
// position n is [x_n, x_{n-tau}, ..., x_{n-(m-1)tau}]. A position is a
// candidate match only if its successor x_{n+1} lies inside the window, so the
// newest vector (the forecast target) is never its own neighbour.
//
// Forecast for the day after the window:
//   1. rank candidates by squared Euclidean distance to the target at
//      dimension m, keep the K nearest (ties: older position first);
//   2. keep those whose (m+1)-dimensional distance to the (m+1)-dimensional
//      target does not exceed the largest m-dimensional distance among the K;
//      if none survive, keep the single best (m+1) candidate;
//   3. vote on the signs of the survivors' successors. Zero counts as DOWN.
//      A tied vote follows the nearest survivor.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effimetrics/timeseries.hpp"

namespace effimetrics {

struct EmbeddingConfig {
    int m = 2;
    int tau = 1;
    int k = 20;

    void validate() const
    {
        if (m < 1 || tau < 1 || k < 1) {
            throw std::invalid_argument("embedding needs m >= 1, tau >= 1, k >= 1");
        }
    }
};

enum class Direction { down, up };

inline Direction direction_of(double x) { return x > 0.0 ? Direction::up : Direction::down; }

inline const char* to_string(Direction d) { return d == Direction::up ? "UP" : "DOWN"; }

/// Delay vectors of a sliding window at dimensions m and m+1.
class PatternLibrary {
public:
    PatternLibrary(std::span<const double> window, const EmbeddingConfig& config)
        : m_(static_cast<std::size_t>(config.m)), tau_(static_cast<std::size_t>(config.tau))
    {
        config.validate();
        if (window.size() <= m_ * tau_ + 1) {
            throw std::invalid_argument("pattern library window of " + std::to_string(window.size()) +
                                        " points is too short for m=" + std::to_string(m_) +
                                        ", tau=" + std::to_string(tau_));
        }
        window_.assign(window.begin(), window.end());
        const std::size_t len = window_.size();
        vectors_m_.reserve((len - first_m()) * m_);
        for (std::size_t n = first_m(); n < len; ++n) {
            append_vector(vectors_m_, n, m_);
        }
        vectors_m1_.reserve((len - first_m1()) * (m_ + 1));
        for (std::size_t n = first_m1(); n < len; ++n) {
            append_vector(vectors_m1_, n, m_ + 1);
        }
    }

    std::size_t dimension() const { return m_; }
    std::size_t delay() const { return tau_; }
    std::size_t size() const { return window_.size(); }
    std::span<const double> window() const { return window_; }

    /// First position with an m-dimensional vector.
    std::size_t first_m() const { return (m_ - 1) * tau_; }
    /// First position with an (m+1)-dimensional vector.
    std::size_t first_m1() const { return m_ * tau_; }
    /// Positions [first_m(), candidate_end()) have a successor in the window.
    std::size_t candidate_end() const { return window_.size() - 1; }
    std::size_t candidate_count() const { return candidate_end() - first_m(); }

    std::span<const double> vector_m(std::size_t n) const
    {
        if (n < first_m() || n >= window_.size()) {
            throw std::out_of_range("no m-dimensional vector at position " + std::to_string(n));
        }
        return std::span<const double>(vectors_m_).subspan((n - first_m()) * m_, m_);
    }

    bool has_vector_m1(std::size_t n) const { return n >= first_m1() && n < window_.size(); }

    std::span<const double> vector_m1(std::size_t n) const
    {
        if (!has_vector_m1(n)) {
            throw std::out_of_range("no (m+1)-dimensional vector at position " + std::to_string(n));
        }
        return std::span<const double>(vectors_m1_).subspan((n - first_m1()) * (m_ + 1), m_ + 1);
    }

    double successor(std::size_t n) const
    {
        if (n < first_m() || n >= candidate_end()) {
            throw std::out_of_range("no successor at position " + std::to_string(n));
        }
        return window_[n + 1];
    }

    /// The newest vectors, whose successor is the next unseen day.
    std::span<const double> target_m() const { return vector_m(window_.size() - 1); }
    std::span<const double> target_m1() const { return vector_m1(window_.size() - 1); }

    /// Slide by one day: drop the oldest value and its vectors, append the
    /// newest value and its vectors. Equivalent to rebuilding from scratch.
    void advance(double next)
    {
        window_.erase(window_.begin());
        window_.push_back(next);
        vectors_m_.erase(vectors_m_.begin(), vectors_m_.begin() + static_cast<std::ptrdiff_t>(m_));
        append_vector(vectors_m_, window_.size() - 1, m_);
        vectors_m1_.erase(vectors_m1_.begin(),
                          vectors_m1_.begin() + static_cast<std::ptrdiff_t>(m_ + 1));
        append_vector(vectors_m1_, window_.size() - 1, m_ + 1);
    }

    bool operator==(const PatternLibrary&) const = default;

private:
    void append_vector(std::vector<double>& out, std::size_t n, std::size_t dim) const
    {
        for (std::size_t k = 0; k < dim; ++k) {
            out.push_back(window_[n - k * tau_]);
        }
    }

    std::size_t m_;
    std::size_t tau_;
    std::vector<double> window_;
    std::vector<double> vectors_m_;
    std::vector<double> vectors_m1_;
};

inline PatternLibrary reconstruct(std::span<const double> window, const EmbeddingConfig& config)
{
    return PatternLibrary(window, config);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: dimension mismatch");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

struct Neighbor {
    std::size_t position = 0;
    double distance = 0.0;  // squared Euclidean

    bool operator==(const Neighbor&) const = default;
};

struct NeighborSet {
    std::vector<Neighbor> ranked;
    // Fewer candidates than requested; all were returned.
    bool truncated = false;
};

inline bool neighbor_before(const Neighbor& a, const Neighbor& b)
{
    return a.distance < b.distance || (a.distance == b.distance && a.position < b.position);
}

inline NeighborSet find_neighbors(std::span<const double> target, const PatternLibrary& library,
                                  std::size_t k)
{
    if (target.size() != library.dimension()) {
        throw std::invalid_argument("target dimension does not match library");
    }
    if (library.candidate_count() == 0 || k == 0) {
        throw std::invalid_argument("find_neighbors needs a non-empty library and k >= 1");
    }
    std::vector<Neighbor> all;
    all.reserve(library.candidate_count());
    for (std::size_t n = library.first_m(); n < library.candidate_end(); ++n) {
        all.push_back({n, squared_distance(target, library.vector_m(n))});
    }
    NeighborSet out;
    out.truncated = k > all.size();
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      neighbor_before);
    all.resize(keep);
    out.ranked = std::move(all);
    return out;
}

struct RefinedMatches {
    // Survivors ordered by (m+1)-dimensional distance, older first on ties.
    std::vector<Neighbor> matches;
    bool fallback = false;
};

inline RefinedMatches refine_matches(const NeighborSet& candidates, std::span<const double> target_m1,
                                     const PatternLibrary& library)
{
    if (candidates.ranked.empty()) {
        throw std::invalid_argument("refine_matches needs at least one candidate");
    }
    if (target_m1.size() != library.dimension() + 1) {
        throw std::invalid_argument("refine_matches: target must have dimension m+1");
    }
    double threshold = 0.0;
    for (const auto& c : candidates.ranked) {
        threshold = std::max(threshold, c.distance);
    }
    RefinedMatches out;
    std::vector<Neighbor> extended;
    for (const auto& c : candidates.ranked) {
        if (!library.has_vector_m1(c.position)) {
            continue;
        }
        extended.push_back({c.position, squared_distance(target_m1, library.vector_m1(c.position))});
    }
    std::sort(extended.begin(), extended.end(), neighbor_before);
    for (const auto& e : extended) {
        if (e.distance <= threshold) {
            out.matches.push_back(e);
        }
    }
    if (out.matches.empty()) {
        out.fallback = true;
        if (!extended.empty()) {
            out.matches.push_back(extended.front());
        } else {
            out.matches.push_back(candidates.ranked.front());
        }
    }
    return out;
}

struct DirectionForecast {
    Direction direction = Direction::down;
    int up_votes = 0;
    int down_votes = 0;
    std::vector<std::size_t> neighbor_indices;
};

inline DirectionForecast forecast_direction(std::span<const Neighbor> refined,
                                            const PatternLibrary& library)
{
    if (refined.empty()) {
        throw std::invalid_argument("forecast_direction needs at least one neighbour");
    }
    DirectionForecast f;
    for (const auto& nb : refined) {
        f.neighbor_indices.push_back(nb.position);
        if (direction_of(library.successor(nb.position)) == Direction::up) {
            ++f.up_votes;
        } else {
            ++f.down_votes;
        }
    }
    if (f.up_votes != f.down_votes) {
        f.direction = f.up_votes > f.down_votes ? Direction::up : Direction::down;
    } else {
        f.direction = direction_of(library.successor(refined.front().position));
    }
    return f;
}

/// Full forecast for the day after the library window.
inline DirectionForecast forecast_next(const PatternLibrary& library, const EmbeddingConfig& config)
{
    const NeighborSet candidates =
        find_neighbors(library.target_m(), library, static_cast<std::size_t>(config.k));
    const RefinedMatches refined = refine_matches(candidates, library.target_m1(), library);
    return forecast_direction(refined.matches, library);
}

struct HitRateResult {
    std::size_t hits = 0;
    std::size_t total = 0;
    double hit_rate = 0.0;
};

struct DayForecast {
    Date date;
    Direction predicted = Direction::down;
    Direction actual = Direction::down;
    bool hit = false;
};

struct WalkForwardRun {
    HitRateResult result;
    std::vector<DayForecast> days;
};

/// One-day-ahead forecasts over the prediction range. The library for day d
/// holds the estimation-length window ending at d-1 and slides by one day
/// after each forecast.
inline WalkForwardRun walk_forward(const ReturnSeries& series, const SubPeriod& sub,
                                   const EmbeddingConfig& config)
{
    config.validate();
    const std::size_t est = sub.estimation.size();
    if (sub.prediction.begin < est || sub.prediction.end > series.size() ||
        sub.prediction.begin >= sub.prediction.end) {
        throw std::invalid_argument("sub-period ranges do not fit the return series");
    }
    const auto& x = series.values();
    const bool dated = series.dates().size() == x.size();
    PatternLibrary library(series.segment({sub.prediction.begin - est, sub.prediction.begin}), config);

    WalkForwardRun run;
    run.days.reserve(sub.prediction.size());
    for (std::size_t d = sub.prediction.begin; d < sub.prediction.end; ++d) {
        const DirectionForecast f = forecast_next(library, config);
        DayForecast day;
        if (dated) {
            day.date = series.dates()[d];
        }
        day.predicted = f.direction;
        day.actual = direction_of(x[d]);
        day.hit = day.predicted == day.actual;
        run.result.hits += day.hit ? 1 : 0;
        run.days.push_back(day);
        if (d + 1 < sub.prediction.end) {
            library.advance(x[d]);
        }
    }
    run.result.total = run.days.size();
    run.result.hit_rate =
        static_cast<double>(run.result.hits) / static_cast<double>(run.result.total);
    return run;
}

inline HitRateResult walk_forward_hit_rate(const ReturnSeries& series, const SubPeriod& sub,
                                           const EmbeddingConfig& config)
{
    return walk_forward(series, sub, config).result;
}

}  // namespace effimetrics

#endif
