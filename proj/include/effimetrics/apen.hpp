#ifndef EFFIMETRICS_APEN_HPP
#define EFFIMETRICS_APEN_HPP

// Approximate entropy, ApEn(m, r) = phi_m(r) - phi_{m+1}(r).
//
// Template i (0-based) is window[i .. i+m). C_i is the fraction of templates
// within Chebyshev distance r of template i, the template itself included,
// so ln C_i is always finite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effimetrics/stats.hpp"

namespace effimetrics {

enum class ApEnMethod {
    naive,   // O(N^2 m) double loop, the reference path
    sorted,  // templates sorted on their first component, same counts
};

struct ApEnConfig {
    int m = 2;
    double r_fraction = 0.20;
    ApEnMethod method = ApEnMethod::sorted;

    void validate() const
    {
        if (m < 1) {
            throw std::invalid_argument("ApEn embedding dimension must be >= 1");
        }
        if (!(r_fraction > 0.0 && r_fraction < 1.0)) {
            throw std::invalid_argument("ApEn r_fraction must be in (0, 1)");
        }
    }
};

struct ApEnResult {
    double value = 0.0;
    double phi_m = 0.0;
    double phi_m_plus_1 = 0.0;
    double tolerance = 0.0;
    std::size_t n_used = 0;
};

inline double chebyshev_distance(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size() || u.empty()) {
        throw std::invalid_argument("chebyshev_distance: vectors must be non-empty and equal length");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        d = std::max(d, std::abs(u[k] - v[k]));
    }
    return d;
}

namespace detail {

inline std::size_t template_count(std::size_t n, int m)
{
    const auto mm = static_cast<std::size_t>(m);
    if (m < 1 || n < mm) {
        throw std::invalid_argument("ApEn: window of " + std::to_string(n) +
                                    " points has no templates of dimension " + std::to_string(m));
    }
    return n - mm + 1;
}

inline std::size_t count_matches_naive(std::span<const double> x, std::size_t i, int m, double r)
{
    const auto mm = static_cast<std::size_t>(m);
    const std::size_t count = x.size() - mm + 1;
    const auto ti = x.subspan(i, mm);
    std::size_t b = 0;
    for (std::size_t j = 0; j < count; ++j) {
        if (chebyshev_distance(ti, x.subspan(j, mm)) <= r) {
            ++b;
        }
    }
    return b;
}

// Match counts for every template, computed from a first-component sort.
// |a - b| is monotone in b on either side of a, so the candidate block found
// by binary search is exactly the set passing the first-component test.
inline std::vector<std::size_t> count_matches_sorted(std::span<const double> x, int m, double r)
{
    const auto mm = static_cast<std::size_t>(m);
    const std::size_t count = x.size() - mm + 1;
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> first(count);
    for (std::size_t k = 0; k < count; ++k) {
        first[k] = x[order[k]];
    }

    std::vector<std::size_t> matches(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const double xi = x[i];
        const auto lo = std::partition_point(first.begin(), first.end(), [&](double v) {
            return v < xi && !(std::abs(xi - v) <= r);
        });
        const auto hi = std::partition_point(lo, first.end(), [&](double v) {
            return v <= xi || std::abs(v - xi) <= r;
        });
        std::size_t b = 0;
        for (auto it = lo; it != hi; ++it) {
            const std::size_t j = order[static_cast<std::size_t>(it - first.begin())];
            bool within = true;
            for (std::size_t k = 1; k < mm && within; ++k) {
                within = std::abs(x[i + k] - x[j + k]) <= r;
            }
            b += within ? 1 : 0;
        }
        matches[i] = b;
    }
    return matches;
}

}  // namespace detail

/// C_i^m(r) for template i (0-based, i <= N - m).
inline double correlation_fraction(std::span<const double> window, std::size_t i, int m, double r)
{
    const std::size_t count = detail::template_count(window.size(), m);
    if (i >= count) {
        throw std::out_of_range("template index " + std::to_string(i) + " out of range [0, " +
                                std::to_string(count) + ")");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("ApEn tolerance must be positive");
    }
    return static_cast<double>(detail::count_matches_naive(window, i, m, r)) /
           static_cast<double>(count);
}

/// Mean of ln C_i^m(r) over all templates, summed in template order.
inline double phi(std::span<const double> window, int m, double r,
                  ApEnMethod method = ApEnMethod::naive)
{
    const std::size_t count = detail::template_count(window.size(), m);
    if (!(r > 0.0)) {
        throw std::invalid_argument("ApEn tolerance must be positive");
    }
    std::vector<std::size_t> matches;
    if (method == ApEnMethod::sorted) {
        matches = detail::count_matches_sorted(window, m, r);
    } else {
        matches.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            matches[i] = detail::count_matches_naive(window, i, m, r);
        }
    }
    const double denom = static_cast<double>(count);
    double s = 0.0;
    for (std::size_t b : matches) {
        s += std::log(static_cast<double>(b) / denom);
    }
    return s / denom;
}

inline ApEnResult compute_apen(std::span<const double> window, const ApEnConfig& config = {})
{
    config.validate();
    const auto need = static_cast<std::size_t>(config.m) + 2;
    if (window.size() < need) {
        throw std::invalid_argument("ApEn window needs at least " + std::to_string(need) + " points");
    }
    const double sd = stats::sample_std(window);
    if (!std::isfinite(sd) || stats::is_constant(window)) {
        throw std::domain_error("ApEn undefined for a zero-variance window");
    }
    ApEnResult res;
    res.tolerance = config.r_fraction * sd;
    res.phi_m = phi(window, config.m, res.tolerance, config.method);
    res.phi_m_plus_1 = phi(window, config.m + 1, res.tolerance, config.method);
    res.value = res.phi_m - res.phi_m_plus_1;
    res.n_used = window.size();
    return res;
}

}  // namespace effimetrics

#endif
