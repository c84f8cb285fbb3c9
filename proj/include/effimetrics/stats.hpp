#ifndef EFFIMETRICS_STATS_HPP
#define EFFIMETRICS_STATS_HPP

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace effimetrics::stats {

inline double mean(std::span<const double> xs)
{
    if (xs.empty()) {
        throw std::invalid_argument("mean of empty sequence");
    }
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator), two-pass.
inline double sample_std(std::span<const double> xs)
{
    if (xs.size() < 2) {
        throw std::invalid_argument("standard deviation needs at least 2 values");
    }
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mu) * (x - mu);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// True when every value equals the mean up to the rounding error of summing
/// the window, (n - 1) * eps * max|x|.
inline bool is_constant(std::span<const double> xs)
{
    const double mu = mean(xs);
    double max_dev = 0.0, max_abs = 0.0;
    for (double x : xs) {
        max_dev = std::max(max_dev, std::abs(x - mu));
        max_abs = std::max(max_abs, std::abs(x));
    }
    const double n = static_cast<double>(xs.size());
    return max_dev <= std::max(1.0, n - 1.0) * std::numeric_limits<double>::epsilon() * max_abs;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit ols_line(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("ols_line needs two equal-length sequences of size >= 2");
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw std::domain_error("ols_line: constant abscissa");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace effimetrics::stats

#endif
