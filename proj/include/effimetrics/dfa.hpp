#ifndef EFFIMETRICS_DFA_HPP
#define EFFIMETRICS_DFA_HPP

// Detrended fluctuation analysis. The return window is mean-subtracted and
// integrated into a profile, the profile is cut into boxes of n points, a
// least-squares polynomial is removed from each box, and F(n) is the root
// mean square of what remains. The Hurst exponent is the slope of ln F(n)
// against ln n.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "effimetrics/stats.hpp"

namespace effimetrics {

struct DfaConfig {
    std::vector<std::size_t> scales{16, 32, 64, 128, 256};
    int detrend_degree = 1;
    // Inclusive bounds on the scales entering the log-log regression.
    std::optional<std::pair<std::size_t, std::size_t>> fit_range;
    // Also cover the profile with boxes anchored at its end, so the N mod n
    // tail contributes. Off by default.
    bool cover_tail = false;

    void validate(std::size_t window_len) const
    {
        if (scales.size() < 2) {
            throw std::invalid_argument("DFA needs at least two scales");
        }
        if (detrend_degree < 0 || detrend_degree > 4) {
            throw std::invalid_argument("DFA detrend degree must be in [0, 4]");
        }
        for (std::size_t i = 0; i < scales.size(); ++i) {
            if (scales[i] < static_cast<std::size_t>(detrend_degree) + 2) {
                throw std::invalid_argument("DFA scale " + std::to_string(scales[i]) +
                                            " too small for detrend degree");
            }
            if (i > 0 && scales[i] <= scales[i - 1]) {
                throw std::invalid_argument("DFA scales must be strictly ascending");
            }
        }
        if (4 * scales.back() > window_len) {
            throw std::invalid_argument("largest DFA scale " + std::to_string(scales.back()) +
                                        " exceeds a quarter of the window (" +
                                        std::to_string(window_len) + ")");
        }
    }
};

/// Powers of two in [min_scale, max_scale].
inline std::vector<std::size_t> dyadic_scales(std::size_t min_scale, std::size_t max_scale)
{
    std::vector<std::size_t> out;
    std::size_t s = 1;
    while (s < min_scale) {
        s *= 2;
    }
    for (; s <= max_scale; s *= 2) {
        out.push_back(s);
    }
    return out;
}

struct ScaleFluctuation {
    std::size_t scale = 0;
    double fluctuation = 0.0;
};

struct DfaResult {
    // NaN when degenerate.
    double hurst = std::numeric_limits<double>::quiet_NaN();
    double log_intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    std::vector<ScaleFluctuation> per_scale;
    // Some F(n) was exactly zero, so no power law can be fitted.
    bool degenerate = false;

    bool ok() const { return !degenerate; }
};

inline constexpr std::size_t kMinDfaWindow = 8;

/// Cumulative sum of mean-subtracted values. A window that is constant to
/// rounding (stats::is_constant) integrates to exactly zero.
inline std::vector<double> profile(std::span<const double> window)
{
    if (window.empty()) {
        throw std::invalid_argument("profile of empty window");
    }
    std::vector<double> y(window.size(), 0.0);
    if (stats::is_constant(window)) {
        return y;
    }
    const double mu = stats::mean(window);
    double acc = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        acc += window[i] - mu;
        y[i] = acc;
    }
    return y;
}

namespace detail {

// Least-squares polynomial detrending for boxes of a fixed length. The
// abscissa is centred and scaled to [-1, 1] and the Gram matrix, which is the
// same for every box, is Cholesky-factored once.
class BoxDetrender {
public:
    BoxDetrender(std::size_t n, int degree) : n_(n), terms_(static_cast<std::size_t>(degree) + 1)
    {
        const double c = 0.5 * static_cast<double>(n - 1);
        const double h = c > 0.0 ? c : 1.0;
        basis_.resize(n * terms_);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(i) - c) / h;
            double p = 1.0;
            for (std::size_t k = 0; k < terms_; ++k) {
                basis_[i * terms_ + k] = p;
                p *= u;
            }
        }
        chol_.assign(terms_ * terms_, 0.0);
        for (std::size_t a = 0; a < terms_; ++a) {
            for (std::size_t b = 0; b < terms_; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    s += basis_[i * terms_ + a] * basis_[i * terms_ + b];
                }
                chol_[a * terms_ + b] = s;
            }
        }
        for (std::size_t j = 0; j < terms_; ++j) {
            double d = chol_[j * terms_ + j];
            for (std::size_t k = 0; k < j; ++k) {
                d -= chol_[j * terms_ + k] * chol_[j * terms_ + k];
            }
            if (!(d > 0.0)) {
                throw std::logic_error("DFA detrending: singular least-squares system");
            }
            chol_[j * terms_ + j] = std::sqrt(d);
            for (std::size_t i = j + 1; i < terms_; ++i) {
                double s = chol_[i * terms_ + j];
                for (std::size_t k = 0; k < j; ++k) {
                    s -= chol_[i * terms_ + k] * chol_[j * terms_ + k];
                }
                chol_[i * terms_ + j] = s / chol_[j * terms_ + j];
            }
        }
    }

    /// Sum of squared residuals of the fit to box[0..n).
    double residual_ss(std::span<const double> box) const
    {
        std::array<double, 8> coef{};
        for (std::size_t k = 0; k < terms_; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                s += basis_[i * terms_ + k] * box[i];
            }
            coef[k] = s;
        }
        for (std::size_t i = 0; i < terms_; ++i) {
            double s = coef[i];
            for (std::size_t k = 0; k < i; ++k) {
                s -= chol_[i * terms_ + k] * coef[k];
            }
            coef[i] = s / chol_[i * terms_ + i];
        }
        for (std::size_t i = terms_; i-- > 0;) {
            double s = coef[i];
            for (std::size_t k = i + 1; k < terms_; ++k) {
                s -= chol_[k * terms_ + i] * coef[k];
            }
            coef[i] = s / chol_[i * terms_ + i];
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double fit = 0.0;
            for (std::size_t k = 0; k < terms_; ++k) {
                fit += basis_[i * terms_ + k] * coef[k];
            }
            const double r = box[i] - fit;
            ss += r * r;
        }
        return ss;
    }

private:
    std::size_t n_;
    std::size_t terms_;
    std::vector<double> basis_;
    std::vector<double> chol_;
};

}  // namespace detail

inline double fluctuation_at_scale(std::span<const double> prof, std::size_t n,
                                   int detrend_degree, bool cover_tail = false)
{
    if (detrend_degree < 0 || detrend_degree > 4) {
        throw std::invalid_argument("DFA detrend degree must be in [0, 4]");
    }
    if (n < static_cast<std::size_t>(detrend_degree) + 2 || n > prof.size()) {
        throw std::invalid_argument("DFA scale " + std::to_string(n) + " invalid for profile of " +
                                    std::to_string(prof.size()) + " points");
    }
    const detail::BoxDetrender detrender(n, detrend_degree);
    const std::size_t boxes = prof.size() / n;
    double ss = 0.0;
    std::size_t covered = 0;
    for (std::size_t b = 0; b < boxes; ++b) {
        ss += detrender.residual_ss(prof.subspan(b * n, n));
        covered += n;
    }
    if (cover_tail) {
        const std::size_t offset = prof.size() - boxes * n;
        for (std::size_t b = 0; b < boxes; ++b) {
            ss += detrender.residual_ss(prof.subspan(offset + b * n, n));
            covered += n;
        }
    }
    return std::sqrt(ss / static_cast<double>(covered));
}

inline DfaResult estimate_hurst(std::span<const double> window, const DfaConfig& config = {})
{
    if (window.size() < kMinDfaWindow) {
        throw std::invalid_argument("DFA window needs at least " + std::to_string(kMinDfaWindow) +
                                    " points");
    }
    config.validate(window.size());
    const std::vector<double> prof = profile(window);

    DfaResult result;
    result.per_scale.reserve(config.scales.size());
    for (std::size_t n : config.scales) {
        const double f = fluctuation_at_scale(prof, n, config.detrend_degree, config.cover_tail);
        result.per_scale.push_back({n, f});
        if (f == 0.0) {
            result.degenerate = true;
        }
    }
    if (result.degenerate) {
        return result;
    }

    std::vector<double> log_n, log_f;
    for (const auto& [n, f] : result.per_scale) {
        if (config.fit_range && (n < config.fit_range->first || n > config.fit_range->second)) {
            continue;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_f.push_back(std::log(f));
    }
    if (log_n.size() < 2) {
        throw std::invalid_argument("DFA fit range selects fewer than two scales");
    }
    const stats::LinearFit fit = stats::ols_line(log_n, log_f);
    result.hurst = fit.slope;
    result.log_intercept = fit.intercept;
    result.r_squared = fit.r_squared;
    return result;
}

}  // namespace effimetrics

#endif
