#ifndef EFFIMETRICS_SYNTHETIC_HPP
#define EFFIMETRICS_SYNTHETIC_HPP

// Ground-truth series: exact fractional Gaussian noise with a known Hurst
// exponent, and i.i.d. Gaussian surrogates carrying a source's first two
// moments.

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effimetrics/random.hpp"
#include "effimetrics/stats.hpp"
#include "effimetrics/timeseries.hpp"

namespace effimetrics {

/// `count` consecutive weekdays starting at `start` (or the next weekday).
inline std::vector<Date> business_days(Date start, std::size_t count)
{
    using namespace std::chrono;
    std::vector<Date> out;
    out.reserve(count);
    sys_days d{start};
    while (out.size() < count) {
        const unsigned wd = weekday{d}.c_encoding();
        if (wd != 0 && wd != 6) {
            out.emplace_back(d);
        }
        d += days{1};
    }
    return out;
}

inline constexpr Date kSyntheticStart{std::chrono::year{1992}, std::chrono::month{1},
                                      std::chrono::day{2}};

enum class FgnMethod {
    automatic,  // circulant embedding, covariance factorisation if it fails
    circulant,
    levinson,
};

struct FgnSpec {
    double hurst = 0.5;
    std::size_t n = 1024;
    std::uint64_t seed = 0;
    double scale = 1.0;
    FgnMethod method = FgnMethod::automatic;
    std::string market_id = "fgn";

    void validate() const
    {
        if (!(hurst > 0.0 && hurst < 1.0)) {
            throw std::invalid_argument("fGn Hurst target must lie in (0, 1)");
        }
        if (n < 64) {
            throw std::invalid_argument("fGn length must be at least 64");
        }
        if (!(scale > 0.0)) {
            throw std::invalid_argument("fGn scale must be positive");
        }
    }
};

/// gamma(k) = scale^2 / 2 * (|k+1|^2H - 2|k|^2H + |k-1|^2H)
inline double fgn_autocovariance(std::size_t lag, double hurst, double scale = 1.0)
{
    const double k = static_cast<double>(lag);
    const double h2 = 2.0 * hurst;
    const double g = 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                            std::pow(std::abs(k - 1.0), h2));
    return scale * scale * g;
}

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

// In-place forward complex DFT. FFTW planning is not thread-safe; execution is.
inline void forward_dft(std::vector<std::complex<double>>& data)
{
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (plan == nullptr) {
        throw std::runtime_error("FFTW could not create a plan");
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

// Davies-Harte / Wood-Chan. Returns false when the circulant has an
// eigenvalue that is negative beyond rounding.
inline bool fgn_circulant(const FgnSpec& spec, std::vector<double>& out)
{
    std::size_t m = 2;
    while (m < 2 * (spec.n - 1)) {
        m *= 2;
    }
    const std::size_t half = m / 2;
    std::vector<std::complex<double>> lambda(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t lag = j <= half ? j : m - j;
        lambda[j] = fgn_autocovariance(lag, spec.hurst, spec.scale);
    }
    forward_dft(lambda);
    double max_eig = 0.0;
    for (const auto& l : lambda) {
        max_eig = std::max(max_eig, l.real());
    }
    std::vector<double> eig(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double v = lambda[k].real();
        if (v < -1e-10 * max_eig) {
            return false;
        }
        eig[k] = std::max(v, 0.0);
    }

    GaussianStream rng(spec.seed);
    const double md = static_cast<double>(m);
    std::vector<std::complex<double>> w(m);
    w[0] = std::sqrt(eig[0] / md) * rng.normal();
    w[half] = std::sqrt(eig[half] / md) * rng.normal();
    for (std::size_t k = 1; k < half; ++k) {
        const double s = std::sqrt(eig[k] / (2.0 * md));
        const double re = rng.normal();
        const double im = rng.normal();
        w[k] = {s * re, s * im};
        w[m - k] = std::conj(w[k]);
    }
    forward_dft(w);
    out.resize(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        out[j] = w[j].real();
    }
    return true;
}

// Sequential innovations via Durbin-Levinson: O(n^2), exact for any valid
// autocovariance.
inline void fgn_levinson(const FgnSpec& spec, std::vector<double>& out)
{
    const std::size_t n = spec.n;
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) {
        gamma[k] = fgn_autocovariance(k, spec.hurst, spec.scale);
    }
    GaussianStream rng(spec.seed);
    out.assign(n, 0.0);
    std::vector<double> phi_coef, prev;
    double v = gamma[0];
    out[0] = std::sqrt(v) * rng.normal();
    for (std::size_t t = 1; t < n; ++t) {
        double num = gamma[t];
        for (std::size_t j = 1; j < t; ++j) {
            num -= phi_coef[j - 1] * gamma[t - j];
        }
        const double kappa = num / v;
        prev = phi_coef;
        phi_coef.resize(t);
        for (std::size_t j = 1; j < t; ++j) {
            phi_coef[j - 1] = prev[j - 1] - kappa * prev[t - j - 1];
        }
        phi_coef[t - 1] = kappa;
        v *= (1.0 - kappa * kappa);
        if (!(v > 0.0)) {
            throw std::domain_error("fGn covariance is not positive definite");
        }
        double pred = 0.0;
        for (std::size_t j = 1; j <= t; ++j) {
            pred += phi_coef[j - 1] * out[t - j];
        }
        out[t] = pred + std::sqrt(v) * rng.normal();
    }
}

}  // namespace detail

inline ReturnSeries gen_fgn(const FgnSpec& spec)
{
    spec.validate();
    std::vector<double> values;
    switch (spec.method) {
    case FgnMethod::circulant:
        if (!detail::fgn_circulant(spec, values)) {
            throw std::domain_error("fGn circulant embedding is not non-negative definite");
        }
        break;
    case FgnMethod::levinson:
        detail::fgn_levinson(spec, values);
        break;
    case FgnMethod::automatic:
        if (!detail::fgn_circulant(spec, values)) {
            detail::fgn_levinson(spec, values);
        }
        break;
    }
    return ReturnSeries(spec.market_id, business_days(kSyntheticStart, spec.n), std::move(values));
}

struct SurrogateSpec {
    double mean = 0.0;
    double std = 1.0;
    std::size_t n = 1024;
    std::uint64_t seed = 0;
    std::string market_id = "surrogate";
};

inline ReturnSeries gen_surrogate(const SurrogateSpec& spec)
{
    if (!(spec.std > 0.0)) {
        throw std::invalid_argument("surrogate standard deviation must be positive");
    }
    GaussianStream rng(spec.seed);
    std::vector<double> values(spec.n);
    for (double& v : values) {
        v = spec.mean + spec.std * rng.normal();
    }
    return ReturnSeries(spec.market_id, business_days(kSyntheticStart, spec.n), std::move(values));
}

/// i.i.d. Gaussian series with the source's sample mean, sample standard
/// deviation, length, dates and market id.
inline ReturnSeries moment_match(const ReturnSeries& source, std::uint64_t seed)
{
    if (source.size() < 2) {
        throw std::invalid_argument("moment_match needs at least 2 observations");
    }
    if (stats::is_constant(source.values())) {
        throw std::invalid_argument("moment_match: source series is constant");
    }
    const double sd = stats::sample_std(source.values());
    SurrogateSpec spec{stats::mean(source.values()), sd, source.size(), seed, source.market_id()};
    const ReturnSeries draws = gen_surrogate(spec);
    std::vector<double> values = draws.values();
    return ReturnSeries(source.market_id(), source.dates(), std::move(values));
}

/// Prices whose log returns are `returns`, starting from `start_price` on the
/// business day before the first return.
inline PriceSeries prices_from_returns(const ReturnSeries& returns, double start_price)
{
    using namespace std::chrono;
    std::vector<PriceSeries::Observation> obs;
    obs.reserve(returns.size() + 1);
    Date first_date = kSyntheticStart;
    if (!returns.dates().empty()) {
        sys_days d{returns.dates().front()};
        do {
            d -= days{1};
        } while (weekday{d}.c_encoding() == 0 || weekday{d}.c_encoding() == 6);
        first_date = Date{d};
    }
    obs.push_back({first_date, start_price});
    double log_p = std::log(start_price);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        log_p += returns.values()[i];
        obs.push_back({returns.dates()[i], std::exp(log_p)});
    }
    return PriceSeries(returns.market_id(), std::move(obs));
}

struct PanelSpec {
    std::size_t markets = 27;
    double hurst_min = 0.45;
    double hurst_max = 0.70;
    std::size_t n = 15 * kTradingDaysPerYear;  // returns per market
    double scale = 0.01;
    std::uint64_t seed = 1;
};

struct SyntheticMarket {
    ReturnSeries returns;
    double hurst_target = 0.5;
};

inline std::string panel_market_id(std::size_t j)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "M%02zu", j + 1);
    return buf;
}

/// fGn markets with targets drawn uniformly on [hurst_min, hurst_max].
/// Stream 0 of the panel seed draws the targets; stream j+1 drives market j.
inline std::vector<SyntheticMarket> make_panel(const PanelSpec& spec)
{
    if (spec.markets == 0 || !(spec.hurst_min <= spec.hurst_max)) {
        throw std::invalid_argument("panel needs at least one market and hurst_min <= hurst_max");
    }
    GaussianStream targets(derive_seed(spec.seed, 0));
    std::vector<SyntheticMarket> out;
    out.reserve(spec.markets);
    for (std::size_t j = 0; j < spec.markets; ++j) {
        FgnSpec f;
        f.hurst = spec.hurst_min + (spec.hurst_max - spec.hurst_min) * targets.uniform();
        f.n = spec.n;
        f.seed = derive_seed(spec.seed, j + 1);
        f.scale = spec.scale;
        f.market_id = panel_market_id(j);
        out.push_back({gen_fgn(f), f.hurst});
    }
    return out;
}

/// Moment-matched surrogate of every market; market j uses stream 1000+j.
inline std::vector<ReturnSeries> surrogate_panel(std::span<const ReturnSeries> markets,
                                                 std::uint64_t seed)
{
    std::vector<ReturnSeries> out;
    out.reserve(markets.size());
    for (std::size_t j = 0; j < markets.size(); ++j) {
        out.push_back(moment_match(markets[j], derive_seed(seed, 1000 + j)));
    }
    return out;
}

}  // namespace effimetrics

#endif
