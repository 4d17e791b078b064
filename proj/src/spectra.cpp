#include "splinepsd/spectra.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace splinepsd {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void check_centered(const TimeSeries& ts) {
    const double mean = mean_of(ts.values);
    double ss = 0.0;
    for (double x : ts.values) ss += (x - mean) * (x - mean);
    const double sd = ts.size() > 1 ? std::sqrt(ss / static_cast<double>(ts.size() - 1)) : 0.0;
    if (std::abs(mean) > 1e-8 * sd) {
        throw std::invalid_argument("periodogram input must be mean-centered");
    }
}

std::vector<double> fourier_frequencies(std::size_t n) {
    const std::size_t count = n >= 1 ? (n - 1) / 2 : 0;
    std::vector<double> freq(count);
    for (std::size_t l = 1; l <= count; ++l) {
        freq[l - 1] = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(n);
    }
    return freq;
}

} // namespace

void validate_series(const TimeSeries& ts) {
    if (ts.size() < 8) {
        throw std::invalid_argument("time series needs at least 8 observations, got " +
                                    std::to_string(ts.size()));
    }
    for (double x : ts.values) {
        if (!std::isfinite(x)) throw std::invalid_argument("time series contains non-finite values");
    }
    if (!(ts.sampling_interval > 0.0)) {
        throw std::invalid_argument("sampling interval must be positive");
    }
}

TimeSeries mean_center(const TimeSeries& ts) {
    TimeSeries out = ts;
    const double mean = mean_of(ts.values);
    for (double& x : out.values) x -= mean;
    return out;
}

TimeSeries difference(const TimeSeries& ts) {
    if (ts.size() < 2) throw std::invalid_argument("differencing needs at least two values");
    TimeSeries out{std::vector<double>(ts.size() - 1), ts.sampling_interval};
    for (std::size_t t = 0; t + 1 < ts.size(); ++t) {
        out.values[t] = ts.values[t + 1] - ts.values[t];
    }
    return out;
}

TimeSeries hann_window(const TimeSeries& ts) {
    TimeSeries out = ts;
    const std::size_t n = ts.size();
    if (n < 2) {
        for (double& x : out.values) x = 0.0;
        return out;
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t t = 0; t < n; ++t) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / denom));
        out.values[t] *= w;
    }
    return out;
}

TimeSeries sqrt_transform(const TimeSeries& ts) {
    TimeSeries out = ts;
    for (std::size_t t = 0; t < ts.size(); ++t) {
        if (ts.values[t] < 0.0) {
            throw std::domain_error("square root of negative value at index " + std::to_string(t));
        }
        out.values[t] = std::sqrt(ts.values[t]);
    }
    return out;
}

Periodogram periodogram(const TimeSeries& ts) {
    check_centered(ts);
    const std::size_t n = ts.size();
    Periodogram pg{fourier_frequencies(n), {}, n};
    pg.ordinates.resize(pg.frequencies.size());
    if (pg.frequencies.empty()) return pg;

    std::vector<double> in(ts.values);
    const std::size_t bins = n / 2 + 1;
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
    if (out == nullptr) throw std::bad_alloc();
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    const double scale = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(n));
    for (std::size_t l = 1; l <= pg.size(); ++l) {
        pg.ordinates[l - 1] = (out[l][0] * out[l][0] + out[l][1] * out[l][1]) * scale;
    }
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(out);
    return pg;
}

Periodogram periodogram_direct(const TimeSeries& ts) {
    check_centered(ts);
    const std::size_t n = ts.size();
    Periodogram pg{fourier_frequencies(n), {}, n};
    pg.ordinates.resize(pg.frequencies.size());
    for (std::size_t l = 0; l < pg.size(); ++l) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 1; t <= n; ++t) {
            acc += ts.values[t - 1] * std::polar(1.0, -static_cast<double>(t) * pg.frequencies[l]);
        }
        pg.ordinates[l] = std::norm(acc) / (2.0 * std::numbers::pi * static_cast<double>(n));
    }
    return pg;
}

double whittle_loglik(const Periodogram& pg, std::span<const double> psd) {
    if (psd.size() != pg.size()) {
        throw std::invalid_argument("spectrum length does not match periodogram");
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < psd.size(); ++l) {
        if (!(psd[l] > 0.0)) return -std::numeric_limits<double>::infinity();
        sum += std::log(psd[l]) + pg.ordinates[l] / psd[l];
    }
    return -sum;
}

ArModel::ArModel(std::vector<double> coefficients, double innovation_variance)
    : coefficients_(std::move(coefficients)), sigma2_(innovation_variance) {
    if (!(sigma2_ > 0.0)) throw std::invalid_argument("innovation variance must be positive");
    if (!is_stationary(coefficients_)) {
        throw std::invalid_argument("AR coefficients are not stationary");
    }
}

bool ArModel::is_stationary(std::span<const double> coefficients) {
    std::vector<double> a(coefficients.begin(), coefficients.end());
    for (std::size_t m = a.size(); m > 0; --m) {
        const double kappa = a[m - 1];
        if (!(std::abs(kappa) < 1.0)) return false;
        const double denom = 1.0 - kappa * kappa;
        std::vector<double> next(m - 1);
        for (std::size_t j = 0; j + 1 < m; ++j) {
            next[j] = (a[j] + kappa * a[m - 2 - j]) / denom;
        }
        a = std::move(next);
    }
    return true;
}

double ar_psd(const ArModel& model, double lambda) {
    std::complex<double> transfer{1.0, 0.0};
    const auto rho = model.coefficients();
    for (std::size_t j = 0; j < rho.size(); ++j) {
        transfer -= rho[j] * std::polar(1.0, -static_cast<double>(j + 1) * lambda);
    }
    return model.innovation_variance() / (2.0 * std::numbers::pi) / std::norm(transfer);
}

TimeSeries simulate_ar(const ArModel& model, std::size_t n, std::mt19937_64& rng) {
    const auto rho = model.coefficients();
    const std::size_t p = rho.size();
    const std::size_t warmup = std::max<std::size_t>(10 * p, 1000);
    std::normal_distribution<double> innovation(0.0, std::sqrt(model.innovation_variance()));

    std::vector<double> y(warmup + n, 0.0);
    for (std::size_t t = 0; t < y.size(); ++t) {
        double v = innovation(rng);
        for (std::size_t j = 0; j < p && j < t; ++j) v += rho[j] * y[t - 1 - j];
        y[t] = v;
    }
    return TimeSeries{std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(warmup), y.end()), 1.0};
}

} // namespace splinepsd
