#include "splinepsd/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace splinepsd {

namespace {

void check_samples(const PsdSamples& samples) {
    if (samples.grid.empty() || samples.values.empty()) throw std::invalid_argument("no posterior samples");
    if (samples.values.size() % samples.grid.size() != 0) {
        throw std::invalid_argument("sample matrix does not match the grid");
    }
}

std::vector<double> column(const PsdSamples& samples, std::size_t g) {
    const std::size_t s_count = samples.count();
    std::vector<double> col(s_count);
    for (std::size_t s = 0; s < s_count; ++s) col[s] = samples.values[s * samples.grid_size() + g];
    return col;
}

} // namespace

double quantile_inplace(std::span<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    p = std::clamp(p, 0.0, 1.0);
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median_inplace(std::span<double> values) { return quantile_inplace(values, 0.5); }

PointwiseSummary pointwise_summary(const PsdSamples& samples, double alpha) {
    check_samples(samples);
    const std::size_t g_count = samples.grid_size();
    PointwiseSummary out{std::vector<double>(g_count), std::vector<double>(g_count), std::vector<double>(g_count)};
    for (std::size_t g = 0; g < g_count; ++g) {
        auto col = column(samples, g);
        out.median[g] = quantile_inplace(col, 0.5);
        out.lower[g] = quantile_inplace(col, alpha / 2.0);
        out.upper[g] = quantile_inplace(col, 1.0 - alpha / 2.0);
    }
    return out;
}

UniformBand uniform_band(const PsdSamples& samples, double alpha) {
    check_samples(samples);
    const std::size_t g_count = samples.grid_size();
    const std::size_t s_count = samples.count();
    UniformBand band;
    band.median.resize(g_count);
    band.mad.resize(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
        auto col = column(samples, g);
        const double med = median_inplace(col);
        for (double& v : col) v = std::abs(v - med);
        band.median[g] = med;
        band.mad[g] = median_inplace(col);
    }

    band.max_deviation.assign(s_count, 0.0);
    bool any_spread = false;
    for (std::size_t s = 0; s < s_count; ++s) {
        const auto curve = samples.curve(s);
        double m = 0.0;
        for (std::size_t g = 0; g < g_count; ++g) {
            if (band.mad[g] > 0.0) {
                any_spread = true;
                m = std::max(m, std::abs(curve[g] - band.median[g]) / band.mad[g]);
            }
        }
        band.max_deviation[s] = m;
    }
    band.degenerate = !any_spread;
    if (!band.degenerate) {
        auto m = band.max_deviation;
        band.zeta = quantile_inplace(m, 1.0 - alpha);
    }

    band.lower.resize(g_count);
    band.upper.resize(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
        band.lower[g] = band.median[g] - band.zeta * band.mad[g];
        band.upper[g] = band.median[g] + band.zeta * band.mad[g];
    }
    return band;
}

double iae(std::span<const double> grid, std::span<const double> estimate, const SpectralDensity& truth,
           std::size_t points) {
    if (grid.empty() || grid.size() != estimate.size()) throw std::invalid_argument("estimate does not match grid");
    if (points < 2) throw std::invalid_argument("need at least two quadrature nodes");
    const double h = std::numbers::pi / static_cast<double>(points - 1);
    std::size_t seg = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double w = i * h;
        double est = 0.0;
        if (w <= grid.front()) {
            est = estimate.front();
        } else if (w >= grid.back()) {
            est = estimate.back();
        } else {
            while (grid[seg + 1] < w) ++seg;
            const double t = (w - grid[seg]) / (grid[seg + 1] - grid[seg]);
            est = estimate[seg] + t * (estimate[seg + 1] - estimate[seg]);
        }
        const double weight = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        total += weight * std::abs(est - truth(w));
    }
    return total * h;
}

bool covered(const SpectralDensity& truth, std::span<const double> grid, std::span<const double> lower,
             std::span<const double> upper) {
    if (grid.size() != lower.size() || grid.size() != upper.size()) {
        throw std::invalid_argument("band does not match grid");
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double f = truth(grid[g]);
        if (f < lower[g] || f > upper[g]) return false;
    }
    return true;
}

PosteriorSummary summarize(const PsdSamples& samples, double alpha) {
    PosteriorSummary out;
    out.frequencies = samples.grid;
    out.pointwise = pointwise_summary(samples, alpha);
    out.uniform = uniform_band(samples, alpha);
    return out;
}

void write_summary_csv(std::ostream& os, const PosteriorSummary& summary) {
    os << "freq,median,lo_point,hi_point,lo_unif,hi_unif\n";
    for (std::size_t g = 0; g < summary.frequencies.size(); ++g) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", summary.frequencies[g],
                          summary.pointwise.median[g], summary.pointwise.lower[g], summary.pointwise.upper[g],
                          summary.uniform.lower[g], summary.uniform.upper[g]);
    }
}

} // namespace splinepsd
