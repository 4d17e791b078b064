#ifndef SPLINEPSD_SUMMARY_HPP
#define SPLINEPSD_SUMMARY_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace splinepsd {

/// S posterior curves evaluated on a common grid, stored row-major.
struct PsdSamples {
    std::vector<double> grid;
    std::vector<double> values;

    std::size_t grid_size() const { return grid.size(); }
    std::size_t count() const { return grid.empty() ? 0 : values.size() / grid.size(); }
    std::span<const double> curve(std::size_t i) const { return {values.data() + i * grid.size(), grid.size()}; }
};

/// Quantile with linear interpolation between order statistics
/// (position p (S - 1) in the sorted sample). Sorts in place.
double quantile_inplace(std::span<double> values, double p);
double median_inplace(std::span<double> values);

struct PointwiseSummary {
    std::vector<double> median;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Per-grid-point median and alpha/2, 1 - alpha/2 quantiles.
PointwiseSummary pointwise_summary(const PsdSamples& samples, double alpha);

struct UniformBand {
    std::vector<double> median;
    std::vector<double> mad;
    std::vector<double> lower;
    std::vector<double> upper;
    /// Per-sample max normalized deviation m_i.
    std::vector<double> max_deviation;
    double zeta = 0.0;
    /// Set when every grid point has zero dispersion; the band then has
    /// zero width everywhere.
    bool degenerate = false;
};

/// Uniform band median +- zeta * mad, where mad is the unscaled median
/// absolute deviation and zeta the (1 - alpha) quantile of
/// m_i = max_lambda |f_i - median| / mad. Points with mad = 0 are skipped
/// in the max and get a zero-width band.
UniformBand uniform_band(const PsdSamples& samples, double alpha);

using SpectralDensity = std::function<double(double)>;

/// Integrated absolute error over [0, pi]. The estimate, known at the grid
/// frequencies, is linearly interpolated and held constant beyond the end
/// points; the integral is a trapezoidal rule over `points` nodes.
double iae(std::span<const double> grid, std::span<const double> estimate, const SpectralDensity& truth,
           std::size_t points = 4096);

/// True iff lower <= truth <= upper at every grid frequency.
bool covered(const SpectralDensity& truth, std::span<const double> grid, std::span<const double> lower,
             std::span<const double> upper);

struct PosteriorSummary {
    std::vector<double> frequencies;
    PointwiseSummary pointwise;
    UniformBand uniform;
    std::vector<int> k_trace;
    std::vector<double> tau_trace;
};

PosteriorSummary summarize(const PsdSamples& samples, double alpha);

/// CSV with columns freq,median,lo_point,hi_point,lo_unif,hi_unif.
void write_summary_csv(std::ostream& os, const PosteriorSummary& summary);

} // namespace splinepsd

#endif // SPLINEPSD_SUMMARY_HPP
