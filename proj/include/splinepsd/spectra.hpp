#ifndef SPLINEPSD_SPECTRA_HPP
#define SPLINEPSD_SPECTRA_HPP

#include <random>
#include <span>
#include <vector>

namespace splinepsd {

/// Equally spaced observations. The sampling interval is metadata used to
/// convert angular frequency to physical units.
struct TimeSeries {
    std::vector<double> values;
    double sampling_interval = 1.0;

    std::size_t size() const { return values.size(); }
};

/// Checks the estimation preconditions (n >= 8, finite values, positive
/// sampling interval); throws std::invalid_argument otherwise.
void validate_series(const TimeSeries& ts);

TimeSeries mean_center(const TimeSeries& ts);
/// First differences y[t+1] - y[t]; needs at least two values.
TimeSeries difference(const TimeSeries& ts);
/// Symmetric Hann taper 0.5 (1 - cos(2 pi t / (n - 1))), zero at both ends.
TimeSeries hann_window(const TimeSeries& ts);
/// Elementwise square root; throws on negative input.
TimeSeries sqrt_transform(const TimeSeries& ts);

/// Periodogram ordinates at the positive Fourier frequencies
/// lambda_l = 2 pi l / n, l = 1 .. floor((n - 1) / 2).
struct Periodogram {
    std::vector<double> frequencies;
    std::vector<double> ordinates;
    std::size_t series_length = 0;

    std::size_t size() const { return ordinates.size(); }
};

/// |sum_t y_t exp(-i t lambda)|^2 / (2 pi n), computed with a real FFT.
/// The input must be mean-centered (|mean| <= 1e-8 sd).
Periodogram periodogram(const TimeSeries& ts);

/// Same ordinates by direct O(n^2) summation. Used as a cross-check.
Periodogram periodogram_direct(const TimeSeries& ts);

/// Whittle log-likelihood -sum_l [log f_l + I_l / f_l]. Returns -infinity
/// when any f_l is not strictly positive, which callers treat as an
/// automatic rejection.
double whittle_loglik(const Periodogram& pg, std::span<const double> psd);

/// Causal autoregressive model y_t = sum_j rho_j y_{t-j} + e_t,
/// e_t ~ N(0, sigma^2). Construction rejects non-stationary coefficients.
class ArModel {
public:
    explicit ArModel(std::vector<double> coefficients, double innovation_variance = 1.0);

    std::span<const double> coefficients() const { return coefficients_; }
    double innovation_variance() const { return sigma2_; }
    std::size_t order() const { return coefficients_.size(); }

    /// Stationarity via the step-down (reverse Levinson) recursion: every
    /// reflection coefficient must lie strictly inside (-1, 1).
    static bool is_stationary(std::span<const double> coefficients);

private:
    std::vector<double> coefficients_;
    double sigma2_;
};

/// sigma^2 / (2 pi) / |1 - sum_j rho_j exp(-i j lambda)|^2.
double ar_psd(const ArModel& model, double lambda);

/// Gaussian AR realization of length n after discarding max(10 p, 1000)
/// warm-up samples.
TimeSeries simulate_ar(const ArModel& model, std::size_t n, std::mt19937_64& rng);

} // namespace splinepsd

#endif // SPLINEPSD_SPECTRA_HPP
