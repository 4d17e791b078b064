#ifndef SPLINEPSD_PRIOR_HPP
#define SPLINEPSD_PRIOR_HPP

#include "splinepsd/random.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace splinepsd {

enum class PriorFamily { bspline, bernstein };

std::string to_string(PriorFamily family);
PriorFamily parse_prior_family(const std::string& name);

/// Base measure of a Dirichlet process on [0, 1]: a log-density and a
/// matching sampler.
struct BaseDistribution {
    std::string name;
    std::function<double(double)> log_density;
    std::function<double(Rng&)> sample;

    static BaseDistribution uniform();
};

struct PriorConfig {
    PriorFamily family = PriorFamily::bspline;
    int degree = 3;
    int k_max = 500;
    double theta_k = 0.01;
    double mass_g = 1.0;
    double mass_h = 1.0;
    BaseDistribution base_g = BaseDistribution::uniform();
    BaseDistribution base_h = BaseDistribution::uniform();
    double tau_shape = 0.001;
    double tau_rate = 0.001;
    int truncation_g = 20;
    int truncation_h = 20;

    /// Smallest admissible mixture size: r + 1 for B-splines, 1 for
    /// Bernstein polynomials.
    int k_min() const { return family == PriorFamily::bspline ? degree + 1 : 1; }
    bool uses_knots() const { return family == PriorFamily::bspline; }

    void validate() const;

    /// max(20, n^(1/3)), rounded up.
    static int default_truncation(std::size_t n);
};

/// Full parameter vector of one chain. The knot block (u, x) is empty for
/// the Bernstein family.
struct SamplerState {
    std::vector<double> v;
    std::vector<double> z;
    std::vector<double> u;
    std::vector<double> x;
    int k = 1;
    double tau = 1.0;

    bool operator==(const SamplerState&) const = default;
};

bool is_valid(const SamplerState& state, const PriorConfig& cfg);

/// Stick-breaking masses (p_0, p_1, ..., p_L) from sticks V_1..V_L, with
/// p_0 the leftover mass.
std::vector<double> stick_masses(std::span<const double> sticks);

/// Zero-based bin j in [0, bins) with j / bins < atom <= (j + 1) / bins;
/// atoms at exactly 0 go to bin 0.
int atom_bin(double atom, int bins);

/// Mixture weights w_j = sum_l p_l 1{(j-1)/k < Z_l <= j/k}.
std::vector<double> weights_from_G(std::span<const double> masses,
                                   std::span<const double> atoms, int k);

/// Internal knot differences over k - r bins, renormalized to sum to one.
std::vector<double> knot_diffs_from_H(std::span<const double> masses,
                                      std::span<const double> atoms, int k, int degree);

/// p(k) proportional to exp(-theta k^2) on [k_min, k_max], with the
/// normalizing constant computed exactly.
class KPrior {
public:
    explicit KPrior(const PriorConfig& cfg);
    double log_pmf(int k) const;
    double pmf(int k) const;
    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }

private:
    int k_min_;
    int k_max_;
    std::vector<double> log_pmf_;
};

double log_inverse_gamma(double x, double shape, double scale);
double log_beta_density(double x, double a, double b);

/// Joint log-prior of a state; -infinity for invalid states or states of
/// zero prior density.
double log_prior(const SamplerState& state, const PriorConfig& cfg);

/// f(pi omega) = tau sum_j w_j b_j(omega; xi) on a grid of omega in [0, 1].
std::vector<double> state_to_psd(const SamplerState& state, const PriorConfig& cfg,
                                 std::span<const double> omegas);

/// Bernstein baseline: f(pi omega) = tau sum_j w_j Beta(omega; j, k - j + 1).
std::vector<double> bernstein_state_to_psd(const SamplerState& state, const PriorConfig& cfg,
                                           std::span<const double> omegas);

/// Dispatches on cfg.family.
std::vector<double> family_state_to_psd(const SamplerState& state, const PriorConfig& cfg,
                                        std::span<const double> omegas);

/// Draws sticks, atoms, k and tau independently from their priors.
SamplerState sample_prior_state(const PriorConfig& cfg, Rng& rng);

} // namespace splinepsd

#endif // SPLINEPSD_PRIOR_HPP
