#ifndef SPLINEPSD_SAMPLER_HPP
#define SPLINEPSD_SAMPLER_HPP

#include "splinepsd/prior.hpp"
#include "splinepsd/random.hpp"
#include "splinepsd/spectra.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace splinepsd {

struct McmcConfig {
    int iterations = 40000;
    int burn_in = 20000;
    int thin = 10;
    std::uint64_t seed = 1;

    /// Proposal half-width for coordinate l (1-based) of a block:
    /// l / (l + epsilon_scale * sqrt(n)).
    double epsilon_scale = 2.0;
    /// Probability of a local {-1, 0, +1} step for k; otherwise a rounded
    /// Cauchy jump.
    double k_local_prob = 0.75;
    double k_cauchy_scale = 3.0;

    int chains = 1;
    double t_min = 0.005;
    int swap_interval = 10;
    bool swaps_enabled = true;
    /// Worker threads for tempered runs; 0 picks hardware concurrency.
    int threads = 1;

    /// Emit a key=value progress line to the log stream every this many
    /// sweeps; 0 disables.
    int progress_interval = 0;

    // Blocks frozen at their initial values when false.
    bool update_v = true;
    bool update_z = true;
    bool update_u = true;
    bool update_x = true;
    bool update_k = true;
    bool update_tau = true;

    void validate() const;
    int stored_samples() const { return (iterations - burn_in) / thin; }
};

struct BlockStats {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    double rate() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed); }
};

struct AcceptanceStats {
    BlockStats v, z, u, x, k;
};

/// Post-burn-in, thinned output of the target (inverse temperature 1) chain.
struct ChainTrace {
    std::vector<int> iterations;
    std::vector<SamplerState> states;
    std::vector<double> loglik;
    /// Row-major samples x grid matrix of f(lambda_l).
    std::vector<double> psd;
    std::size_t grid_size = 0;

    AcceptanceStats acceptance;
    std::vector<double> inverse_temperatures;
    /// Swap statistics for adjacent pairs (c, c + 1).
    std::vector<BlockStats> swaps;
    /// State after the last sweep.
    SamplerState final_state;

    std::size_t size() const { return states.size(); }
    std::span<const double> curve(std::size_t i) const { return {psd.data() + i * grid_size, grid_size}; }
};

/// Tempered run output: the cold chain trace plus every chain's final state.
struct TemperedResult {
    ChainTrace cold;
    std::vector<SamplerState> final_states;
};

/// Maps x into [0, 1): fractional part above 1, plus one below 0.
double wrap_circular(double x);

/// Uniform draw on [x - eps, x + eps], wrapped onto the circle.
double propose_circular(double x, double eps, Rng& rng);

double epsilon_schedule(int l, std::size_t n, double scale = 2.0);

struct KProposal {
    int k;
    /// True when the raw candidate fell outside [k_min, k_max] and was
    /// clamped; such proposals are rejected.
    bool clamped;
};

KProposal propose_k(int k, int k_min, int k_max, const McmcConfig& cfg, Rng& rng);

/// Exact conditional draw of tau given the spectral shape s_l at the
/// Fourier frequencies: IG(alpha + beta N, rate + beta sum I_l / s_l) at
/// inverse temperature beta.
double gibbs_tau(const Periodogram& pg, std::span<const double> shape, const PriorConfig& cfg,
                 Rng& rng, double inverse_temperature = 1.0);

/// Evaluates the normalized mixture s_r at a fixed set of omega values,
/// caching basis tables across calls.
class ShapeEvaluator {
public:
    ShapeEvaluator(const PriorConfig& cfg, std::vector<double> omegas);
    ~ShapeEvaluator();
    ShapeEvaluator(const ShapeEvaluator&);
    ShapeEvaluator& operator=(const ShapeEvaluator&) = delete;

    /// Writes s(omega_i) for every grid point into out.
    void evaluate(const SamplerState& state, std::span<double> out);

    std::size_t size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Shape plus the two sums the Whittle likelihood needs, so that the
/// log-likelihood at any tau is -N log tau - sum log s - (1/tau) sum I/s.
struct ShapeSums {
    double sum_log = 0.0;
    double sum_ratio = 0.0;
    bool valid = false;
};

ShapeSums shape_sums(const Periodogram& pg, std::span<const double> shape);
double loglik_from_sums(const ShapeSums& sums, std::size_t n_freq, double tau);

/// Starting point: sticks and atoms from their priors, k = min(r + 7,
/// k_max), tau = mean periodogram ordinate. Redrawn until the likelihood
/// is finite.
SamplerState initial_state(const Periodogram& pg, const PriorConfig& prior, Rng& rng);

/// One Metropolis-within-Gibbs sweep at the given inverse temperature.
/// Optional stats accumulate per-block acceptance counts.
SamplerState mh_sweep(const SamplerState& state, const Periodogram& pg, const PriorConfig& prior,
                      const McmcConfig& mcmc, double inverse_temperature, Rng& rng,
                      AcceptanceStats* stats = nullptr);

ChainTrace run_chain(const Periodogram& pg, const PriorConfig& prior, const McmcConfig& mcmc,
                     std::ostream* log = nullptr);

/// T_c^{-1} = t_min^{(c - 1)/(C - 1)}, c = 1..C.
std::vector<double> inverse_temperature_ladder(int chains, double t_min);

/// log of the swap acceptance ratio between chains i and j with
/// likelihood-only tempering: (beta_i - beta_j) (loglik_j - loglik_i).
double swap_log_ratio(double loglik_i, double loglik_j, double beta_i, double beta_j);

TemperedResult run_tempered(const Periodogram& pg, const PriorConfig& prior, const McmcConfig& mcmc,
                            std::ostream* log = nullptr);

} // namespace splinepsd

#endif // SPLINEPSD_SAMPLER_HPP
