#include "splinepsd/prior.hpp"

#include "splinepsd/splines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace splinepsd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

bool all_in_unit(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), in_unit);
}

double log_stick_density(double v, double mass) {
    if (mass == 1.0) return 0.0;
    return std::log(mass) + (mass - 1.0) * std::log1p(-v);
}

double sample_stick(double mass, Rng& rng) {
    // Inverse cdf of Beta(1, M).
    return 1.0 - std::pow(1.0 - uniform01(rng), 1.0 / mass);
}

} // namespace

std::string to_string(PriorFamily family) {
    return family == PriorFamily::bspline ? "bspline" : "bernstein";
}

PriorFamily parse_prior_family(const std::string& name) {
    if (name == "bspline") return PriorFamily::bspline;
    if (name == "bernstein") return PriorFamily::bernstein;
    throw std::invalid_argument("unknown prior family '" + name + "'");
}

BaseDistribution BaseDistribution::uniform() {
    return BaseDistribution{
        "uniform",
        [](double x) { return in_unit(x) ? 0.0 : kNegInf; },
        [](Rng& rng) { return uniform01(rng); },
    };
}

void PriorConfig::validate() const {
    if (degree < 0) throw std::invalid_argument("degree must be nonnegative");
    if (k_max < k_min()) throw std::invalid_argument("k_max must be at least " + std::to_string(k_min()));
    if (!(theta_k > 0.0)) throw std::invalid_argument("theta_k must be positive");
    if (!(mass_g > 0.0) || !(mass_h > 0.0)) throw std::invalid_argument("DP precisions must be positive");
    if (!(tau_shape > 0.0) || !(tau_rate > 0.0)) throw std::invalid_argument("tau prior parameters must be positive");
    if (truncation_g < 1 || (uses_knots() && truncation_h < 1)) {
        throw std::invalid_argument("stick-breaking truncation must be at least 1");
    }
    if (!base_g.log_density || !base_g.sample || (uses_knots() && (!base_h.log_density || !base_h.sample))) {
        throw std::invalid_argument("base distribution is incomplete");
    }
}

int PriorConfig::default_truncation(std::size_t n) {
    const double c = std::cbrt(static_cast<double>(n));
    return std::max(20, static_cast<int>(std::ceil(c - 1e-9)));
}

bool is_valid(const SamplerState& s, const PriorConfig& cfg) {
    const auto lg = static_cast<std::size_t>(cfg.truncation_g);
    if (s.v.size() != lg || s.z.size() != lg + 1) return false;
    if (!all_in_unit(s.v) || !all_in_unit(s.z)) return false;
    if (cfg.uses_knots()) {
        const auto lh = static_cast<std::size_t>(cfg.truncation_h);
        if (s.u.size() != lh || s.x.size() != lh + 1) return false;
        if (!all_in_unit(s.u) || !all_in_unit(s.x)) return false;
    }
    if (s.k < cfg.k_min() || s.k > cfg.k_max) return false;
    return s.tau > 0.0 && std::isfinite(s.tau);
}

std::vector<double> stick_masses(std::span<const double> sticks) {
    std::vector<double> p(sticks.size() + 1);
    double remaining = 1.0;
    for (std::size_t l = 0; l < sticks.size(); ++l) {
        if (!in_unit(sticks[l])) throw std::invalid_argument("stick outside [0, 1]");
        p[l + 1] = remaining * sticks[l];
        remaining *= 1.0 - sticks[l];
    }
    p[0] = remaining;
    return p;
}

int atom_bin(double atom, int bins) {
    const double scaled = atom * bins;
    int j = static_cast<int>(std::ceil(scaled)) - 1;
    j = std::clamp(j, 0, bins - 1);
    // Repair rounding so the bin matches the literal comparisons.
    while (j > 0 && atom <= static_cast<double>(j) / bins) --j;
    while (j < bins - 1 && atom > static_cast<double>(j + 1) / bins) ++j;
    return j;
}

std::vector<double> weights_from_G(std::span<const double> masses,
                                   std::span<const double> atoms, int k) {
    if (masses.size() != atoms.size()) throw std::invalid_argument("masses and atoms differ in length");
    if (k < 1) throw std::invalid_argument("mixture size must be positive");
    std::vector<double> w(static_cast<std::size_t>(k), 0.0);
    for (std::size_t l = 0; l < atoms.size(); ++l) {
        w[atom_bin(atoms[l], k)] += masses[l];
    }
    return w;
}

std::vector<double> knot_diffs_from_H(std::span<const double> masses,
                                      std::span<const double> atoms, int k, int degree) {
    if (k <= degree) throw std::invalid_argument("knot differences need k > degree");
    auto deltas = weights_from_G(masses, atoms, k - degree);
    const double total = std::accumulate(deltas.begin(), deltas.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("knot measure carries no mass");
    for (double& d : deltas) d /= total;
    return deltas;
}

KPrior::KPrior(const PriorConfig& cfg) : k_min_(cfg.k_min()), k_max_(cfg.k_max) {
    if (k_max_ < k_min_) throw std::invalid_argument("empty support for k");
    log_pmf_.resize(static_cast<std::size_t>(k_max_ - k_min_ + 1));
    double top = kNegInf;
    for (int k = k_min_; k <= k_max_; ++k) {
        const double v = -cfg.theta_k * static_cast<double>(k) * static_cast<double>(k);
        log_pmf_[k - k_min_] = v;
        top = std::max(top, v);
    }
    double sum = 0.0;
    for (double v : log_pmf_) sum += std::exp(v - top);
    const double log_norm = top + std::log(sum);
    for (double& v : log_pmf_) v -= log_norm;
}

double KPrior::log_pmf(int k) const {
    if (k < k_min_ || k > k_max_) return kNegInf;
    return log_pmf_[k - k_min_];
}

double KPrior::pmf(int k) const { return std::exp(log_pmf(k)); }

double log_inverse_gamma(double x, double shape, double scale) {
    if (!(x > 0.0)) return kNegInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_beta_density(double x, double a, double b) {
    if (x < 0.0 || x > 1.0) return kNegInf;
    const double norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    double v = norm;
    if (a != 1.0) v += (a - 1.0) * std::log(x);
    if (b != 1.0) v += (b - 1.0) * std::log1p(-x);
    return v;
}

double log_prior(const SamplerState& s, const PriorConfig& cfg) {
    if (!is_valid(s, cfg)) return kNegInf;
    double lp = 0.0;
    for (double v : s.v) lp += log_stick_density(v, cfg.mass_g);
    for (double z : s.z) lp += cfg.base_g.log_density(z);
    if (cfg.uses_knots()) {
        for (double u : s.u) lp += log_stick_density(u, cfg.mass_h);
        for (double x : s.x) lp += cfg.base_h.log_density(x);
    }
    lp += KPrior(cfg).log_pmf(s.k);
    lp += log_inverse_gamma(s.tau, cfg.tau_shape, cfg.tau_rate);
    return std::isnan(lp) ? kNegInf : lp;
}

std::vector<double> state_to_psd(const SamplerState& s, const PriorConfig& cfg,
                                 std::span<const double> omegas) {
    if (!is_valid(s, cfg)) throw std::invalid_argument("invalid sampler state");
    const auto weights = weights_from_G(stick_masses(s.v), s.z, s.k);
    const auto deltas = knot_diffs_from_H(stick_masses(s.u), s.x, s.k, cfg.degree);
    const BsplineDensityBasis basis(build_knots(deltas, cfg.degree));
    std::vector<double> psd(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        psd[i] = s.tau * eval_mixture(omegas[i], weights, basis);
    }
    return psd;
}

std::vector<double> bernstein_state_to_psd(const SamplerState& s, const PriorConfig& cfg,
                                           std::span<const double> omegas) {
    if (!is_valid(s, cfg)) throw std::invalid_argument("invalid sampler state");
    const auto weights = weights_from_G(stick_masses(s.v), s.z, s.k);
    std::vector<double> psd(omegas.size(), 0.0);
    for (int j = 1; j <= s.k; ++j) {
        const double w = weights[j - 1];
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            psd[i] += w * std::exp(log_beta_density(omegas[i], j, s.k - j + 1));
        }
    }
    for (double& f : psd) f *= s.tau;
    return psd;
}

std::vector<double> family_state_to_psd(const SamplerState& s, const PriorConfig& cfg,
                                        std::span<const double> omegas) {
    return cfg.uses_knots() ? state_to_psd(s, cfg, omegas) : bernstein_state_to_psd(s, cfg, omegas);
}

SamplerState sample_prior_state(const PriorConfig& cfg, Rng& rng) {
    cfg.validate();
    SamplerState s;
    s.v.resize(static_cast<std::size_t>(cfg.truncation_g));
    s.z.resize(static_cast<std::size_t>(cfg.truncation_g + 1));
    for (double& v : s.v) v = sample_stick(cfg.mass_g, rng);
    for (double& z : s.z) z = cfg.base_g.sample(rng);
    if (cfg.uses_knots()) {
        s.u.resize(static_cast<std::size_t>(cfg.truncation_h));
        s.x.resize(static_cast<std::size_t>(cfg.truncation_h + 1));
        for (double& u : s.u) u = sample_stick(cfg.mass_h, rng);
        for (double& x : s.x) x = cfg.base_h.sample(rng);
    }
    const KPrior kp(cfg);
    std::vector<double> pk;
    for (int k = kp.k_min(); k <= kp.k_max(); ++k) pk.push_back(kp.pmf(k));
    s.k = kp.k_min() + std::discrete_distribution<int>(pk.begin(), pk.end())(rng);
    s.tau = sample_inverse_gamma(cfg.tau_shape, cfg.tau_rate, rng);
    return s;
}

} // namespace splinepsd
