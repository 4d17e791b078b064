#include "splinepsd/sampler.hpp"

#include "splinepsd/splines.hpp"

#include <algorithm>
#include <array>
#include <barrier>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace splinepsd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_stick_density(double v, double mass) {
    if (mass == 1.0) return 0.0;
    return std::log(mass) + (mass - 1.0) * std::log1p(-v);
}

std::vector<double> unit_omegas(const Periodogram& pg) {
    std::vector<double> om(pg.frequencies.size());
    for (std::size_t i = 0; i < om.size(); ++i) om[i] = pg.frequencies[i] / std::numbers::pi;
    return om;
}

} // namespace

void McmcConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw std::invalid_argument("burn-in must lie in [0, iterations)");
    if (thin < 1) throw std::invalid_argument("thinning factor must be at least 1");
    if (chains < 1) throw std::invalid_argument("chain count must be at least 1");
    if (!(t_min > 0.0 && t_min <= 1.0)) throw std::invalid_argument("t_min must lie in (0, 1]");
    if (swap_interval < 1) throw std::invalid_argument("swap interval must be positive");
    if (!(k_local_prob >= 0.0 && k_local_prob <= 1.0)) throw std::invalid_argument("k_local_prob must lie in [0, 1]");
    if (!(k_cauchy_scale > 0.0)) throw std::invalid_argument("Cauchy scale must be positive");
    if (!(epsilon_scale >= 0.0)) throw std::invalid_argument("epsilon scale must be nonnegative");
    if (threads < 0) throw std::invalid_argument("thread count must be nonnegative");
}

double wrap_circular(double x) {
    if (x > 1.0) return x - std::floor(x);
    if (x < 0.0) return x + 1.0;
    return x;
}

double propose_circular(double x, double eps, Rng& rng) {
    const double offset = std::uniform_real_distribution<double>(-eps, eps)(rng);
    return wrap_circular(x + offset);
}

double epsilon_schedule(int l, std::size_t n, double scale) {
    return static_cast<double>(l) / (static_cast<double>(l) + scale * std::sqrt(static_cast<double>(n)));
}

KProposal propose_k(int k, int k_min, int k_max, const McmcConfig& cfg, Rng& rng) {
    long step = 0;
    if (uniform01(rng) < cfg.k_local_prob) {
        step = std::uniform_int_distribution<int>(-1, 1)(rng);
    } else {
        std::cauchy_distribution<double> cauchy(0.0, cfg.k_cauchy_scale);
        double draw = 0.0;
        do {
            draw = std::round(cauchy(rng));
        } while (draw == 0.0);
        step = static_cast<long>(std::clamp(draw, -1e9, 1e9));
    }
    const long raw = static_cast<long>(k) + step;
    if (raw < k_min) return {k_min, true};
    if (raw > k_max) return {k_max, true};
    return {static_cast<int>(raw), false};
}

ShapeSums shape_sums(const Periodogram& pg, std::span<const double> shape) {
    ShapeSums sums;
    for (std::size_t l = 0; l < shape.size(); ++l) {
        if (!(shape[l] > 0.0)) return sums;
        sums.sum_log += std::log(shape[l]);
        sums.sum_ratio += pg.ordinates[l] / shape[l];
    }
    sums.valid = std::isfinite(sums.sum_log) && std::isfinite(sums.sum_ratio);
    return sums;
}

double loglik_from_sums(const ShapeSums& sums, std::size_t n_freq, double tau) {
    if (!sums.valid || !(tau > 0.0)) return kNegInf;
    return -static_cast<double>(n_freq) * std::log(tau) - sums.sum_log - sums.sum_ratio / tau;
}

double gibbs_tau(const Periodogram& pg, std::span<const double> shape, const PriorConfig& cfg,
                 Rng& rng, double inverse_temperature) {
    if (shape.size() != pg.size()) throw std::invalid_argument("shape length does not match periodogram");
    double ratio = 0.0;
    for (std::size_t l = 0; l < shape.size(); ++l) {
        if (!(shape[l] > 0.0)) throw std::domain_error("spectral shape vanishes at a Fourier frequency");
        ratio += pg.ordinates[l] / shape[l];
    }
    const double shape_param = cfg.tau_shape + inverse_temperature * static_cast<double>(pg.size());
    const double scale_param = cfg.tau_rate + inverse_temperature * ratio;
    return sample_inverse_gamma(shape_param, scale_param, rng);
}

// ---------------------------------------------------------------------------
// ShapeEvaluator

struct ShapeEvaluator::Impl {
    struct SplineSlot {
        int k = -1;
        std::vector<double> u, x;
        std::vector<int> first;
        std::vector<double> dens;
        std::vector<char> degenerate;
        std::uint64_t used = 0;
    };
    struct BernsteinSlot {
        int k = -1;
        std::vector<double> table;
        std::uint64_t used = 0;
    };

    PriorConfig cfg;
    std::vector<double> omegas;
    std::vector<double> log_om, log_1m;
    std::array<SplineSlot, 3> spline_slots;
    std::array<BernsteinSlot, 8> bernstein_slots;
    std::uint64_t clock = 0;
    std::vector<double> masses, weights;

    Impl(const PriorConfig& c, std::vector<double> om) : cfg(c), omegas(std::move(om)) {
        for (double w : omegas) {
            if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error("evaluation grid outside [0, 1]");
        }
        log_om.resize(omegas.size());
        log_1m.resize(omegas.size());
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            log_om[i] = std::log(omegas[i]);
            log_1m[i] = std::log1p(-omegas[i]);
        }
    }

    void fill_weights(const SamplerState& s) {
        masses.resize(s.v.size() + 1);
        double remaining = 1.0;
        for (std::size_t l = 0; l < s.v.size(); ++l) {
            masses[l + 1] = remaining * s.v[l];
            remaining *= 1.0 - s.v[l];
        }
        masses[0] = remaining;
        weights.assign(static_cast<std::size_t>(s.k), 0.0);
        for (std::size_t l = 0; l < s.z.size(); ++l) weights[atom_bin(s.z[l], s.k)] += masses[l];
    }

    const SplineSlot& spline_slot(const SamplerState& s) {
        ++clock;
        for (auto& slot : spline_slots) {
            if (slot.k == s.k && slot.u == s.u && slot.x == s.x) {
                slot.used = clock;
                return slot;
            }
        }
        auto& slot = *std::min_element(spline_slots.begin(), spline_slots.end(),
                                       [](const auto& a, const auto& b) { return a.used < b.used; });
        const int r = cfg.degree;
        const auto deltas = knot_diffs_from_H(stick_masses(s.u), s.x, s.k, r);
        const BsplineDensityBasis basis(build_knots(deltas, r));
        const auto norm = basis.normalizers();

        slot.k = s.k;
        slot.u = s.u;
        slot.x = s.x;
        slot.used = clock;
        slot.degenerate.resize(static_cast<std::size_t>(s.k));
        for (int i = 0; i < s.k; ++i) slot.degenerate[i] = basis.degenerate(i) ? 1 : 0;
        const std::size_t width = static_cast<std::size_t>(r + 1);
        slot.first.resize(omegas.size());
        slot.dens.resize(omegas.size() * width);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            std::span<double> vals(slot.dens.data() + i * width, width);
            const int span = eval_nonzero_basis(omegas[i], basis.knots(), vals);
            slot.first[i] = span - r;
            for (int m = 0; m <= r; ++m) {
                const int j = span - r + m;
                vals[m] = slot.degenerate[j] ? 0.0 : vals[m] / norm[j];
            }
        }
        return slot;
    }

    const BernsteinSlot& bernstein_slot(int k) {
        ++clock;
        for (auto& slot : bernstein_slots) {
            if (slot.k == k) {
                slot.used = clock;
                return slot;
            }
        }
        auto& slot = *std::min_element(bernstein_slots.begin(), bernstein_slots.end(),
                                       [](const auto& a, const auto& b) { return a.used < b.used; });
        slot.k = k;
        slot.used = clock;
        const std::size_t n = omegas.size();
        slot.table.resize(n * static_cast<std::size_t>(k));
        const double lg_k1 = std::lgamma(static_cast<double>(k) + 1.0);
        for (int j = 1; j <= k; ++j) {
            const double a = j - 1.0;
            const double b = static_cast<double>(k - j);
            const double c = lg_k1 - std::lgamma(static_cast<double>(j)) - std::lgamma(b + 1.0);
            double* col = slot.table.data() + static_cast<std::size_t>(j - 1) * n;
            for (std::size_t i = 0; i < n; ++i) {
                double e = c;
                if (a != 0.0) e += a * log_om[i];
                if (b != 0.0) e += b * log_1m[i];
                col[i] = std::exp(e);
            }
        }
        return slot;
    }

    void evaluate_spline(const SamplerState& s, std::span<double> out) {
        const auto& slot = spline_slot(s);
        fill_weights(s);
        double total = 0.0;
        double live = 0.0;
        int live_count = 0;
        for (int j = 0; j < s.k; ++j) {
            total += weights[j];
            if (!slot.degenerate[j]) {
                live += weights[j];
                ++live_count;
            }
        }
        if (live_count == 0) throw std::logic_error("every B-spline in the basis is degenerate");
        if (total != live) {
            for (int j = 0; j < s.k; ++j) {
                if (slot.degenerate[j]) {
                    weights[j] = 0.0;
                } else if (live > 0.0) {
                    weights[j] *= total / live;
                } else {
                    weights[j] = total / live_count;
                }
            }
        }
        const std::size_t width = static_cast<std::size_t>(cfg.degree + 1);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const double* d = slot.dens.data() + i * width;
            const double* w = weights.data() + slot.first[i];
            double acc = 0.0;
            for (std::size_t m = 0; m < width; ++m) acc += w[m] * d[m];
            out[i] = acc;
        }
    }

    void evaluate_bernstein(const SamplerState& s, std::span<double> out) {
        const auto& slot = bernstein_slot(s.k);
        fill_weights(s);
        const std::size_t n = omegas.size();
        std::fill(out.begin(), out.end(), 0.0);
        for (int j = 0; j < s.k; ++j) {
            const double w = weights[j];
            if (w == 0.0) continue;
            const double* col = slot.table.data() + static_cast<std::size_t>(j) * n;
            for (std::size_t i = 0; i < n; ++i) out[i] += w * col[i];
        }
    }
};

ShapeEvaluator::ShapeEvaluator(const PriorConfig& cfg, std::vector<double> omegas)
    : impl_(std::make_unique<Impl>(cfg, std::move(omegas))) {}

ShapeEvaluator::~ShapeEvaluator() = default;

ShapeEvaluator::ShapeEvaluator(const ShapeEvaluator& other)
    : impl_(std::make_unique<Impl>(*other.impl_)) {}

std::size_t ShapeEvaluator::size() const { return impl_->omegas.size(); }

void ShapeEvaluator::evaluate(const SamplerState& state, std::span<double> out) {
    if (out.size() != impl_->omegas.size()) throw std::invalid_argument("output span has the wrong length");
    if (impl_->cfg.uses_knots()) {
        impl_->evaluate_spline(state, out);
    } else {
        impl_->evaluate_bernstein(state, out);
    }
}

// ---------------------------------------------------------------------------
// Chain

namespace {

class Chain {
public:
    Chain(const Periodogram& pg, const PriorConfig& prior, const McmcConfig& mcmc,
          SamplerState init, double inverse_temperature, Rng& rng)
        : pg_(&pg), prior_(&prior), mcmc_(&mcmc), kprior_(prior),
          evaluator_(prior, unit_omegas(pg)), beta_(inverse_temperature), rng_(&rng),
          state_(std::move(init)), shape_(pg.size()), candidate_(pg.size()) {
        if (!is_valid(state_, prior)) throw std::invalid_argument("initial state is invalid");
        const std::size_t n = pg.series_length;
        const int longest = std::max(prior.truncation_g, prior.truncation_h) + 1;
        eps_.resize(static_cast<std::size_t>(longest));
        for (int l = 1; l <= longest; ++l) eps_[l - 1] = epsilon_schedule(l, n, mcmc.epsilon_scale);
        refresh();
    }

    const SamplerState& state() const { return state_; }
    double beta() const { return beta_; }

    double loglik() {
        if (stale_) refresh();
        return loglik_;
    }

    std::span<const double> shape() {
        if (stale_) refresh();
        return shape_;
    }

    void exchange(Chain& other) {
        std::swap(state_, other.state_);
        std::swap(shape_, other.shape_);
        std::swap(sums_, other.sums_);
        std::swap(loglik_, other.loglik_);
        std::swap(stale_, other.stale_);
    }

    void sweep(AcceptanceStats& stats) {
        const McmcConfig& m = *mcmc_;
        const PriorConfig& p = *prior_;
        if (m.update_v) {
            for (std::size_t l = 0; l < state_.v.size(); ++l) {
                update_coordinate(state_.v[l], eps_[l], stats.v,
                                  [&](double a) { return log_stick_density(a, p.mass_g); });
            }
        }
        if (m.update_z) {
            for (std::size_t l = 0; l < state_.z.size(); ++l) {
                update_coordinate(state_.z[l], eps_[l], stats.z, p.base_g.log_density);
            }
        }
        if (p.uses_knots()) {
            if (m.update_u) {
                for (std::size_t l = 0; l < state_.u.size(); ++l) {
                    update_coordinate(state_.u[l], eps_[l], stats.u,
                                      [&](double a) { return log_stick_density(a, p.mass_h); });
                }
            }
            if (m.update_x) {
                for (std::size_t l = 0; l < state_.x.size(); ++l) {
                    update_coordinate(state_.x[l], eps_[l], stats.x, p.base_h.log_density);
                }
            }
        }
        if (m.update_k) update_k(stats.k);
        if (m.update_tau) update_tau();
    }

private:
    template <class LogDensity>
    void update_coordinate(double& coord, double eps, BlockStats& stats, const LogDensity& log_density) {
        ++stats.proposed;
        const double current = coord;
        const double proposal = propose_circular(current, eps, *rng_);
        const double prior_delta = log_density(proposal) - log_density(current);
        const double log_u = std::log(uniform01(*rng_));
        if (prior_delta == kNegInf || std::isnan(prior_delta)) return;
        coord = proposal;
        if (try_accept(prior_delta, log_u)) {
            ++stats.accepted;
        } else {
            coord = current;
        }
    }

    void update_k(BlockStats& stats) {
        ++stats.proposed;
        const int current = state_.k;
        const KProposal prop = propose_k(current, kprior_.k_min(), kprior_.k_max(), *mcmc_, *rng_);
        const double log_u = std::log(uniform01(*rng_));
        if (prop.clamped) return;
        const double prior_delta = kprior_.log_pmf(prop.k) - kprior_.log_pmf(current);
        state_.k = prop.k;
        if (try_accept(prior_delta, log_u)) {
            ++stats.accepted;
        } else {
            state_.k = current;
        }
    }

    void update_tau() {
        if (beta_ == 0.0) {
            state_.tau = sample_inverse_gamma(prior_->tau_shape, prior_->tau_rate, *rng_);
            stale_ = true;
            return;
        }
        if (stale_) refresh();
        const double shape = prior_->tau_shape + beta_ * static_cast<double>(pg_->size());
        const double scale = prior_->tau_rate + beta_ * sums_.sum_ratio;
        state_.tau = sample_inverse_gamma(shape, scale, *rng_);
        loglik_ = loglik_from_sums(sums_, pg_->size(), state_.tau);
    }

    // state_ already holds the candidate; returns whether it was accepted
    // and keeps the cached shape in sync.
    bool try_accept(double prior_delta, double log_u) {
        if (beta_ == 0.0) {
            if (log_u < prior_delta) {
                stale_ = true;
                return true;
            }
            return false;
        }
        if (stale_) throw std::logic_error("stale likelihood cache in a tempered chain");
        evaluator_.evaluate(state_, candidate_);
        const ShapeSums sums = shape_sums(*pg_, candidate_);
        const double ll = loglik_from_sums(sums, pg_->size(), state_.tau);
        if (ll == kNegInf) return false;
        if (log_u < beta_ * (ll - loglik_) + prior_delta) {
            std::swap(shape_, candidate_);
            sums_ = sums;
            loglik_ = ll;
            return true;
        }
        return false;
    }

    void refresh() {
        evaluator_.evaluate(state_, shape_);
        sums_ = shape_sums(*pg_, shape_);
        loglik_ = loglik_from_sums(sums_, pg_->size(), state_.tau);
        stale_ = false;
    }

    const Periodogram* pg_;
    const PriorConfig* prior_;
    const McmcConfig* mcmc_;
    KPrior kprior_;
    ShapeEvaluator evaluator_;
    double beta_;
    Rng* rng_;
    std::vector<double> eps_;

    SamplerState state_;
    std::vector<double> shape_;
    std::vector<double> candidate_;
    ShapeSums sums_;
    double loglik_ = kNegInf;
    bool stale_ = true;
};

class Recorder {
public:
    Recorder(const McmcConfig& mcmc, std::size_t grid) : mcmc_(mcmc) {
        trace_.grid_size = grid;
        const auto count = static_cast<std::size_t>(mcmc.stored_samples());
        trace_.iterations.reserve(count);
        trace_.states.reserve(count);
        trace_.loglik.reserve(count);
        trace_.psd.reserve(count * grid);
    }

    void observe(int iteration, Chain& cold) {
        if (iteration <= mcmc_.burn_in || (iteration - mcmc_.burn_in) % mcmc_.thin != 0) return;
        const auto shape = cold.shape();
        const double tau = cold.state().tau;
        trace_.iterations.push_back(iteration);
        trace_.states.push_back(cold.state());
        trace_.loglik.push_back(cold.loglik());
        for (double s : shape) trace_.psd.push_back(tau * s);
    }

    ChainTrace& trace() { return trace_; }

private:
    const McmcConfig& mcmc_;
    ChainTrace trace_;
};

void log_progress(std::ostream& os, int iteration, Chain& cold, const AcceptanceStats& acc,
                  const std::vector<BlockStats>& swaps) {
    os << "iter=" << iteration << " k=" << cold.state().k << " tau=" << cold.state().tau
       << " loglik=" << cold.loglik() << " acc_v=" << acc.v.rate() << " acc_z=" << acc.z.rate()
       << " acc_u=" << acc.u.rate() << " acc_x=" << acc.x.rate() << " acc_k=" << acc.k.rate();
    for (std::size_t c = 0; c < swaps.size(); ++c) {
        os << " swap_" << c + 1 << '_' << c + 2 << '=' << swaps[c].rate();
    }
    os << '\n';
}

} // namespace

SamplerState initial_state(const Periodogram& pg, const PriorConfig& prior, Rng& rng) {
    prior.validate();
    double mean = 0.0;
    for (double v : pg.ordinates) mean += v;
    mean = pg.size() > 0 ? mean / static_cast<double>(pg.size()) : 0.0;

    ShapeEvaluator evaluator(prior, unit_omegas(pg));
    std::vector<double> shape(pg.size());
    for (int attempt = 0; attempt < 10000; ++attempt) {
        SamplerState s = sample_prior_state(prior, rng);
        s.k = std::clamp(prior.degree + 7, prior.k_min(), prior.k_max);
        s.tau = mean > 0.0 ? mean : 1.0;
        evaluator.evaluate(s, shape);
        if (shape_sums(pg, shape).valid) return s;
    }
    throw std::runtime_error("could not find an initial state with finite likelihood");
}

SamplerState mh_sweep(const SamplerState& state, const Periodogram& pg, const PriorConfig& prior,
                      const McmcConfig& mcmc, double inverse_temperature, Rng& rng,
                      AcceptanceStats* stats) {
    AcceptanceStats local;
    Chain chain(pg, prior, mcmc, state, inverse_temperature, rng);
    chain.sweep(stats != nullptr ? *stats : local);
    return chain.state();
}

ChainTrace run_chain(const Periodogram& pg, const PriorConfig& prior, const McmcConfig& mcmc,
                     std::ostream* log) {
    prior.validate();
    mcmc.validate();
    Rng rng(derive_seed(mcmc.seed, {0}));
    Chain chain(pg, prior, mcmc, initial_state(pg, prior, rng), 1.0, rng);
    Recorder recorder(mcmc, pg.size());
    AcceptanceStats acc;
    for (int it = 1; it <= mcmc.iterations; ++it) {
        chain.sweep(acc);
        recorder.observe(it, chain);
        if (log != nullptr && mcmc.progress_interval > 0 && it % mcmc.progress_interval == 0) {
            log_progress(*log, it, chain, acc, {});
        }
    }
    ChainTrace trace = std::move(recorder.trace());
    trace.acceptance = acc;
    trace.inverse_temperatures = {1.0};
    trace.final_state = chain.state();
    return trace;
}

std::vector<double> inverse_temperature_ladder(int chains, double t_min) {
    if (chains < 1) throw std::invalid_argument("chain count must be positive");
    std::vector<double> ladder(static_cast<std::size_t>(chains), 1.0);
    for (int c = 1; c < chains; ++c) {
        ladder[c] = std::pow(t_min, static_cast<double>(c) / static_cast<double>(chains - 1));
    }
    if (chains > 1) ladder.back() = t_min;
    return ladder;
}

double swap_log_ratio(double loglik_i, double loglik_j, double beta_i, double beta_j) {
    if (beta_i == beta_j || loglik_i == loglik_j) return 0.0;
    return (beta_i - beta_j) * (loglik_j - loglik_i);
}

TemperedResult run_tempered(const Periodogram& pg, const PriorConfig& prior, const McmcConfig& mcmc,
                            std::ostream* log) {
    prior.validate();
    mcmc.validate();
    if (mcmc.chains < 2) {
        TemperedResult result{run_chain(pg, prior, mcmc, log), {}};
        result.final_states.push_back(result.cold.final_state);
        return result;
    }

    const int count = mcmc.chains;
    const auto ladder = inverse_temperature_ladder(count, mcmc.t_min);
    std::vector<Rng> rngs;
    rngs.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) rngs.emplace_back(derive_seed(mcmc.seed, {static_cast<std::uint64_t>(c)}));
    std::vector<std::unique_ptr<Chain>> chains;
    for (int c = 0; c < count; ++c) {
        chains.push_back(std::make_unique<Chain>(pg, prior, mcmc, initial_state(pg, prior, rngs[c]),
                                                 ladder[c], rngs[c]));
    }
    std::vector<AcceptanceStats> acc(static_cast<std::size_t>(count));
    std::vector<BlockStats> swaps(static_cast<std::size_t>(count - 1));
    Rng coordinator(derive_seed(mcmc.seed, {0x5717ULL, static_cast<std::uint64_t>(count)}));
    Recorder recorder(mcmc, pg.size());
    std::uint64_t swap_rounds = 0;

    const int interval = mcmc.swap_interval;
    auto advance = [&](int c, int from, int to) {
        for (int it = from + 1; it <= to; ++it) {
            chains[c]->sweep(acc[c]);
            if (c == 0) recorder.observe(it, *chains[0]);
        }
    };
    auto synchronize = [&](int from, int to) {
        if (mcmc.swaps_enabled && to % interval == 0) {
            const int i = static_cast<int>(swap_rounds++ % static_cast<std::uint64_t>(count - 1));
            Chain& a = *chains[i];
            Chain& b = *chains[i + 1];
            ++swaps[i].proposed;
            const double log_ratio = swap_log_ratio(a.loglik(), b.loglik(), a.beta(), b.beta());
            if (std::log(uniform01(coordinator)) < log_ratio) {
                a.exchange(b);
                ++swaps[i].accepted;
            }
        }
        if (log != nullptr && mcmc.progress_interval > 0 &&
            to / mcmc.progress_interval > from / mcmc.progress_interval) {
            log_progress(*log, to, *chains[0], acc[0], swaps);
        }
    };

    std::vector<std::pair<int, int>> segments;
    for (int from = 0; from < mcmc.iterations;) {
        const int to = std::min(mcmc.iterations, (from / interval + 1) * interval);
        segments.emplace_back(from, to);
        from = to;
    }

    int workers = mcmc.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : mcmc.threads;
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (auto [from, to] : segments) {
            for (int c = 0; c < count; ++c) advance(c, from, to);
            synchronize(from, to);
        }
    } else {
        std::size_t segment = 0;
        auto on_barrier = [&]() noexcept {
            synchronize(segments[segment].first, segments[segment].second);
            ++segment;
        };
        std::barrier sync(workers, on_barrier);
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = 0; s < segments.size(); ++s) {
                    for (int c = w; c < count; c += workers) advance(c, segments[s].first, segments[s].second);
                    sync.arrive_and_wait();
                }
            });
        }
    }

    TemperedResult result{std::move(recorder.trace()), {}};
    result.cold.acceptance = acc[0];
    result.cold.inverse_temperatures = ladder;
    result.cold.swaps = swaps;
    result.cold.final_state = chains[0]->state();
    for (auto& chain : chains) result.final_states.push_back(chain->state());
    return result;
}

} // namespace splinepsd
