#include "splinepsd/app.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef SPLINEPSD_DATA_DIR
#define SPLINEPSD_DATA_DIR "data"
#endif

namespace splinepsd {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
        throw std::invalid_argument("setting '" + key + "' expects a number, got '" + value + "'");
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("setting '" + key + "' expects an integer, got '" + value + "'");
    }
    return out;
}

int parse_int32(const std::string& key, const std::string& value) {
    const long long v = parse_int(key, value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("setting '" + key + "' is out of range");
    }
    return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("setting '" + key + "' expects an unsigned integer, got '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("setting '" + key + "' expects true/false, got '" + value + "'");
}

Mode parse_mode(const std::string& value) {
    if (value == "estimate") return Mode::estimate;
    if (value == "simulate") return Mode::simulate;
    if (value == "sunspot") return Mode::sunspot;
    throw std::invalid_argument("unknown mode '" + value + "'");
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }
std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct Setting {
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Setting>& settings() {
    static const std::vector<Setting> table = {
        {"mode", [](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); },
         [](const RunConfig& c) { return to_string(c.mode); }},
        {"input", [](RunConfig& c, const std::string& v) { c.input = v; },
         [](const RunConfig& c) { return c.input; }},
        {"out", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
         [](const RunConfig& c) { return c.output_dir; }},
        {"prior", [](RunConfig& c, const std::string& v) { c.prior.family = parse_prior_family(v); },
         [](const RunConfig& c) { return to_string(c.prior.family); }},
        {"degree", [](RunConfig& c, const std::string& v) { c.prior.degree = parse_int32("degree", v); },
         [](const RunConfig& c) { return std::to_string(c.prior.degree); }},
        {"kmax", [](RunConfig& c, const std::string& v) { c.prior.k_max = parse_int32("kmax", v); },
         [](const RunConfig& c) { return std::to_string(c.prior.k_max); }},
        {"theta_k", [](RunConfig& c, const std::string& v) { c.prior.theta_k = parse_double("theta_k", v); },
         [](const RunConfig& c) { return fmt_double(c.prior.theta_k); }},
        {"mass_g", [](RunConfig& c, const std::string& v) { c.prior.mass_g = parse_double("mass_g", v); },
         [](const RunConfig& c) { return fmt_double(c.prior.mass_g); }},
        {"mass_h", [](RunConfig& c, const std::string& v) { c.prior.mass_h = parse_double("mass_h", v); },
         [](const RunConfig& c) { return fmt_double(c.prior.mass_h); }},
        {"tau_shape", [](RunConfig& c, const std::string& v) { c.prior.tau_shape = parse_double("tau_shape", v); },
         [](const RunConfig& c) { return fmt_double(c.prior.tau_shape); }},
        {"tau_rate", [](RunConfig& c, const std::string& v) { c.prior.tau_rate = parse_double("tau_rate", v); },
         [](const RunConfig& c) { return fmt_double(c.prior.tau_rate); }},
        {"truncation",
         [](RunConfig& c, const std::string& v) {
             if (v == "auto") {
                 c.auto_truncation = true;
             } else {
                 c.auto_truncation = false;
                 c.prior.truncation_g = c.prior.truncation_h = parse_int32("truncation", v);
             }
         },
         [](const RunConfig& c) {
             return c.auto_truncation ? std::string("auto") : std::to_string(c.prior.truncation_g);
         }},
        {"iters", [](RunConfig& c, const std::string& v) { c.mcmc.iterations = parse_int32("iters", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.iterations); }},
        {"burnin", [](RunConfig& c, const std::string& v) { c.mcmc.burn_in = parse_int32("burnin", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.burn_in); }},
        {"thin", [](RunConfig& c, const std::string& v) { c.mcmc.thin = parse_int32("thin", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.thin); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.mcmc.seed = parse_seed("seed", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.seed); }},
        {"eps_scale", [](RunConfig& c, const std::string& v) { c.mcmc.epsilon_scale = parse_double("eps_scale", v); },
         [](const RunConfig& c) { return fmt_double(c.mcmc.epsilon_scale); }},
        {"k_local_prob", [](RunConfig& c, const std::string& v) { c.mcmc.k_local_prob = parse_double("k_local_prob", v); },
         [](const RunConfig& c) { return fmt_double(c.mcmc.k_local_prob); }},
        {"cauchy_scale", [](RunConfig& c, const std::string& v) { c.mcmc.k_cauchy_scale = parse_double("cauchy_scale", v); },
         [](const RunConfig& c) { return fmt_double(c.mcmc.k_cauchy_scale); }},
        {"chains", [](RunConfig& c, const std::string& v) { c.mcmc.chains = parse_int32("chains", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.chains); }},
        {"tmin", [](RunConfig& c, const std::string& v) { c.mcmc.t_min = parse_double("tmin", v); },
         [](const RunConfig& c) { return fmt_double(c.mcmc.t_min); }},
        {"swap_interval", [](RunConfig& c, const std::string& v) { c.mcmc.swap_interval = parse_int32("swap_interval", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.swap_interval); }},
        {"swaps", [](RunConfig& c, const std::string& v) { c.mcmc.swaps_enabled = parse_bool("swaps", v); },
         [](const RunConfig& c) { return fmt_bool(c.mcmc.swaps_enabled); }},
        {"threads", [](RunConfig& c, const std::string& v) { c.mcmc.threads = parse_int32("threads", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.threads); }},
        {"progress", [](RunConfig& c, const std::string& v) { c.mcmc.progress_interval = parse_int32("progress", v); },
         [](const RunConfig& c) { return std::to_string(c.mcmc.progress_interval); }},
        {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = parse_double("alpha", v); },
         [](const RunConfig& c) { return fmt_double(c.alpha); }},
        {"sampling_interval",
         [](RunConfig& c, const std::string& v) { c.sampling_interval = parse_double("sampling_interval", v); },
         [](const RunConfig& c) { return fmt_double(c.sampling_interval); }},
        {"sqrt", [](RunConfig& c, const std::string& v) { c.sqrt = parse_bool("sqrt", v); },
         [](const RunConfig& c) { return fmt_bool(c.sqrt); }},
        {"difference", [](RunConfig& c, const std::string& v) { c.difference = parse_bool("difference", v); },
         [](const RunConfig& c) { return fmt_bool(c.difference); }},
        {"center", [](RunConfig& c, const std::string& v) { c.center = parse_bool("center", v); },
         [](const RunConfig& c) { return fmt_bool(c.center); }},
        {"hann", [](RunConfig& c, const std::string& v) { c.hann = parse_bool("hann", v); },
         [](const RunConfig& c) { return fmt_bool(c.hann); }},
        {"reps", [](RunConfig& c, const std::string& v) { c.reps = parse_int32("reps", v); },
         [](const RunConfig& c) { return std::to_string(c.reps); }},
        {"scenario", [](RunConfig& c, const std::string& v) { c.scenario = v; },
         [](const RunConfig& c) { return c.scenario; }},
        {"n", [](RunConfig& c, const std::string& v) { c.n = parse_int32("n", v); },
         [](const RunConfig& c) { return std::to_string(c.n); }},
        {"workers", [](RunConfig& c, const std::string& v) { c.workers = parse_int32("workers", v); },
         [](const RunConfig& c) { return std::to_string(c.workers); }},
    };
    return table;
}

PsdSamples samples_from_trace(const ChainTrace& trace, const Periodogram& pg) {
    return PsdSamples{pg.frequencies, trace.psd};
}

void require_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

void check_finite(const EstimateResult& r) {
    const auto finite = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    const auto& s = r.summary;
    if (!finite(s.pointwise.median) || !finite(s.pointwise.lower) || !finite(s.pointwise.upper) ||
        !finite(s.uniform.lower) || !finite(s.uniform.upper) || !finite(r.trace.loglik)) {
        throw std::runtime_error("non-finite values in posterior summary");
    }
}

} // namespace

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::estimate: return "estimate";
    case Mode::simulate: return "simulate";
    case Mode::sunspot: return "sunspot";
    }
    return "estimate";
}

void RunConfig::validate() const {
    prior.validate();
    mcmc.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(sampling_interval > 0.0)) throw std::invalid_argument("sampling interval must be positive");
    if (mode == Mode::simulate) {
        if (reps < 1) throw std::invalid_argument("reps must be positive");
        if (n < 8) throw std::invalid_argument("series length must be at least 8");
        scenario_model(scenario);
    }
    if (workers < 0) throw std::invalid_argument("workers must be nonnegative");
    if (output_dir.empty()) throw std::invalid_argument("output directory is required");
}

RunConfig default_config(Mode mode) {
    RunConfig cfg;
    cfg.mode = mode;
    if (mode == Mode::sunspot) {
        cfg.input = bundled_sunspot_path().string();
        cfg.sqrt = true;
        cfg.mcmc.iterations = 100000;
        cfg.mcmc.burn_in = 50000;
        cfg.mcmc.thin = 10;
    }
    return cfg;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "version") return;
    for (const auto& s : settings()) {
        if (key == s.key) {
            s.set(cfg, value);
            return;
        }
    }
    throw std::invalid_argument("unknown setting '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config file " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void write_config(std::ostream& os, const RunConfig& cfg) {
    for (const auto& s : settings()) os << s.key << " = " << s.get(cfg) << '\n';
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& s : settings()) keys.emplace_back(s.key);
    return keys;
}

TimeSeries load_series(const std::filesystem::path& path, double sampling_interval) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    TimeSeries ts{{}, sampling_interval};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (lineno == 1 && line == "value") continue;
        double v = 0.0;
        const auto* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data(), last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
            throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                                     ": not a finite number: '" + line + "'");
        }
        ts.values.push_back(v);
    }
    if (ts.size() < 8) {
        throw std::runtime_error(path.string() + ": need at least 8 observations, found " +
                                 std::to_string(ts.size()));
    }
    return ts;
}

TimeSeries preprocess(const TimeSeries& ts, const RunConfig& cfg) {
    TimeSeries out = ts;
    if (cfg.sqrt) out = sqrt_transform(out);
    if (cfg.difference) out = difference(out);
    if (cfg.center) out = mean_center(out);
    if (cfg.hann) out = mean_center(hann_window(out));
    return out;
}

EstimateResult estimate_series(const TimeSeries& raw, const RunConfig& cfg_in, std::ostream* log) {
    RunConfig cfg = cfg_in;
    const TimeSeries ts = preprocess(raw, cfg);
    validate_series(ts);
    if (cfg.auto_truncation) {
        cfg.prior.truncation_g = cfg.prior.truncation_h = PriorConfig::default_truncation(ts.size());
    }
    cfg.validate();

    EstimateResult result;
    result.periodogram = periodogram(ts);
    if (result.periodogram.size() == 0) throw std::runtime_error("series too short for a periodogram");
    result.trace = cfg.mcmc.chains > 1 ? run_tempered(result.periodogram, cfg.prior, cfg.mcmc, log).cold
                                       : run_chain(result.periodogram, cfg.prior, cfg.mcmc, log);
    if (result.trace.size() < 2) throw std::runtime_error("fewer than two stored samples; adjust iters/burnin/thin");

    result.summary = summarize(samples_from_trace(result.trace, result.periodogram), cfg.alpha);
    for (const auto& s : result.trace.states) {
        result.summary.k_trace.push_back(s.k);
        result.summary.tau_trace.push_back(s.tau);
    }
    const auto& med = result.summary.pointwise.median;
    const auto peak = static_cast<std::size_t>(std::max_element(med.begin(), med.end()) - med.begin());
    result.peak_angular = result.periodogram.frequencies[peak];
    result.peak_frequency = result.peak_angular / (2.0 * std::numbers::pi * ts.sampling_interval);
    result.peak_period = 1.0 / result.peak_frequency;
    check_finite(result);
    return result;
}

void write_estimate_artifacts(const EstimateResult& result, const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.output_dir);
    require_directory(dir);

    const auto summary_path = dir / "summary.csv";
    auto summary = open_output(summary_path);
    write_summary_csv(summary, result.summary);
    check_written(summary, summary_path);

    const auto trace_path = dir / "trace.csv";
    auto trace = open_output(trace_path);
    trace << "iter,k,tau,loglik\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        trace << fmt::format("{},{},{:.17g},{:.17g}\n", result.trace.iterations[i], result.trace.states[i].k,
                             result.trace.states[i].tau, result.trace.loglik[i]);
    }
    check_written(trace, trace_path);

    const auto manifest_path = dir / "manifest.txt";
    auto manifest = open_output(manifest_path);
    manifest << "# splinepsd run manifest; replay with --config\n";
    manifest << "version = " << kVersion << '\n';
    write_config(manifest, cfg);
    manifest << fmt::format("# peak_frequency = {:.17g}\n# peak_period = {:.17g}\n", result.peak_frequency,
                            result.peak_period);
    const auto& acc = result.trace.acceptance;
    manifest << fmt::format("# acceptance v={:.4f} z={:.4f} u={:.4f} x={:.4f} k={:.4f}\n", acc.v.rate(),
                            acc.z.rate(), acc.u.rate(), acc.x.rate(), acc.k.rate());
    check_written(manifest, manifest_path);
}

EstimateResult run_estimate(const RunConfig& cfg, std::ostream* log) {
    if (cfg.input.empty()) throw std::invalid_argument("an input file is required");
    const TimeSeries raw = load_series(cfg.input, cfg.sampling_interval);
    EstimateResult result = estimate_series(raw, cfg, log);
    write_estimate_artifacts(result, cfg);
    return result;
}

ArModel scenario_model(const std::string& scenario) {
    if (scenario == "ar1") return ArModel({0.9}, 1.0);
    if (scenario == "ar4") return ArModel({0.9, -0.9, 0.9, -0.9}, 1.0);
    throw std::invalid_argument("unknown scenario '" + scenario + "' (expected ar1 or ar4)");
}

StudyReport aggregate(std::vector<ReplicationResult> rows) {
    StudyReport report;
    report.rows = std::move(rows);
    if (report.rows.empty()) return report;
    std::vector<double> iaes;
    int hits = 0;
    for (const auto& r : report.rows) {
        iaes.push_back(r.iae);
        hits += r.covered ? 1 : 0;
    }
    report.median_iae = median_inplace(iaes);
    report.coverage = static_cast<double>(hits) / static_cast<double>(report.rows.size());
    return report;
}

StudyReport simulate_study(const RunConfig& cfg_in, std::ostream* log) {
    RunConfig cfg = cfg_in;
    cfg.mode = Mode::simulate;
    cfg.validate();
    const ArModel model = scenario_model(cfg.scenario);
    const auto truth = [&model](double lambda) { return ar_psd(model, lambda); };

    std::vector<ReplicationResult> rows(static_cast<std::size_t>(cfg.reps));
    std::atomic<int> next{0};
    std::mutex log_mutex;
    std::exception_ptr failure;
    auto work = [&] {
        for (int rep = next++; rep < cfg.reps; rep = next++) {
            try {
                ReplicationResult row;
                row.rep = rep;
                row.data_seed = derive_seed(cfg.mcmc.seed, {1, static_cast<std::uint64_t>(rep)});
                row.mcmc_seed = derive_seed(cfg.mcmc.seed, {2, static_cast<std::uint64_t>(rep)});
                Rng rng(row.data_seed);
                const TimeSeries ts = simulate_ar(model, static_cast<std::size_t>(cfg.n), rng);

                RunConfig run = cfg;
                run.mcmc.seed = row.mcmc_seed;
                run.mcmc.progress_interval = 0;
                run.sqrt = run.difference = run.hann = false;
                run.center = true;
                const EstimateResult est = estimate_series(ts, run);
                const auto& grid = est.periodogram.frequencies;
                row.iae = iae(grid, est.summary.pointwise.median, truth);
                row.covered = covered(truth, grid, est.summary.uniform.lower, est.summary.uniform.upper);
                std::vector<double> ks(est.summary.k_trace.begin(), est.summary.k_trace.end());
                row.median_k = median_inplace(ks);
                rows[rep] = row;
                if (log != nullptr) {
                    std::lock_guard lock(log_mutex);
                    *log << fmt::format("rep={} iae={:.6f} covered={} median_k={}\n", rep, row.iae,
                                        row.covered ? 1 : 0, row.median_k);
                }
            } catch (...) {
                std::lock_guard lock(log_mutex);
                if (!failure) failure = std::current_exception();
                next = cfg.reps;
            }
        }
    };
    int workers = cfg.workers == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.workers;
    workers = std::clamp(workers, 1, cfg.reps);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    StudyReport report = aggregate(std::move(rows));

    const std::filesystem::path dir(cfg.output_dir);
    require_directory(dir);
    const auto study_path = dir / "study.csv";
    auto study = open_output(study_path);
    study << "rep,data_seed,mcmc_seed,iae,covered,median_k\n";
    for (const auto& r : report.rows) {
        study << fmt::format("{},{},{},{:.17g},{},{:.17g}\n", r.rep, r.data_seed, r.mcmc_seed, r.iae,
                             r.covered ? 1 : 0, r.median_k);
    }
    check_written(study, study_path);

    const auto agg_path = dir / "aggregate.csv";
    auto agg = open_output(agg_path);
    agg << "scenario,n,prior,reps,median_iae,coverage\n";
    agg << fmt::format("{},{},{},{},{:.17g},{:.17g}\n", cfg.scenario, cfg.n, to_string(cfg.prior.family),
                       cfg.reps, report.median_iae, report.coverage);
    check_written(agg, agg_path);

    const auto manifest_path = dir / "manifest.txt";
    auto manifest = open_output(manifest_path);
    manifest << "# splinepsd run manifest; replay with --config\n";
    manifest << "version = " << kVersion << '\n';
    write_config(manifest, cfg);
    check_written(manifest, manifest_path);
    return report;
}

std::filesystem::path bundled_sunspot_path() {
    return std::filesystem::path(SPLINEPSD_DATA_DIR) / "sunspots.csv";
}

EstimateResult sunspot_demo(const RunConfig& cfg_in, std::ostream* log) {
    RunConfig cfg = cfg_in;
    cfg.mode = Mode::sunspot;
    if (cfg.input.empty()) cfg.input = bundled_sunspot_path().string();
    cfg.sqrt = true;
    cfg.center = true;
    return run_estimate(cfg, log);
}

} // namespace splinepsd
