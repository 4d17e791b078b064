#ifndef SPLINEPSD_APP_HPP
#define SPLINEPSD_APP_HPP

#include "splinepsd/prior.hpp"
#include "splinepsd/sampler.hpp"
#include "splinepsd/spectra.hpp"
#include "splinepsd/summary.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace splinepsd {

enum class Mode { estimate, simulate, sunspot };

/// Everything needed to replay a run. Serialized as `key = value` lines by
/// write_config and read back by apply_config_file.
struct RunConfig {
    Mode mode = Mode::estimate;
    std::string input;
    std::string output_dir = "out";

    PriorConfig prior;
    McmcConfig mcmc;
    /// When set, L_G = L_H = max(20, n^(1/3)) from the series length.
    bool auto_truncation = true;
    double alpha = 0.1;

    double sampling_interval = 1.0;
    bool sqrt = false;
    bool difference = false;
    bool center = true;
    bool hann = false;

    int reps = 50;
    std::string scenario = "ar4";
    int n = 256;
    /// Replication workers; 0 picks hardware concurrency.
    int workers = 0;

    void validate() const;
};

std::string to_string(Mode mode);

/// Defaults for a verb: desk-scale budgets for estimate and simulate, the
/// 100k/50k/10 budget and sqrt preprocessing for sunspot.
RunConfig default_config(Mode mode);

/// Sets one field from its textual key; throws std::invalid_argument for
/// unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' starts a comment).
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// All settings as `key = value` lines, in a fixed order.
void write_config(std::ostream& os, const RunConfig& cfg);

/// The keys apply_setting understands.
std::vector<std::string> config_keys();

/// Single-column CSV of finite reals with an optional `value` header.
TimeSeries load_series(const std::filesystem::path& path, double sampling_interval = 1.0);

/// sqrt -> difference -> mean-center -> Hann, each when enabled. A windowed
/// series is centered again so it satisfies the periodogram's precondition.
TimeSeries preprocess(const TimeSeries& ts, const RunConfig& cfg);

struct EstimateResult {
    Periodogram periodogram;
    ChainTrace trace;
    PosteriorSummary summary;
    /// Argmax of the posterior median over the Fourier grid.
    double peak_angular = 0.0;
    double peak_frequency = 0.0;
    double peak_period = 0.0;
};

/// Preprocess, periodogram, sample, summarize. Runs the tempered sampler
/// when cfg.mcmc.chains > 1.
EstimateResult estimate_series(const TimeSeries& raw, const RunConfig& cfg, std::ostream* log = nullptr);

/// Writes summary.csv, trace.csv and manifest.txt into cfg.output_dir.
void write_estimate_artifacts(const EstimateResult& result, const RunConfig& cfg);

/// load_series + estimate_series + write_estimate_artifacts.
EstimateResult run_estimate(const RunConfig& cfg, std::ostream* log = nullptr);

ArModel scenario_model(const std::string& scenario);

struct ReplicationResult {
    int rep = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t mcmc_seed = 0;
    double iae = 0.0;
    bool covered = false;
    double median_k = 0.0;
};

struct StudyReport {
    std::vector<ReplicationResult> rows;
    double median_iae = 0.0;
    double coverage = 0.0;
};

/// Aggregates recomputed from rows alone.
StudyReport aggregate(std::vector<ReplicationResult> rows);

/// Simulated AR replications under the configured prior. Realizations
/// depend only on (seed, rep), so two studies with different priors see the
/// same data. Writes study.csv and aggregate.csv.
StudyReport simulate_study(const RunConfig& cfg, std::ostream* log = nullptr);

/// Bundled annual sunspot numbers, 1700-1987.
std::filesystem::path bundled_sunspot_path();

/// sqrt + center pipeline on the sunspot series; reports the spectral peak
/// in cycles per year.
EstimateResult sunspot_demo(const RunConfig& cfg, std::ostream* log = nullptr);

} // namespace splinepsd

#endif // SPLINEPSD_APP_HPP
