#pragma once

// Parameter sweeps over (kappa, |alpha|^2): series -> embedding -> critical
// threshold -> network measures, with every intermediate dataset written
// under one output directory.

#include "recnetq/embedding.hpp"
#include "recnetq/metrics.hpp"
#include "recnetq/quantum.hpp"
#include "recnetq/recnet.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace recnetq {

/// kappa rows of the reference table for |alpha|^2 = 25.
const std::vector<double>& table_kappas();

/// Table kappas plus 20 log-spaced points per decade on [1e-3, 1e-1], sorted, deduplicated.
std::vector<double> default_kappa_grid();

/// Inserts extra values into a sorted grid (deduplicated within 1e-12).
std::vector<double> merge_grid(std::vector<double> grid, const std::vector<double>& extra);

struct ShortTimeThresholds {
    /// Ratio of the late-window standard deviation ([3000, 9000]) to the
    /// early-window one ([0, 1500]).
    double collapsed_below = 0.1;
    double spread_from = 0.5;
};

struct SweepConfig {
    std::vector<double> alpha_sq{25.0};
    std::vector<double> kappa;   ///< an empty list runs no cells
    double chi = 5.0;
    TimeGrid short_grid{0.0, 0.5, 20001};
    TimeGrid long_grid{10000.0, 1.0, 25000};
    double epsilon_resolution = 0.005;
    std::vector<double> epsilon_multipliers{1.0, 1.5, 2.0};
    std::filesystem::path output_dir = "recnetq_out";
    std::filesystem::path cache_dir; ///< empty: RECNETQ_CACHE_DIR, else <output_dir>/cache
    unsigned workers = 1;
    std::uint64_t sampling_seed = 20190101;
    int bins = 32;
    int max_lag = 200;
    int d_max = 10;
    double tail_eps = 1e-12;
    std::size_t apl_exact_limit = 5000;
    std::size_t apl_sample_sources = 1000;
    bool short_time = true;
    bool write_edges = false;
    bool write_vectors = true;
    ShortTimeThresholds thresholds;

    void validate() const;
    /// True when long_grid differs from (10000, 1, 25000).
    bool long_grid_overridden() const;
    std::filesystem::path resolved_cache_dir() const;
};

/// Parses a JSON config; absent keys keep their defaults, an absent or
/// null "kappa" selects default_kappa_grid(). Throws std::invalid_argument.
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& cfg);

enum class ShortTimeClass { Collapsed, Pinched, Spread };
const char* to_string(ShortTimeClass c);

struct WindowStats {
    double begin = 0.0;
    double end = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

/// Mean and population standard deviation of samples with begin <= tau <= end.
WindowStats window_stats(const MeanPhotonSeries& s, double begin, double end);

struct ShortTimeReport {
    double kappa = 0.0;
    double alpha_sq = 0.0;
    WindowStats early;     ///< [0, 1500]
    WindowStats late;      ///< [3000, 9000]
    WindowStats core;      ///< [4000, 8000]
    double late_to_early = 0.0;
    ShortTimeClass cls = ShortTimeClass::Spread;
    std::vector<WindowStats> windows; ///< consecutive 250-unit windows over the grid
    std::string series_key;
};

ShortTimeClass classify_short_time(double late_to_early, const ShortTimeThresholds& t);

/// Short-grid series (written as short_series.csv) plus windowed statistics.
ShortTimeReport short_time_report(const SweepConfig& cfg, double kappa, double alpha_sq);

struct EpsilonScanPoint {
    double multiplier = 1.0;
    double eps = 0.0;
    MetricsReport metrics;
};

struct CellResult {
    double kappa = 0.0;
    double alpha_sq = 0.0;
    bool ok = false;
    std::string error;           ///< set when !ok
    std::string series_key;
    bool series_from_cache = false;
    DelaySelection delay;
    DimensionSelection dimension;
    std::size_t vectors = 0;     ///< N'
    double attractor_spread = 0.0;
    EpsilonSearchResult eps;
    std::vector<EpsilonScanPoint> scan; ///< scan[0] is at epsilon_c
    std::optional<ShortTimeReport> short_time;
    std::filesystem::path dir;

    double cc_at_c() const { return scan.empty() ? 0.0 : scan.front().metrics.global_cc; }
    double transitivity_at_c() const { return scan.empty() ? 0.0 : scan.front().metrics.transitivity; }
};

/// Interquartile range of the rescaled series, the spread of the delay-plot cloud along each axis.
double attractor_spread(std::span<const double> rescaled);

std::string cell_dir_name(double kappa, double alpha_sq);

/**
 * One (kappa, |alpha|^2) cell. Failures (degenerate series, insufficient
 * truncation, ...) are captured in the result instead of thrown. Outputs go
 * to <output_dir>/<cell_dir_name>/.
 */
CellResult run_cell(const SweepConfig& cfg, double kappa, double alpha_sq, unsigned workers = 1);

struct AlphaSummary {
    double alpha_sq = 0.0;
    std::optional<double> argmax_cc;
    std::optional<double> argmax_transitivity;
};

struct SweepResult {
    std::vector<CellResult> cells;  ///< alpha-major, kappa ascending
    std::vector<AlphaSummary> summaries;
    std::vector<std::string> failed; ///< cell directory names
    bool all_ok() const { return failed.empty(); }
};

/// Runs every cell (cells in parallel over cfg.workers), then writes
/// summary_alpha_<a>.csv, eps_scan_alpha_<a>.csv, summary.json and MANIFEST.json.
SweepResult run_sweep(const SweepConfig& cfg);

/// Smallest kappa attaining the maximum of `value` among ok cells of one alpha.
std::optional<double> argmax_kappa(const std::vector<const CellResult*>& cells, double (CellResult::*value)() const);

nlohmann::json metrics_to_json(const MetricsReport& m, double eps);

} // namespace recnetq
