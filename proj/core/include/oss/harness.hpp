#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "oss/classifier.hpp"
#include "oss/config.hpp"
#include "oss/experiment.hpp"
#include "oss/metrics.hpp"

namespace oss {

struct RunReport {
    std::size_t run_id = 0;
    bool ok = true;
    std::string message;
    std::string config_echo;

    bool bypass = false;
    std::size_t nodes = 0;
    std::size_t patch_edge = 0;
    int oversample = 0;
    bool noise = true;
    double sr_hz = 0.0;
    double sr_fraction = 0.0;  ///< of the 2 PR / n^2 Nyquist rate

    std::size_t feature_dim = 0;
    double compression_ratio = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<EpochStats> history;
    MetricsReport metrics;

    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    double wall_seconds = 0.0;
    bool cache_hit = false;
};

struct RunOptions {
    bool use_cache = true;
    bool write_outputs = true;
    std::size_t run_id = 0;
    std::ostream* log = nullptr;
};

/// Validates, extracts (or loads cached) features, trains, evaluates and,
/// with write_outputs, writes runs.csv, history.csv, timing.csv, the
/// checkpoint and the config echo under config.out_dir.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Axes of a parameter sweep. Empty lists leave the base value untouched.
struct SweepGrid {
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> patch_edges;
    std::vector<double> sr_fractions;
    std::vector<std::size_t> feature_dims;
    std::vector<bool> noise;
    std::vector<int> oversample;
    bool cartesian = true;

    /// Reads sweep.{nodes, patch_edge, sr_fraction, feature_dim, noise,
    /// oversample, cartesian}.
    static SweepGrid from_config(const ConfigFile& cfg);

    std::size_t size() const;
    /// Grid points in expansion order: nodes, patch_edge, rate, noise,
    /// oversample, last axis fastest. Throws ArgumentError for an empty grid.
    std::vector<ExperimentConfig> expand(const ExperimentConfig& base) const;
};

/// Runs every grid point; a failing point is recorded as a failed row and
/// the sweep continues. Writes the combined CSV files when requested.
std::vector<RunReport> run_sweep(const SweepGrid& grid, const ExperimentConfig& base,
                                 const RunOptions& options = {});

/// runs.csv column order.
inline constexpr const char* kRunsHeader =
    "run_id,status,bypass,nodes,patch_edge,oversample,noise,sr_hz,sr_fraction,feature_dim,"
    "compression_ratio,train_accuracy,test_accuracy,epochs,seed,compute_speed_macs,power_w,"
    "efficiency_tops_per_w,density_tops_per_mm2,message";

std::string runs_csv(const std::vector<RunReport>& reports);
std::string history_csv(const std::vector<RunReport>& reports);
std::string timing_csv(const std::vector<RunReport>& reports);
void write_run_outputs(const std::filesystem::path& out_dir, const std::vector<RunReport>& reports);

/// Parsed runs.csv row (subset used by reports).
struct RunRow {
    std::size_t run_id = 0;
    bool ok = false;
    bool bypass = false;
    std::size_t nodes = 0;
    std::size_t patch_edge = 0;
    double sr_hz = 0.0;
    std::size_t feature_dim = 0;
    double compression_ratio = 0.0;
    double test_accuracy = 0.0;
};
std::vector<RunRow> read_runs_csv(const std::filesystem::path& path);

/// Writes accuracy_vs_ratio.csv, comparison.csv and flops.csv into out_dir from runs.csv
/// (when present) and the analytic models; prints readable tables to `os`.
void write_report(const std::filesystem::path& out_dir, std::ostream& os);

}  // namespace oss
