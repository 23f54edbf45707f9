#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "oss/classifier.hpp"
#include "oss/config.hpp"
#include "oss/filterbank.hpp"
#include "oss/frontend.hpp"
#include "oss/metrics.hpp"
#include "oss/receiver.hpp"

namespace oss {

/// How the ADC rate is specified.
enum class RateMode {
    nyquist_fraction,  ///< SR = fraction * 2 PR / n^2
    absolute,          ///< SR in Hz
    feature_dim,       ///< solve SR for a target total feature count
};

struct ExperimentConfig {
    std::filesystem::path train_images, train_labels, test_images, test_labels;
    std::optional<std::size_t> train_subset;
    std::optional<std::size_t> test_subset;
    std::size_t image_rows = 28;
    std::size_t image_cols = 28;

    std::size_t patch_edge = 4;
    std::size_t nodes = 10;
    bool bypass_oss = false;

    int filter_order = 1;
    std::optional<FilterBankConfig> plan;  ///< overrides plan_filters when set

    FrontendConfig frontend;
    bool split_power = true;
    NoiseParams noise;

    int adc_bits = 8;
    std::optional<double> full_scale;  ///< empty = auto
    RateMode rate_mode = RateMode::nyquist_fraction;
    double sr_fraction = 1.0;
    double sr_hz = 0.0;
    std::size_t target_feature_dim = 0;
    std::size_t calibration_images = 2000;
    double calibration_percentile = 99.9;

    TrainConfig train;

    int wavelengths = 1;
    double ring_radius_m = 108e-6;
    double node_spacing_m = 10e-6;
    PowerModelParams power = default_power_params();

    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    std::filesystem::path out_dir = "runs";

    /// Reads every section except [sweep]; rejects unknown keys.
    static ExperimentConfig from_config(const ConfigFile& cfg);

    /// Sets the seed of both the noise generator and the training shuffles.
    void set_seed(std::uint64_t s);

    /// Cross-module constraints (Nyquist, pooling bandwidth, ADC rate,
    /// non-empty feature count). Throws ConfigError naming the field.
    void validate() const;
    /// Checks that the dataset files exist.
    void validate_files() const;

    FilterBankConfig filter_plan() const;
    std::size_t sequence_samples() const;
    double adc_rate_hz() const;
    std::size_t features_per_node() const;
    std::size_t feature_dim() const;
    HardwareSpec hardware() const;

    /// Canonical text of every field that influences extracted features.
    std::string feature_key_text() const;
    /// Echo of the whole configuration in config-file syntax.
    std::string echo() const;
};

/// Reads hardware.* keys (wavelengths, patch_edge, nodes, pixel_rate_hz,
/// ring_radius_m, node_spacing_m) on top of the reference defaults.
HardwareSpec hardware_from(const ConfigFile& cfg);
/// Reads power.* keys; power.wavelength_m sets the photon energy.
PowerModelParams power_params_from(const ConfigFile& cfg);

/// input size (rows * cols) / feature_dim, computed before any simulation.
double compression_ratio(const ExperimentConfig& config);
double compression_ratio(std::size_t input_size, std::size_t feature_dim);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace oss
