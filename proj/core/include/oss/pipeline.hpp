#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oss/classifier.hpp"
#include "oss/dataset.hpp"
#include "oss/experiment.hpp"

namespace oss {

/// Image -> frontend -> filter bank -> receiver -> ADC, for one configuration.
class FeatureExtractor {
public:
    explicit FeatureExtractor(const ExperimentConfig& config);

    std::size_t nodes() const { return plan_.size(); }
    std::size_t features_per_node() const { return grid_.count; }
    std::size_t feature_dim() const;

    /// Pre-quantization ADC samples, node-major (node 0 first).
    std::vector<double> analog_features(const ImageView& image, std::uint64_t image_index) const;

    /// Per-node full scale from the calibration percentile over the first
    /// `calibration_images` images of `train`. No-op when full scale is fixed.
    void calibrate(const ImageSet& train);

    bool calibrated() const { return !full_scales_.empty(); }
    std::span<const double> full_scales() const { return full_scales_; }
    void set_full_scales(std::vector<double> scales);

    /// Quantized features of one image into `out` (feature_dim values).
    void extract(const ImageView& image, std::uint64_t image_index, std::span<float> out) const;

private:
    ExperimentConfig config_;
    FilterBankConfig plan_;
    SamplingGrid grid_;
    double adc_rate_hz_ = 0.0;
    std::vector<double> full_scales_;
};

/// Features for every image of `images`; noise seeds use `index_offset + i`.
/// Rows are independent, so the result does not depend on `threads`.
FeatureMatrix extract_features(const FeatureExtractor& extractor, const ImageSet& images,
                               std::uint64_t index_offset, unsigned threads);

/// Raw pixels / 255 (the no-optics baseline).
FeatureMatrix pixel_features(const ImageSet& images);

/// First `count` images (or all when count is empty or larger).
ImageSet take_images(const ImageSet& images, std::optional<std::size_t> count);
LabelSet take_labels(const LabelSet& labels, std::optional<std::size_t> count);

/// Noise sub-seed offset separating test images from training images.
inline constexpr std::uint64_t kTestIndexOffset = 1ULL << 32;

struct FeatureSet {
    FeatureMatrix train, test;
    std::vector<std::uint8_t> train_labels, test_labels;
    std::vector<double> full_scales;
    int bits = 8;
};

/// Cache container: "OSSFEAT1", key, bits, full scales, then each split as
/// (rows, dim, labels, uint16 levels). Values are level / (2^bits - 1).
void save_feature_cache(const std::filesystem::path& path, std::uint64_t key, const FeatureSet& set);
/// Returns false when the file is absent or was written for another key.
bool load_feature_cache(const std::filesystem::path& path, std::uint64_t key, FeatureSet& set);

/// Loads the dataset, calibrates and extracts (or reads the cache under
/// config.out_dir when `use_cache`).
FeatureSet build_features(const ExperimentConfig& config, bool use_cache, bool* cache_hit = nullptr);

std::filesystem::path feature_cache_path(const ExperimentConfig& config);

}  // namespace oss
