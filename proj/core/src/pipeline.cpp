#include "oss/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

#include "oss/errors.hpp"
#include "oss/filterbank.hpp"
#include "oss/frontend.hpp"
#include "oss/receiver.hpp"

namespace oss {

FeatureExtractor::FeatureExtractor(const ExperimentConfig& config) : config_(config) {
    config_.validate();
    if (config_.bypass_oss) {
        throw ArgumentError("FeatureExtractor is not used in bypass mode");
    }
    plan_ = config_.filter_plan();
    adc_rate_hz_ = config_.adc_rate_hz();
    grid_ = sampling_grid(config_.sequence_samples(), config_.frontend.sample_rate_hz(), adc_rate_hz_);
    if (config_.full_scale) {
        full_scales_.assign(plan_.size(), *config_.full_scale);
    }
}

std::size_t FeatureExtractor::feature_dim() const {
    return plan_.size() * grid_.count;
}

std::vector<double> FeatureExtractor::analog_features(const ImageView& image,
                                                      std::uint64_t image_index) const {
    if (image.rows != config_.image_rows || image.cols != config_.image_cols) {
        throw ArgumentError("image is " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                            ", configuration expects " + std::to_string(config_.image_rows) + "x" +
                            std::to_string(config_.image_cols));
    }
    const PixelSequence seq = serialize_dual_orientation(patchify(image, config_.patch_edge));
    OpticalWaveform field = modulate(seq, config_.frontend);
    if (config_.split_power && plan_.size() > 1) {
        const double split = 1.0 / std::sqrt(static_cast<double>(plan_.size()));
        for (auto& s : field.samples) {
            s *= split;
        }
    }

    std::vector<double> out;
    out.reserve(feature_dim());
    NoiseParams noise = config_.noise;
    for (std::size_t k = 0; k < plan_.size(); ++k) {
        noise.seed = derive_seed(config_.noise.seed, image_index, k);
        const ElectricalWaveform pooled =
            butterworth_lpf(photodetect(apply_node(field, plan_.nodes[k]), noise), config_.patch_edge,
                            config_.frontend.pixel_rate_hz);
        const std::vector<double> taps = sample(pooled, adc_rate_hz_);
        out.insert(out.end(), taps.begin(), taps.end());
    }
    return out;
}

void FeatureExtractor::calibrate(const ImageSet& train) {
    if (config_.full_scale) {
        return;
    }
    const std::size_t count = std::min(config_.calibration_images, train.size());
    if (count == 0) {
        throw ArgumentError("cannot calibrate the ADC on an empty training set");
    }
    const std::size_t per = grid_.count;
    std::vector<std::vector<double>> per_node(plan_.size());
    for (auto& v : per_node) {
        v.reserve(count * per);
    }
    for (std::size_t i = 0; i < count; ++i) {
        const std::vector<double> a = analog_features(train.image(i), i);
        for (std::size_t k = 0; k < plan_.size(); ++k) {
            per_node[k].insert(per_node[k].end(), a.begin() + k * per, a.begin() + (k + 1) * per);
        }
    }
    full_scales_.clear();
    for (auto& v : per_node) {
        double fs = percentile(std::move(v), config_.calibration_percentile);
        // A node that never sees light still needs a positive range.
        full_scales_.push_back(fs > 0.0 ? fs : 1e-12);
    }
}

void FeatureExtractor::set_full_scales(std::vector<double> scales) {
    if (scales.size() != plan_.size()) {
        throw ArgumentError("one full scale per node expected");
    }
    full_scales_ = std::move(scales);
}

void FeatureExtractor::extract(const ImageView& image, std::uint64_t image_index, std::span<float> out) const {
    if (!calibrated()) {
        throw ArgumentError("ADC full scale not calibrated");
    }
    if (out.size() != feature_dim()) {
        throw ArgumentError("output span has the wrong feature dimension");
    }
    const std::vector<double> analog = analog_features(image, image_index);
    const std::size_t per = grid_.count;
    for (std::size_t k = 0; k < plan_.size(); ++k) {
        const std::vector<double> codes =
            quantize(std::span(analog).subspan(k * per, per), config_.adc_bits, full_scales_[k]);
        for (std::size_t j = 0; j < per; ++j) {
            out[k * per + j] = static_cast<float>(codes[j]);
        }
    }
}

FeatureMatrix extract_features(const FeatureExtractor& extractor, const ImageSet& images,
                               std::uint64_t index_offset, unsigned threads) {
    FeatureMatrix m(images.size(), extractor.feature_dim());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, images.size())));

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            extractor.extract(images.image(i), index_offset + i, m.row(i));
        }
    };
    if (threads == 1) {
        work(0, images.size());
        return m;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (images.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(images.size(), begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return m;
}

FeatureMatrix pixel_features(const ImageSet& images) {
    FeatureMatrix m(images.size(), images.image_size());
    for (std::size_t k = 0; k < images.pixels.size(); ++k) {
        m.values[k] = static_cast<float>(images.pixels[k] / 255.0);
    }
    return m;
}

ImageSet take_images(const ImageSet& images, std::optional<std::size_t> count) {
    if (!count || *count >= images.size()) {
        return images;
    }
    ImageSet out;
    out.rows = images.rows;
    out.cols = images.cols;
    out.pixels.assign(images.pixels.begin(),
                      images.pixels.begin() + static_cast<std::ptrdiff_t>(*count * images.image_size()));
    return out;
}

LabelSet take_labels(const LabelSet& labels, std::optional<std::size_t> count) {
    if (!count || *count >= labels.size()) {
        return labels;
    }
    return {std::vector<std::uint8_t>(labels.labels.begin(),
                                      labels.labels.begin() + static_cast<std::ptrdiff_t>(*count))};
}

namespace {

constexpr char kCacheMagic[8] = {'O', 'S', 'S', 'F', 'E', 'A', 'T', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) {
        throw LengthError("feature cache truncated");
    }
    return v;
}

void put_split(std::ofstream& out, const FeatureMatrix& m, const std::vector<std::uint8_t>& labels, int bits) {
    put<std::uint64_t>(out, m.rows);
    put<std::uint64_t>(out, m.dim);
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    const double top = std::ldexp(1.0, bits) - 1.0;
    std::vector<std::uint16_t> levels(m.values.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        levels[k] = static_cast<std::uint16_t>(std::lround(m.values[k] * top));
    }
    out.write(reinterpret_cast<const char*>(levels.data()),
              static_cast<std::streamsize>(levels.size() * sizeof(std::uint16_t)));
}

void get_split(std::ifstream& in, FeatureMatrix& m, std::vector<std::uint8_t>& labels, int bits) {
    const auto rows = get<std::uint64_t>(in);
    const auto dim = get<std::uint64_t>(in);
    m = FeatureMatrix(rows, dim);
    labels.resize(rows);
    in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(rows));
    std::vector<std::uint16_t> levels(rows * dim);
    in.read(reinterpret_cast<char*>(levels.data()),
            static_cast<std::streamsize>(levels.size() * sizeof(std::uint16_t)));
    if (!in) {
        throw LengthError("feature cache truncated");
    }
    const double top = std::ldexp(1.0, bits) - 1.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        m.values[k] = static_cast<float>(levels[k] / top);
    }
}

}  // namespace

void save_feature_cache(const std::filesystem::path& path, std::uint64_t key, const FeatureSet& set) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + tmp);
        }
        out.write(kCacheMagic, sizeof kCacheMagic);
        put<std::uint64_t>(out, key);
        put<std::int32_t>(out, set.bits);
        put<std::uint64_t>(out, set.full_scales.size());
        for (double fs : set.full_scales) {
            put(out, fs);
        }
        put_split(out, set.train, set.train_labels, set.bits);
        put_split(out, set.test, set.test_labels, set.bits);
        if (!out) {
            throw Error("write failed: " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

bool load_feature_cache(const std::filesystem::path& path, std::uint64_t key, FeatureSet& set) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return false;
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
        throw FormatError("not a feature cache: " + path.string());
    }
    if (get<std::uint64_t>(in) != key) {
        return false;
    }
    set.bits = get<std::int32_t>(in);
    set.full_scales.resize(get<std::uint64_t>(in));
    for (double& fs : set.full_scales) {
        fs = get<double>(in);
    }
    get_split(in, set.train, set.train_labels, set.bits);
    get_split(in, set.test, set.test_labels, set.bits);
    return true;
}

std::filesystem::path feature_cache_path(const ExperimentConfig& config) {
    char name[64];
    std::snprintf(name, sizeof name, "features_%016llx.bin",
                  static_cast<unsigned long long>(fnv1a64(config.feature_key_text())));
    return config.out_dir / "cache" / name;
}

FeatureSet build_features(const ExperimentConfig& config, bool use_cache, bool* cache_hit) {
    const std::uint64_t key = fnv1a64(config.feature_key_text());
    const auto cache = feature_cache_path(config);
    FeatureSet set;
    if (cache_hit != nullptr) {
        *cache_hit = false;
    }
    if (use_cache && load_feature_cache(cache, key, set)) {
        if (cache_hit != nullptr) {
            *cache_hit = true;
        }
        return set;
    }

    config.validate_files();
    ImageSet train = take_images(load_idx_images(config.train_images), config.train_subset);
    LabelSet train_labels = take_labels(load_idx_labels(config.train_labels), config.train_subset);
    ImageSet test = take_images(load_idx_images(config.test_images), config.test_subset);
    LabelSet test_labels = take_labels(load_idx_labels(config.test_labels), config.test_subset);
    if (train.size() != train_labels.size() || test.size() != test_labels.size()) {
        throw ConfigError("data", "image and label counts differ");
    }
    if (train.rows != config.image_rows || train.cols != config.image_cols || test.rows != train.rows ||
        test.cols != train.cols) {
        throw ConfigError("data.rows", "dataset images are " + std::to_string(train.rows) + "x" +
                                           std::to_string(train.cols) + ", configuration expects " +
                                           std::to_string(config.image_rows) + "x" +
                                           std::to_string(config.image_cols));
    }
    set.train_labels = std::move(train_labels.labels);
    set.test_labels = std::move(test_labels.labels);

    if (config.bypass_oss) {
        set.bits = 8;
        set.train = pixel_features(train);
        set.test = pixel_features(test);
    } else {
        FeatureExtractor fx(config);
        fx.calibrate(train);
        set.bits = config.adc_bits;
        set.full_scales.assign(fx.full_scales().begin(), fx.full_scales().end());
        set.train = extract_features(fx, train, 0, config.threads);
        set.test = extract_features(fx, test, kTestIndexOffset, config.threads);
    }
    if (use_cache) {
        save_feature_cache(cache, key, set);
    }
    return set;
}

}  // namespace oss
