#include "oss/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "oss/dataset.hpp"
#include "oss/errors.hpp"

namespace oss {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t get_size(const ConfigFile& cfg, const std::string& key, std::size_t fallback) {
    const std::int64_t v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) {
        throw ConfigError(key, "must be non-negative");
    }
    return static_cast<std::size_t>(v);
}

std::filesystem::path dataset_path(const ConfigFile& cfg, const std::string& key,
                                   const std::filesystem::path& dir, const char* standard_name) {
    if (auto v = cfg.raw(key)) {
        return *v;
    }
    if (dir.empty()) {
        return {};
    }
    const auto plain = dir / standard_name;
    const auto gz = dir / (std::string(standard_name) + ".gz");
    if (!std::filesystem::exists(plain) && std::filesystem::exists(gz)) {
        return gz;
    }
    return plain;
}

FilterBankConfig parse_plan(const std::string& key, const std::string& text) {
    FilterBankConfig plan;
    for (const std::string& triple : split_list(text, ';')) {
        const auto parts = split_list(triple, ',');
        if (parts.size() != 2 && parts.size() != 3) {
            throw ConfigError(key, "each node is 'center_hz, cutoff_hz[, order]', got '" + triple + "'");
        }
        FilterNodeConfig node;
        node.center_hz = parse_double(key, parts[0]);
        node.cutoff_hz = parse_double(key, parts[1]);
        node.order = parts.size() == 3 ? static_cast<int>(parse_int(key, parts[2])) : 1;
        plan.nodes.push_back(node);
    }
    try {
        plan.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(key, e.what());
    }
    return plan;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

HardwareSpec hardware_from(const ConfigFile& cfg) {
    HardwareSpec hw;
    hw.wavelengths = static_cast<int>(cfg.get_int("hardware.wavelengths", hw.wavelengths));
    hw.patch_edge = static_cast<int>(cfg.get_int("hardware.patch_edge", hw.patch_edge));
    hw.nodes = static_cast<int>(cfg.get_int("hardware.nodes", hw.nodes));
    hw.pixel_rate_hz = cfg.get_double("hardware.pixel_rate_hz", hw.pixel_rate_hz);
    hw.ring_radius_m = cfg.get_double("hardware.ring_radius_m", hw.ring_radius_m);
    hw.node_spacing_m = cfg.get_double("hardware.node_spacing_m", hw.node_spacing_m);
    try {
        hw.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("hardware", e.what());
    }
    return hw;
}

PowerModelParams power_params_from(const ConfigFile& cfg) {
    PowerModelParams pm = default_power_params();
    if (cfg.has("power.wavelength_m") && cfg.has("power.photon_energy_j")) {
        throw ConfigError("power.photon_energy_j", "give either wavelength_m or photon_energy_j");
    }
    if (cfg.has("power.wavelength_m")) {
        pm.photon_energy_j = photon_energy(cfg.get_double("power.wavelength_m", 1550e-9));
    }
    pm.photon_energy_j = cfg.get_double("power.photon_energy_j", pm.photon_energy_j);
    pm.bit_precision = static_cast<int>(cfg.get_int("power.bit_precision", pm.bit_precision));
    pm.pd_capacitance_f = cfg.get_double("power.pd_capacitance_f", pm.pd_capacitance_f);
    pm.pd_voltage_v = cfg.get_double("power.pd_voltage_v", pm.pd_voltage_v);
    pm.mod_energy_j_per_bit = cfg.get_double("power.mod_energy_j_per_bit", pm.mod_energy_j_per_bit);
    pm.adc_energy_j_per_bit = cfg.get_double("power.adc_energy_j_per_bit", pm.adc_energy_j_per_bit);
    pm.eta_laser = cfg.get_double("power.eta_laser", pm.eta_laser);
    pm.eta_mrr = cfg.get_double("power.eta_mrr", pm.eta_mrr);
    pm.eta_pd = cfg.get_double("power.eta_pd", pm.eta_pd);
    try {
        pm.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("power", e.what());
    }
    return pm;
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& cfg) {
    ExperimentConfig c;
    const std::filesystem::path dir = cfg.get_string("data.dir", "");
    c.train_images = dataset_path(cfg, "data.train_images", dir, "train-images-idx3-ubyte");
    c.train_labels = dataset_path(cfg, "data.train_labels", dir, "train-labels-idx1-ubyte");
    c.test_images = dataset_path(cfg, "data.test_images", dir, "t10k-images-idx3-ubyte");
    c.test_labels = dataset_path(cfg, "data.test_labels", dir, "t10k-labels-idx1-ubyte");
    if (cfg.has("data.train_subset")) {
        c.train_subset = get_size(cfg, "data.train_subset", 0);
    }
    if (cfg.has("data.test_subset")) {
        c.test_subset = get_size(cfg, "data.test_subset", 0);
    }
    c.image_rows = get_size(cfg, "data.rows", c.image_rows);
    c.image_cols = get_size(cfg, "data.cols", c.image_cols);

    c.patch_edge = get_size(cfg, "oss.patch_edge", c.patch_edge);
    c.nodes = get_size(cfg, "oss.nodes", c.nodes);
    c.bypass_oss = cfg.get_bool("oss.bypass", c.bypass_oss);

    c.filter_order = static_cast<int>(cfg.get_int("filterbank.order", c.filter_order));
    if (auto plan = cfg.raw("filterbank.plan")) {
        c.plan = parse_plan("filterbank.plan", *plan);
        if (cfg.has("oss.nodes") && c.nodes != c.plan->size()) {
            throw ConfigError("oss.nodes", "disagrees with the explicit filterbank.plan");
        }
        c.nodes = c.plan->size();
    }

    c.frontend.pixel_rate_hz = cfg.get_double("frontend.pixel_rate_hz", c.frontend.pixel_rate_hz);
    c.frontend.oversample = static_cast<int>(cfg.get_int("frontend.oversample", c.frontend.oversample));
    c.frontend.peak_power_w = cfg.get_double("frontend.peak_power_w", c.frontend.peak_power_w);
    const std::string map = cfg.get_string("frontend.amplitude_map", "field");
    if (map == "field") {
        c.frontend.amplitude_map = AmplitudeMap::field;
    } else if (map == "power") {
        c.frontend.amplitude_map = AmplitudeMap::power;
    } else {
        throw ConfigError("frontend.amplitude_map", "expected 'field' or 'power', got '" + map + "'");
    }
    c.split_power = cfg.get_bool("frontend.split_power", c.split_power);

    c.noise.responsivity_a_per_w = cfg.get_double("noise.responsivity", c.noise.responsivity_a_per_w);
    c.noise.temperature_k = cfg.get_double("noise.temperature_k", c.noise.temperature_k);
    c.noise.load_ohms = cfg.get_double("noise.load_ohms", c.noise.load_ohms);
    c.noise.shot_enabled = cfg.get_bool("noise.shot", c.noise.shot_enabled);
    c.noise.thermal_enabled = cfg.get_bool("noise.thermal", c.noise.thermal_enabled);

    c.adc_bits = static_cast<int>(cfg.get_int("adc.bits", c.adc_bits));
    const std::string fs = cfg.get_string("adc.full_scale", "auto");
    if (fs != "auto") {
        c.full_scale = parse_double("adc.full_scale", fs);
    }
    const int rate_keys = int(cfg.has("adc.sr_fraction")) + int(cfg.has("adc.sr_hz")) +
                          int(cfg.has("adc.feature_dim"));
    if (rate_keys > 1) {
        throw ConfigError("adc", "set only one of sr_fraction, sr_hz, feature_dim");
    }
    if (cfg.has("adc.sr_hz")) {
        c.rate_mode = RateMode::absolute;
        c.sr_hz = cfg.get_double("adc.sr_hz", 0.0);
    } else if (cfg.has("adc.feature_dim")) {
        c.rate_mode = RateMode::feature_dim;
        c.target_feature_dim = get_size(cfg, "adc.feature_dim", 0);
    } else {
        c.rate_mode = RateMode::nyquist_fraction;
        c.sr_fraction = cfg.get_double("adc.sr_fraction", c.sr_fraction);
    }
    c.calibration_images = get_size(cfg, "adc.calibration_images", c.calibration_images);
    c.calibration_percentile = cfg.get_double("adc.calibration_percentile", c.calibration_percentile);

    c.train.learning_rate = cfg.get_double("train.learning_rate", c.train.learning_rate);
    c.train.beta1 = cfg.get_double("train.beta1", c.train.beta1);
    c.train.beta2 = cfg.get_double("train.beta2", c.train.beta2);
    c.train.epsilon = cfg.get_double("train.epsilon", c.train.epsilon);
    c.train.batch_size = get_size(cfg, "train.batch_size", c.train.batch_size);
    c.train.epochs = get_size(cfg, "train.epochs", c.train.epochs);

    c.wavelengths = static_cast<int>(cfg.get_int("hardware.wavelengths", c.wavelengths));
    c.ring_radius_m = cfg.get_double("hardware.ring_radius_m", c.ring_radius_m);
    c.node_spacing_m = cfg.get_double("hardware.node_spacing_m", c.node_spacing_m);
    c.power = power_params_from(cfg);

    c.set_seed(static_cast<std::uint64_t>(cfg.get_int("run.seed", 1)));
    c.threads = static_cast<unsigned>(get_size(cfg, "run.threads", 0));
    c.out_dir = cfg.get_string("run.out", c.out_dir.string());

    for (const std::string& key : cfg.unused_keys()) {
        if (key.rfind("sweep.", 0) != 0) {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    return c;
}

void ExperimentConfig::set_seed(std::uint64_t s) {
    seed = s;
    noise.seed = s;
    train.seed = s;
}

void ExperimentConfig::validate() const {
    if (image_rows == 0 || image_cols == 0) {
        throw ConfigError("data.rows", "image dimensions must be positive");
    }
    try {
        train.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("train", e.what());
    }
    if (bypass_oss) {
        return;
    }
    if (patch_edge == 0) {
        throw ConfigError("oss.patch_edge", "must be >= 1");
    }
    if (nodes == 0) {
        throw ConfigError("oss.nodes", "must be >= 1");
    }
    if (filter_order < 1) {
        throw ConfigError("filterbank.order", "must be >= 1");
    }
    try {
        frontend.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("frontend", e.what());
    }
    try {
        noise.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("noise", e.what());
    }
    const double fs = frontend.sample_rate_hz();
    for (const FilterNodeConfig& node : filter_plan().nodes) {
        try {
            check_node(node, fs);
        } catch (const ArgumentError& e) {
            throw ConfigError(plan ? "filterbank.plan" : "frontend.oversample", e.what());
        }
    }
    if (pooling_bandwidth_hz(patch_edge, frontend.pixel_rate_hz) >= fs / 2.0) {
        throw ConfigError("oss.patch_edge", "photodiode bandwidth PR/n^2 reaches the simulation Nyquist rate");
    }
    if (adc_bits < 1 || adc_bits > 16) {
        throw ConfigError("adc.bits", "must lie in [1, 16]");
    }
    if (full_scale && !(*full_scale > 0.0)) {
        throw ConfigError("adc.full_scale", "must be > 0 or 'auto'");
    }
    if (calibration_images == 0) {
        throw ConfigError("adc.calibration_images", "must be >= 1");
    }
    if (!(calibration_percentile > 0.0 && calibration_percentile <= 100.0)) {
        throw ConfigError("adc.calibration_percentile", "must lie in (0, 100]");
    }
    const char* rate_key = rate_mode == RateMode::absolute      ? "adc.sr_hz"
                           : rate_mode == RateMode::feature_dim ? "adc.feature_dim"
                                                                : "adc.sr_fraction";
    if (rate_mode == RateMode::feature_dim && target_feature_dim < nodes) {
        throw ConfigError(rate_key, "target feature_dim is smaller than the node count");
    }
    const double sr = adc_rate_hz();
    if (!(sr > 0.0)) {
        throw ConfigError(rate_key, "ADC rate must be > 0");
    }
    if (sr > fs * (1.0 + 1e-12)) {
        throw ConfigError(rate_key, "ADC rate exceeds the electrical sample rate");
    }
    if (features_per_node() == 0) {
        throw ConfigError(rate_key, "ADC rate yields zero samples per node");
    }
}

void ExperimentConfig::validate_files() const {
    const std::pair<const char*, const std::filesystem::path*> files[] = {
        {"data.train_images", &train_images},
        {"data.train_labels", &train_labels},
        {"data.test_images", &test_images},
        {"data.test_labels", &test_labels},
    };
    for (const auto& [key, path] : files) {
        if (path->empty()) {
            throw ConfigError(key, "not set (use data.dir or an explicit path)");
        }
        if (!std::filesystem::exists(*path)) {
            throw ConfigError(key, "file not found: " + path->string());
        }
    }
}

FilterBankConfig ExperimentConfig::filter_plan() const {
    return plan ? *plan : plan_filters(nodes, frontend.pixel_rate_hz, filter_order);
}

std::size_t ExperimentConfig::sequence_samples() const {
    return sequence_length(image_rows, image_cols, patch_edge) *
           static_cast<std::size_t>(frontend.oversample);
}

double ExperimentConfig::adc_rate_hz() const {
    switch (rate_mode) {
        case RateMode::absolute:
            return sr_hz;
        case RateMode::feature_dim: {
            const std::size_t per_node = target_feature_dim / nodes;
            return static_cast<double>(per_node) * frontend.sample_rate_hz() /
                   static_cast<double>(sequence_samples());
        }
        case RateMode::nyquist_fraction:
        default:
            return sr_fraction * nyquist_sr(patch_edge, frontend.pixel_rate_hz);
    }
}

std::size_t ExperimentConfig::features_per_node() const {
    return sampling_grid(sequence_samples(), frontend.sample_rate_hz(), adc_rate_hz()).count;
}

std::size_t ExperimentConfig::feature_dim() const {
    return bypass_oss ? image_rows * image_cols : nodes * features_per_node();
}

HardwareSpec ExperimentConfig::hardware() const {
    HardwareSpec hw;
    hw.wavelengths = wavelengths;
    hw.patch_edge = static_cast<int>(patch_edge);
    hw.nodes = static_cast<int>(nodes);
    hw.pixel_rate_hz = frontend.pixel_rate_hz;
    hw.ring_radius_m = ring_radius_m;
    hw.node_spacing_m = node_spacing_m;
    return hw;
}

std::string ExperimentConfig::feature_key_text() const {
    std::ostringstream os;
    os << "train_images=" << train_images.string() << "\ntrain_labels=" << train_labels.string()
       << "\ntest_images=" << test_images.string() << "\ntest_labels=" << test_labels.string()
       << "\ntrain_subset=" << (train_subset ? std::to_string(*train_subset) : "all")
       << "\ntest_subset=" << (test_subset ? std::to_string(*test_subset) : "all")
       << "\nbypass=" << bypass_oss;
    if (bypass_oss) {
        return os.str();
    }
    os << "\npatch_edge=" << patch_edge << "\nplan=";
    for (const auto& n : filter_plan().nodes) {
        os << fmt_double(n.center_hz) << ',' << fmt_double(n.cutoff_hz) << ',' << n.order << ';';
    }
    os << "\npixel_rate=" << fmt_double(frontend.pixel_rate_hz) << "\noversample=" << frontend.oversample
       << "\npeak_power=" << fmt_double(frontend.peak_power_w)
       << "\namplitude_map=" << (frontend.amplitude_map == AmplitudeMap::field ? "field" : "power")
       << "\nsplit_power=" << split_power << "\nresponsivity=" << fmt_double(noise.responsivity_a_per_w)
       << "\ntemperature=" << fmt_double(noise.temperature_k) << "\nload=" << fmt_double(noise.load_ohms)
       << "\nshot=" << noise.shot_enabled << "\nthermal=" << noise.thermal_enabled
       << "\nnoise_seed=" << noise.seed << "\nbits=" << adc_bits
       << "\nfull_scale=" << (full_scale ? fmt_double(*full_scale) : "auto")
       << "\nsr=" << fmt_double(adc_rate_hz()) << "\ncalibration_images=" << calibration_images
       << "\ncalibration_percentile=" << fmt_double(calibration_percentile);
    return os.str();
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "data.train_images = " << train_images.string() << '\n'
       << "data.train_labels = " << train_labels.string() << '\n'
       << "data.test_images = " << test_images.string() << '\n'
       << "data.test_labels = " << test_labels.string() << '\n';
    if (train_subset) {
        os << "data.train_subset = " << *train_subset << '\n';
    }
    if (test_subset) {
        os << "data.test_subset = " << *test_subset << '\n';
    }
    os << "oss.bypass = " << (bypass_oss ? "true" : "false") << '\n'
       << "oss.patch_edge = " << patch_edge << '\n'
       << "oss.nodes = " << nodes << '\n'
       << "filterbank.order = " << filter_order << '\n';
    if (plan) {
        os << "filterbank.plan = ";
        for (std::size_t k = 0; k < plan->size(); ++k) {
            const auto& n = plan->nodes[k];
            os << (k ? "; " : "") << fmt_double(n.center_hz) << ", " << fmt_double(n.cutoff_hz) << ", "
               << n.order;
        }
        os << '\n';
    }
    os << "frontend.pixel_rate_hz = " << fmt_double(frontend.pixel_rate_hz) << '\n'
       << "frontend.oversample = " << frontend.oversample << '\n'
       << "frontend.peak_power_w = " << fmt_double(frontend.peak_power_w) << '\n'
       << "frontend.amplitude_map = " << (frontend.amplitude_map == AmplitudeMap::field ? "field" : "power")
       << '\n'
       << "frontend.split_power = " << (split_power ? "true" : "false") << '\n'
       << "noise.responsivity = " << fmt_double(noise.responsivity_a_per_w) << '\n'
       << "noise.temperature_k = " << fmt_double(noise.temperature_k) << '\n'
       << "noise.load_ohms = " << fmt_double(noise.load_ohms) << '\n'
       << "noise.shot = " << (noise.shot_enabled ? "on" : "off") << '\n'
       << "noise.thermal = " << (noise.thermal_enabled ? "on" : "off") << '\n'
       << "adc.bits = " << adc_bits << '\n'
       << "adc.full_scale = " << (full_scale ? fmt_double(*full_scale) : "auto") << '\n';
    switch (rate_mode) {
        case RateMode::absolute:
            os << "adc.sr_hz = " << fmt_double(sr_hz) << '\n';
            break;
        case RateMode::feature_dim:
            os << "adc.feature_dim = " << target_feature_dim << '\n';
            break;
        case RateMode::nyquist_fraction:
            os << "adc.sr_fraction = " << fmt_double(sr_fraction) << '\n';
            break;
    }
    os << "adc.calibration_images = " << calibration_images << '\n'
       << "adc.calibration_percentile = " << fmt_double(calibration_percentile) << '\n'
       << "train.learning_rate = " << fmt_double(train.learning_rate) << '\n'
       << "train.beta1 = " << fmt_double(train.beta1) << '\n'
       << "train.beta2 = " << fmt_double(train.beta2) << '\n'
       << "train.epsilon = " << fmt_double(train.epsilon) << '\n'
       << "train.batch_size = " << train.batch_size << '\n'
       << "train.epochs = " << train.epochs << '\n'
       << "run.seed = " << seed << '\n';
    return os.str();
}

double compression_ratio(std::size_t input_size, std::size_t feature_dim) {
    if (feature_dim == 0) {
        throw ArgumentError("compression ratio undefined for zero features");
    }
    return static_cast<double>(input_size) / static_cast<double>(feature_dim);
}

double compression_ratio(const ExperimentConfig& config) {
    return compression_ratio(config.image_rows * config.image_cols, config.feature_dim());
}

}  // namespace oss
