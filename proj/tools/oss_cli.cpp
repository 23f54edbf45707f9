// oss: command-line front end.
//
//   oss simulate --config run.cfg          extract features into the cache
//   oss train    --config run.cfg          full run: features, training, CSVs, checkpoint
//   oss sweep    --config sweep.cfg        one row per [sweep] grid point
//   oss metrics  [--config hw.cfg]         analytic hardware figures; comma lists expand
//   oss report   --out DIR                 accuracy-vs-ratio, comparison and FLOPS tables

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oss/errors.hpp"
#include "oss/experiment.hpp"
#include "oss/flops.hpp"
#include "oss/harness.hpp"
#include "oss/metrics.hpp"
#include "oss/pipeline.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> subset;
    bool bypass = false;
    std::optional<unsigned> threads;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c, bool experiment = true) {
    cmd->add_option("--config", c.config, "configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory (run.out)");
    cmd->add_option("--set", c.overrides, "override a key: --set oss.nodes=5")->take_all();
    if (!experiment) {
        return;
    }
    cmd->add_option("--seed", c.seed, "RNG seed for noise and training (run.seed)");
    cmd->add_option("--subset", c.subset, "use only the first INT training images (data.train_subset)");
    cmd->add_flag("--bypass-oss", c.bypass, "feed raw pixels to the classifier (oss.bypass)");
    cmd->add_option("--threads", c.threads, "feature-extraction threads, 0 = all cores");
}

oss::ConfigFile load_config(const Common& c) {
    oss::ConfigFile cfg = c.config.empty() ? oss::ConfigFile{} : oss::ConfigFile::load(c.config);
    for (const std::string& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw oss::ConfigError(kv, "--set expects key=value");
        }
        cfg.set(oss::trim(kv.substr(0, eq)), oss::trim(kv.substr(eq + 1)));
    }
    if (c.seed) {
        cfg.set("run.seed", std::to_string(*c.seed));
    }
    if (c.out) {
        cfg.set("run.out", *c.out);
    }
    if (c.subset) {
        cfg.set("data.train_subset", std::to_string(*c.subset));
    }
    if (c.bypass) {
        cfg.set("oss.bypass", "true");
    }
    if (c.threads) {
        cfg.set("run.threads", std::to_string(*c.threads));
    }
    return cfg;
}

int cmd_simulate(const Common& c) {
    const oss::ExperimentConfig cfg = oss::ExperimentConfig::from_config(load_config(c));
    cfg.validate();
    bool hit = false;
    const oss::FeatureSet fs = oss::build_features(cfg, true, &hit);
    std::cout << (hit ? "cached features: " : "wrote features: ") << oss::feature_cache_path(cfg).string() << '\n'
              << "train " << fs.train.rows << " x " << fs.train.dim << ", test " << fs.test.rows << " x "
              << fs.test.dim << ", compression ratio " << oss::compression_ratio(cfg) << '\n';
    return 0;
}

int cmd_train(const Common& c) {
    const oss::ExperimentConfig cfg = oss::ExperimentConfig::from_config(load_config(c));
    oss::RunOptions opts;
    opts.log = &std::cout;
    const oss::RunReport r = oss::run_experiment(cfg, opts);
    std::cout << "test accuracy " << std::fixed << std::setprecision(4) << r.test_accuracy << " at feature_dim "
              << r.feature_dim << " (ratio " << r.compression_ratio << "); outputs in " << cfg.out_dir.string()
              << '\n';
    return 0;
}

int cmd_sweep(const Common& c) {
    const oss::ConfigFile file = load_config(c);
    const oss::SweepGrid grid = oss::SweepGrid::from_config(file);
    const oss::ExperimentConfig base = oss::ExperimentConfig::from_config(file);
    oss::RunOptions opts;
    opts.log = &std::cout;
    const auto reports = oss::run_sweep(grid, base, opts);
    std::size_t failed = 0;
    for (const auto& r : reports) {
        failed += r.ok ? 0 : 1;
    }
    std::cout << reports.size() << " runs, " << failed << " failed; " << (base.out_dir / "runs.csv").string()
              << '\n';
    return failed == reports.size() ? 1 : 0;
}

// Expands comma-separated hardware.* / power.* values cartesian-wise.
std::vector<oss::ConfigFile> expand_metric_lists(const oss::ConfigFile& file) {
    std::vector<oss::ConfigFile> points{oss::ConfigFile{}};
    for (const auto& [key, value] : file.entries()) {
        if (key.rfind("hardware.", 0) != 0 && key.rfind("power.", 0) != 0) {
            throw oss::ConfigError(key, "metrics reads only hardware.* and power.* keys");
        }
        const auto values = oss::split_list(value);
        if (values.empty()) {
            throw oss::ConfigError(key, "empty value");
        }
        std::vector<oss::ConfigFile> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                oss::ConfigFile q = p;
                q.set(key, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

int cmd_metrics(const Common& c) {
    oss::ConfigFile file = c.config.empty() ? oss::ConfigFile{} : oss::ConfigFile::load(c.config);
    for (const std::string& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw oss::ConfigError(kv, "--set expects key=value");
        }
        file.set(oss::trim(kv.substr(0, eq)), oss::trim(kv.substr(eq + 1)));
    }
    const std::filesystem::path out = c.out.value_or(".");

    std::ostringstream csv;
    csv << "row,wavelengths,patch_edge,nodes,pixel_rate_hz,ring_radius_m,node_spacing_m,bit_precision,"
           "compute_speed_macs,compute_speed_tops,footprint_mm2,receiver_w,modulator_w,adc_w,power_w,"
           "efficiency_tops_per_w,density_tops_per_mm2,branch\n";
    std::printf("%4s %3s %2s %3s %9s %10s %10s %9s %9s %9s\n", "row", "W", "n", "N", "PR[GHz]", "TOPS", "A[mm2]",
                "P[W]", "TOPS/W", "TOPS/mm2");
    std::size_t row = 0;
    for (const oss::ConfigFile& p : expand_metric_lists(file)) {
        const oss::HardwareSpec hw = oss::hardware_from(p);
        const oss::PowerModelParams pm = oss::power_params_from(p);
        const oss::MetricsReport m = oss::evaluate_metrics(hw, pm);
        const char* branch = m.breakdown.quantization_branch ? "2^(2Nb+1)" : "CdVr/e";
        std::printf("%4zu %3d %2d %3d %9.1f %10.3f %10.4f %9.4f %9.3f %9.3f\n", row, hw.wavelengths, hw.patch_edge,
                    hw.nodes, hw.pixel_rate_hz / 1e9, m.compute_speed_ops / 1e12, m.footprint_m2 * 1e6, m.power_w,
                    m.efficiency_tops_per_w, m.density_tops_per_mm2);
        char line[512];
        std::snprintf(line, sizeof line, "%zu,%d,%d,%d,%.9g,%.9g,%.9g,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n",
                      row, hw.wavelengths, hw.patch_edge, hw.nodes, hw.pixel_rate_hz, hw.ring_radius_m,
                      hw.node_spacing_m, pm.bit_precision, m.compute_speed_macs, m.compute_speed_ops / 1e12,
                      m.footprint_m2 * 1e6, m.breakdown.receiver_w, m.breakdown.modulator_w, m.breakdown.adc_w,
                      m.power_w, m.efficiency_tops_per_w, m.density_tops_per_mm2, branch);
        csv << line;
        ++row;
    }
    std::cout << "power grouping: W [ N hv max(2^(2Nb+1), CdVr/e) PR/(n^2 eta) + E_mod Nb PR + N E_ADC Nb PR/n^2 ]\n"
              << "reported minimum optical input: " << oss::kReportedMinNodePowerW * 1e6 << " uW per node (not derived)\n";
    std::filesystem::create_directories(out);
    std::ofstream(out / "metrics.csv") << csv.str();
    std::cout << "wrote " << (out / "metrics.csv").string() << '\n';
    return 0;
}

int cmd_report(const Common& c) {
    std::filesystem::path out = c.out.value_or("");
    if (out.empty()) {
        out = c.config.empty() ? std::filesystem::path("runs")
                               : oss::ExperimentConfig::from_config(load_config(c)).out_dir;
    }
    std::filesystem::create_directories(out);
    oss::write_report(out, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical spectrum-slicing accelerator simulator"};
    app.require_subcommand(1);
    Common c;
    auto* simulate = app.add_subcommand("simulate", "extract features (cached) without training");
    auto* trainc = app.add_subcommand("train", "extract features, train the classifier, write CSVs and a checkpoint");
    auto* sweep = app.add_subcommand("sweep", "run every point of the [sweep] grid");
    auto* metrics = app.add_subcommand("metrics", "analytic speed/footprint/power figures");
    auto* report = app.add_subcommand("report", "figure and table data from runs.csv");
    for (auto* cmd : {simulate, trainc, sweep, report}) {
        add_common(cmd, c);
    }
    add_common(metrics, c, false);
    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(c);
        }
        if (trainc->parsed()) {
            return cmd_train(c);
        }
        if (sweep->parsed()) {
            return cmd_sweep(c);
        }
        if (metrics->parsed()) {
            return cmd_metrics(c);
        }
        return cmd_report(c);
    } catch (const oss::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
