#include "oss/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "oss/errors.hpp"
#include "oss/flops.hpp"
#include "oss/pipeline.hpp"
#include "oss/receiver.hpp"

namespace oss {
namespace {

std::string num(double v, const char* f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

void fill_from_config(RunReport& r, const ExperimentConfig& c) {
    r.config_echo = c.echo();
    r.bypass = c.bypass_oss;
    r.nodes = c.bypass_oss ? 0 : c.nodes;
    r.patch_edge = c.bypass_oss ? 0 : c.patch_edge;
    r.oversample = c.frontend.oversample;
    r.noise = c.noise.shot_enabled || c.noise.thermal_enabled;
    r.seed = c.seed;
    r.epochs = c.train.epochs;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport r;
    r.run_id = options.run_id;
    fill_from_config(r, config);

    config.validate();
    r.feature_dim = config.feature_dim();
    r.compression_ratio = compression_ratio(config);
    if (!config.bypass_oss) {
        r.sr_hz = config.adc_rate_hz();
        r.sr_fraction = r.sr_hz / nyquist_sr(config.patch_edge, config.frontend.pixel_rate_hz);
        r.metrics = evaluate_metrics(config.hardware(), config.power);
    }
    if (options.log) {
        *options.log << "[run " << r.run_id << "] "
                     << (config.bypass_oss ? std::string("bypass")
                                           : "N=" + std::to_string(config.nodes) + " n=" +
                                                 std::to_string(config.patch_edge))
                     << " feature_dim=" << r.feature_dim << " ratio=" << num(r.compression_ratio) << '\n';
    }

    const FeatureSet fs = build_features(config, options.use_cache, &r.cache_hit);
    if (fs.train.dim != r.feature_dim) {
        throw Error("extracted feature dimension " + std::to_string(fs.train.dim) +
                    " differs from the analytic value " + std::to_string(r.feature_dim));
    }
    r.compression_ratio = compression_ratio(config.image_rows * config.image_cols, fs.train.dim);

    TrainResult tr = train(fs.train, fs.train_labels, config.train, &fs.test, fs.test_labels);
    r.history = tr.history;
    r.train_accuracy = r.history.empty() ? evaluate(tr.params, fs.train, fs.train_labels)
                                         : r.history.back().train_accuracy;
    r.test_accuracy = evaluate(tr.params, fs.test, fs.test_labels);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (options.log) {
        *options.log << "[run " << r.run_id << "] test accuracy " << num(r.test_accuracy, "%.4f") << " ("
                     << num(r.wall_seconds, "%.1f") << " s" << (r.cache_hit ? ", cached features" : "")
                     << ")\n";
    }
    if (options.write_outputs) {
        std::filesystem::create_directories(config.out_dir);
        save_checkpoint(config.out_dir / ("model_" + std::to_string(r.run_id) + ".ckpt"), tr.params,
                        config.train);
        write_text(config.out_dir / ("run_" + std::to_string(r.run_id) + ".cfg"), r.config_echo);
        write_run_outputs(config.out_dir, {r});
    }
    return r;
}

SweepGrid SweepGrid::from_config(const ConfigFile& cfg) {
    SweepGrid g;
    for (const auto& v : cfg.get_list("sweep.nodes")) {
        g.nodes.push_back(static_cast<std::size_t>(parse_int("sweep.nodes", v)));
    }
    for (const auto& v : cfg.get_list("sweep.patch_edge")) {
        g.patch_edges.push_back(static_cast<std::size_t>(parse_int("sweep.patch_edge", v)));
    }
    for (const auto& v : cfg.get_list("sweep.sr_fraction")) {
        g.sr_fractions.push_back(parse_double("sweep.sr_fraction", v));
    }
    for (const auto& v : cfg.get_list("sweep.feature_dim")) {
        g.feature_dims.push_back(static_cast<std::size_t>(parse_int("sweep.feature_dim", v)));
    }
    for (const auto& v : cfg.get_list("sweep.noise")) {
        g.noise.push_back(parse_bool("sweep.noise", v));
    }
    for (const auto& v : cfg.get_list("sweep.oversample")) {
        g.oversample.push_back(static_cast<int>(parse_int("sweep.oversample", v)));
    }
    g.cartesian = cfg.get_bool("sweep.cartesian", true);
    if (!g.sr_fractions.empty() && !g.feature_dims.empty()) {
        throw ConfigError("sweep.feature_dim", "sweep either sr_fraction or feature_dim, not both");
    }
    for (const auto& key : cfg.unused_keys()) {
        if (key.rfind("sweep.", 0) == 0) {
            throw ConfigError(key, "unknown sweep key");
        }
    }
    return g;
}

namespace {

std::vector<std::size_t> axis_sizes(const SweepGrid& g) {
    return {g.nodes.size(), g.patch_edges.size(), g.sr_fractions.size() + g.feature_dims.size(),
            g.noise.size(), g.oversample.size()};
}

void apply_axis(ExperimentConfig& c, const SweepGrid& g, std::size_t axis, std::size_t i) {
    switch (axis) {
        case 0:
            c.nodes = g.nodes[i];
            c.plan.reset();
            break;
        case 1:
            c.patch_edge = g.patch_edges[i];
            break;
        case 2:
            if (!g.sr_fractions.empty()) {
                c.rate_mode = RateMode::nyquist_fraction;
                c.sr_fraction = g.sr_fractions[i];
            } else {
                c.rate_mode = RateMode::feature_dim;
                c.target_feature_dim = g.feature_dims[i];
            }
            break;
        case 3:
            c.noise.shot_enabled = g.noise[i];
            c.noise.thermal_enabled = g.noise[i];
            break;
        case 4:
            c.frontend.oversample = g.oversample[i];
            break;
        default:
            break;
    }
}

}  // namespace

std::size_t SweepGrid::size() const {
    const auto sizes = axis_sizes(*this);
    std::size_t total = 0;
    if (cartesian) {
        total = 1;
        bool any = false;
        for (std::size_t s : sizes) {
            if (s) {
                total *= s;
                any = true;
            }
        }
        return any ? total : 0;
    }
    for (std::size_t s : sizes) {
        total = std::max(total, s);
    }
    return total;
}

std::vector<ExperimentConfig> SweepGrid::expand(const ExperimentConfig& base) const {
    const auto sizes = axis_sizes(*this);
    const std::size_t total = size();
    if (total == 0) {
        throw ArgumentError("empty sweep grid");
    }
    if (!cartesian) {
        for (std::size_t s : sizes) {
            if (s != 0 && s != 1 && s != total) {
                throw ArgumentError("zipped sweep axes must have equal length (or length 1)");
            }
        }
    }
    std::vector<ExperimentConfig> points;
    points.reserve(total);
    for (std::size_t p = 0; p < total; ++p) {
        ExperimentConfig c = base;
        if (cartesian) {
            std::size_t rem = p;
            std::vector<std::size_t> idx(sizes.size(), 0);
            for (std::size_t a = sizes.size(); a-- > 0;) {
                if (sizes[a]) {
                    idx[a] = rem % sizes[a];
                    rem /= sizes[a];
                }
            }
            for (std::size_t a = 0; a < sizes.size(); ++a) {
                if (sizes[a]) {
                    apply_axis(c, *this, a, idx[a]);
                }
            }
        } else {
            for (std::size_t a = 0; a < sizes.size(); ++a) {
                if (sizes[a]) {
                    apply_axis(c, *this, a, sizes[a] == 1 ? 0 : p);
                }
            }
        }
        points.push_back(std::move(c));
    }
    return points;
}

std::vector<RunReport> run_sweep(const SweepGrid& grid, const ExperimentConfig& base, const RunOptions& options) {
    const std::vector<ExperimentConfig> points = grid.expand(base);
    std::vector<RunReport> reports;
    reports.reserve(points.size());
    RunOptions per_run = options;
    per_run.write_outputs = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        per_run.run_id = i;
        try {
            reports.push_back(run_experiment(points[i], per_run));
            if (options.write_outputs) {
                std::filesystem::create_directories(base.out_dir);
                write_text(base.out_dir / ("run_" + std::to_string(i) + ".cfg"), reports.back().config_echo);
            }
        } catch (const std::exception& e) {
            RunReport failed;
            failed.run_id = i;
            failed.ok = false;
            failed.message = e.what();
            fill_from_config(failed, points[i]);
            if (options.log) {
                *options.log << "[run " << i << "] failed: " << e.what() << '\n';
            }
            reports.push_back(std::move(failed));
        }
    }
    if (options.write_outputs) {
        write_run_outputs(base.out_dir, reports);
    }
    return reports;
}

std::string runs_csv(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << kRunsHeader << '\n';
    for (const RunReport& r : reports) {
        os << r.run_id << ',' << (r.ok ? "ok" : "failed") << ',' << (r.bypass ? 1 : 0) << ',' << r.nodes << ','
           << r.patch_edge << ',' << r.oversample << ',' << (r.noise ? 1 : 0) << ',' << num(r.sr_hz, "%.9g") << ','
           << num(r.sr_fraction, "%.6f") << ',' << r.feature_dim << ',' << num(r.compression_ratio, "%.6f") << ','
           << num(r.train_accuracy, "%.6f") << ',' << num(r.test_accuracy, "%.6f") << ',' << r.epochs << ','
           << r.seed << ',' << num(r.metrics.compute_speed_macs, "%.6e") << ',' << num(r.metrics.power_w, "%.6f")
           << ',' << num(r.metrics.efficiency_tops_per_w, "%.4f") << ','
           << num(r.metrics.density_tops_per_mm2, "%.4f") << ',' << csv_safe(r.message) << '\n';
    }
    return os.str();
}

std::string history_csv(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << "run_id,epoch,train_loss,train_accuracy,test_accuracy\n";
    for (const RunReport& r : reports) {
        for (const EpochStats& e : r.history) {
            os << r.run_id << ',' << e.epoch << ',' << num(e.train_loss, "%.8f") << ','
               << num(e.train_accuracy, "%.6f") << ',' << num(e.test_accuracy, "%.6f") << '\n';
        }
    }
    return os.str();
}

std::string timing_csv(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << "run_id,wall_seconds,cache_hit\n";
    for (const RunReport& r : reports) {
        os << r.run_id << ',' << num(r.wall_seconds, "%.3f") << ',' << (r.cache_hit ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_run_outputs(const std::filesystem::path& out_dir, const std::vector<RunReport>& reports) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "runs.csv", runs_csv(reports));
    write_text(out_dir / "history.csv", history_csv(reports));
    write_text(out_dir / "timing.csv", timing_csv(reports));
}

std::vector<RunRow> read_runs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);
    if (trim(line) != kRunsHeader) {
        throw FormatError(path.string() + ": unexpected header");
    }
    std::vector<RunRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() < 13) {
            throw FormatError(path.string() + ": short row");
        }
        RunRow r;
        r.run_id = static_cast<std::size_t>(parse_int("run_id", f[0]));
        r.ok = f[1] == "ok";
        r.bypass = f[2] == "1";
        r.nodes = static_cast<std::size_t>(parse_int("nodes", f[3]));
        r.patch_edge = static_cast<std::size_t>(parse_int("patch_edge", f[4]));
        r.sr_hz = parse_double("sr_hz", f[7]);
        r.feature_dim = static_cast<std::size_t>(parse_int("feature_dim", f[9]));
        r.compression_ratio = parse_double("compression_ratio", f[10]);
        r.test_accuracy = parse_double("test_accuracy", f[12]);
        rows.push_back(r);
    }
    return rows;
}

void write_report(const std::filesystem::path& out_dir, std::ostream& os) {
    std::filesystem::create_directories(out_dir);
    std::vector<RunRow> runs;
    const auto runs_path = out_dir / "runs.csv";
    if (std::filesystem::exists(runs_path)) {
        runs = read_runs_csv(runs_path);
    }

    // Accuracy versus compression ratio.
    {
        std::ostringstream f;
        f << "compression_ratio,test_accuracy,nodes,patch_edge,sr_hz,bypass\n";
        for (const RunRow& r : runs) {
            if (r.ok) {
                f << num(r.compression_ratio, "%.6f") << ',' << num(r.test_accuracy, "%.6f") << ',' << r.nodes << ','
                  << r.patch_edge << ',' << num(r.sr_hz, "%.9g") << ',' << (r.bypass ? 1 : 0) << '\n';
            }
        }
        write_text(out_dir / "accuracy_vs_ratio.csv", f.str());
        os << "accuracy_vs_ratio.csv: " << std::count_if(runs.begin(), runs.end(), [](const RunRow& r) { return r.ok; })
           << " points\n\n";
    }

    // Figures of merit.
    {
        const MetricsReport m = evaluate_metrics(HardwareSpec{}, default_power_params());
        std::ostringstream f;
        f << "scheme,clock_ghz,mnist_accuracy,efficiency_tops_per_w,density_tops_per_mm2,source\n";
        os << "Scheme                      Clock(GHz)  Accuracy  TOPS/W    TOPS/mm2\n";
        auto cell = [](double v) { return v < 0 ? std::string("-") : num(v, "%.2f"); };
        for (const ReferenceSystem& s : reference_systems()) {
            f << s.scheme << ',' << num(s.clock_ghz) << ',' << s.mnist_accuracy << ',' << cell(s.efficiency_tops_per_w)
              << ',' << cell(s.density_tops_per_mm2) << ",reference\n";
            char line[160];
            std::snprintf(line, sizeof line, "%-28s%-12s%-10s%-10s%-10s\n", s.scheme.c_str(),
                          num(s.clock_ghz).c_str(), s.mnist_accuracy.c_str(), cell(s.efficiency_tops_per_w).c_str(),
                          cell(s.density_tops_per_mm2).c_str());
            os << line;
        }
        double best_acc = -1.0;
        for (const RunRow& r : runs) {
            if (r.ok && !r.bypass && r.nodes == 10) {
                best_acc = std::max(best_acc, r.test_accuracy);
            }
        }
        const std::string best = best_acc < 0 ? std::string("-") : num(100 * best_acc, "%.1f");
        f << "OSS-CNN (model),128," << best << ',' << num(m.efficiency_tops_per_w, "%.2f") << ','
          << num(m.density_tops_per_mm2, "%.2f") << ",computed\n";
        char line[160];
        std::snprintf(line, sizeof line, "%-28s%-12s%-10s%-10s%-10s\n", "OSS-CNN (model)", "128", best.c_str(),
                      num(m.efficiency_tops_per_w, "%.2f").c_str(), num(m.density_tops_per_mm2, "%.2f").c_str());
        os << line << "  power " << num(m.power_w, "%.4f") << " W (receiver " << num(m.breakdown.receiver_w, "%.4g")
           << ", modulator " << num(m.breakdown.modulator_w, "%.4g") << ", ADC " << num(m.breakdown.adc_w, "%.4g")
           << "), footprint " << num(m.footprint_m2 * 1e6, "%.4f") << " mm^2, "
           << num(m.compute_speed_ops / 1e12, "%.2f") << " TOPS\n"
           << "  reported minimum input power per node: " << num(kReportedMinNodePowerW * 1e6) << " uW (not modeled)\n\n";
        write_text(out_dir / "comparison.csv", f.str());
    }

    // Inference cost.
    {
        std::size_t oss_dim = 980;
        double oss_acc = -1.0;
        for (const RunRow& r : runs) {
            if (r.ok && !r.bypass && r.nodes == 10 && r.test_accuracy > oss_acc) {
                oss_acc = r.test_accuracy;
                oss_dim = r.feature_dim;
            }
        }
        const auto lenet = lenet5_single_head();
        const auto head = oss_head(oss_dim);
        std::ostringstream f;
        f << "scheme,fcl_outputs,flops_computed,flops_reported,test_accuracy_run,test_accuracy_reported,"
             "architecture,convention\n";
        f << "LeNet-5,10," << count_flops(lenet) << ',' << kReportedLenet5Flops << ",-,0.989," << describe(lenet)
          << ',' << kFlopsConvention << '\n';
        f << "OSS-NN,10," << count_flops(head) << ',' << kReportedOssFlops << ','
          << (oss_acc < 0 ? std::string("-") : num(oss_acc, "%.4f")) << ",0.976," << describe(head) << ','
          << kFlopsConvention << '\n';
        write_text(out_dir / "flops.csv", f.str());
        os << "Inference FLOPS (" << kFlopsConvention << ")\n"
           << "  LeNet-5 : computed " << count_flops(lenet) << ", reported " << kReportedLenet5Flops << '\n'
           << "  OSS-NN  : computed " << count_flops(head) << " (dim " << oss_dim << "), reported " << kReportedOssFlops
           << '\n';
    }
}

}  // namespace oss
