#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oss/errors.hpp"
#include "oss/harness.hpp"
#include "oss/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace oss;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n';
    }
    return n;
}

const std::filesystem::path& data_dir() {
    static const std::filesystem::path dir = [] {
        auto d = testing::scratch_dir("harness_data");
        testing::write_synthetic_mnist(d, 400, 200);
        return d;
    }();
    return dir;
}

ExperimentConfig small_config(const std::string& name, const std::string& extra = "") {
    const std::string text = "data.dir = " + data_dir().string() +
                             "\noss.nodes = 5\ntrain.epochs = 4\ntrain.batch_size = 32\n"
                             "train.learning_rate = 0.01\nadc.calibration_images = 100\n" +
                             extra;
    ExperimentConfig c = ExperimentConfig::from_config(ConfigFile::parse(text));
    c.out_dir = testing::scratch_dir(name);
    return c;
}

}  // namespace

TEST_CASE("end-to-end run on a synthetic dataset") {
    const ExperimentConfig c = small_config("e2e", "adc.feature_dim = 490");
    const RunReport r = run_experiment(c);
    REQUIRE(r.ok);
    CHECK(r.feature_dim == 490);
    CHECK(r.compression_ratio == doctest::Approx(784.0 / 490.0));
    CHECK(r.history.size() == 4);
    CHECK(r.test_accuracy > 0.5);  // ten orientation classes, chance is 0.1
    CHECK(r.metrics.compute_speed_macs == doctest::Approx(16.0 * 5 * 128e9));
    CHECK_FALSE(r.cache_hit);

    CHECK(std::filesystem::exists(c.out_dir / "runs.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "history.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "model_0.ckpt"));
    const std::string runs = slurp(c.out_dir / "runs.csv");
    CHECK(runs.rfind(std::string(kRunsHeader) + "\n", 0) == 0);
    CHECK(count_lines(runs) == 2);
    CHECK(count_lines(slurp(c.out_dir / "history.csv")) == 1 + 4);

    const Checkpoint ck = load_checkpoint(c.out_dir / "model_0.ckpt");
    CHECK(ck.params.dim == 490);

    // the reported ratio matches the features actually produced
    const FeatureSet fs = build_features(c, true);
    CHECK(fs.train.dim == r.feature_dim);
    CHECK(fs.train.rows == 400);
    CHECK(fs.test.rows == 200);
}

TEST_CASE("re-running with the same seed gives byte-identical rows; cache is reused") {
    const ExperimentConfig c = small_config("det");
    RunOptions no_cache;
    no_cache.use_cache = false;
    const RunReport a = run_experiment(c, no_cache);
    const std::string first = slurp(c.out_dir / "runs.csv");
    const std::string first_hist = slurp(c.out_dir / "history.csv");

    const RunReport b = run_experiment(c);
    CHECK_FALSE(b.cache_hit);
    const RunReport d = run_experiment(c);
    CHECK(d.cache_hit);
    CHECK(slurp(c.out_dir / "runs.csv") == first);
    CHECK(slurp(c.out_dir / "history.csv") == first_hist);
    CHECK(a.test_accuracy == d.test_accuracy);

    ExperimentConfig other = c;
    other.set_seed(2);
    other.out_dir = testing::scratch_dir("det_other");
    const RunReport e = run_experiment(other);
    CHECK_FALSE(e.cache_hit);
}

TEST_CASE("threads do not change the features") {
    ExperimentConfig c = small_config("threads");
    c.threads = 1;
    const FeatureSet one = build_features(c, false);
    c.threads = 3;
    const FeatureSet three = build_features(c, false);
    CHECK(one.train.values == three.train.values);
    CHECK(one.test.values == three.test.values);
    CHECK(one.full_scales == three.full_scales);
}

TEST_CASE("bypass mode feeds raw pixels") {
    const ExperimentConfig c = small_config("bypass", "oss.bypass = true");
    const RunReport r = run_experiment(c);
    REQUIRE(r.ok);
    CHECK(r.bypass);
    CHECK(r.feature_dim == 784);
    CHECK(r.compression_ratio == 1.0);
}

TEST_CASE("sweep: expansion order, row count, failures recorded") {
    const ExperimentConfig base = small_config("sweep");
    SweepGrid g;
    g.nodes = {2, 3};
    g.patch_edges = {3, 4};
    g.noise = {true, false};
    CHECK(g.size() == 8);
    const auto pts = g.expand(base);
    REQUIRE(pts.size() == 8);
    CHECK(pts[0].nodes == 2);
    CHECK(pts[0].patch_edge == 3);
    CHECK(pts[0].noise.shot_enabled);
    CHECK_FALSE(pts[1].noise.shot_enabled);
    CHECK(pts[2].patch_edge == 4);
    CHECK(pts[4].nodes == 3);

    SweepGrid zipped;
    zipped.cartesian = false;
    zipped.nodes = {2, 5};
    zipped.feature_dims = {196, 490};
    CHECK(zipped.size() == 2);
    const auto z = zipped.expand(base);
    CHECK(z[1].nodes == 5);
    CHECK(z[1].feature_dim() == 490);
    zipped.nodes = {2, 5, 10};
    CHECK_THROWS_AS(zipped.expand(base), ArgumentError);

    CHECK_THROWS_AS(SweepGrid{}.expand(base), ArgumentError);

    // n = 1 violates the pooling Nyquist constraint and must fail alone
    SweepGrid bad;
    bad.patch_edges = {1, 4};
    const auto reports = run_sweep(bad, base);
    REQUIRE(reports.size() == 2);
    CHECK_FALSE(reports[0].ok);
    CHECK(reports[0].message.find("oss.patch_edge") != std::string::npos);
    CHECK(reports[1].ok);
    const std::string runs = slurp(base.out_dir / "runs.csv");
    CHECK(count_lines(runs) == 3);
    CHECK(runs.find(",failed,") != std::string::npos);
}

TEST_CASE("single-point sweep equals run_experiment") {
    const ExperimentConfig base = small_config("single");
    SweepGrid g;
    g.nodes = {5};
    const auto reports = run_sweep(g, base);
    REQUIRE(reports.size() == 1);
    const std::string swept = slurp(base.out_dir / "runs.csv");

    ExperimentConfig direct = base;
    direct.out_dir = testing::scratch_dir("single_direct");
    run_experiment(direct);
    CHECK(slurp(direct.out_dir / "runs.csv") == swept);
}

TEST_CASE("sweep grid from config") {
    const ConfigFile cfg = ConfigFile::parse("[sweep]\nnodes = 2,3,5,10\nsr_fraction = 1, 0.5\nnoise = on, off\n");
    const SweepGrid g = SweepGrid::from_config(cfg);
    CHECK(g.size() == 16);
    CHECK(g.sr_fractions == std::vector<double>{1.0, 0.5});
    CHECK_THROWS_AS(SweepGrid::from_config(ConfigFile::parse("sweep.nodes = 2, x")), ConfigError);
    CHECK_THROWS_AS(SweepGrid::from_config(ConfigFile::parse("sweep.bogus = 1")), ConfigError);
}

TEST_CASE("missing dataset files are reported with the field") {
    ExperimentConfig c;
    c.train_images = "/nonexistent/a";
    c.out_dir = testing::scratch_dir("missing");
    RunOptions o;
    o.write_outputs = false;
    try {
        run_experiment(c, o);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "data.train_images");
    }
}

TEST_CASE("report writes figure and table data") {
    const auto dir = testing::scratch_dir("report");
    std::ostringstream os;
    write_report(dir, os);
    CHECK(std::filesystem::exists(dir / "comparison.csv"));
    CHECK(std::filesystem::exists(dir / "flops.csv"));
    CHECK(std::filesystem::exists(dir / "accuracy_vs_ratio.csv"));
    CHECK(os.str().find("19600") != std::string::npos);
}
