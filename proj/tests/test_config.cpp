#include <string>

#include "doctest.h"
#include "oss/config.hpp"
#include "oss/errors.hpp"
#include "oss/experiment.hpp"

using namespace oss;

TEST_CASE("grammar: sections, comments, dotted keys, trimming") {
    const ConfigFile c = ConfigFile::parse(R"(
# leading comment
top = 1
[oss]
nodes = 5   # inline comment
patch_edge=3
[ adc ]
sr_fraction = 0.5
frontend.oversample = 4
)");
    CHECK(c.get_int("top", 0) == 1);
    CHECK(c.get_int("oss.nodes", 0) == 5);
    CHECK(c.get_int("oss.patch_edge", 0) == 3);
    CHECK(c.get_double("adc.sr_fraction", 0.0) == 0.5);
    CHECK(c.get_int("adc.frontend.oversample", 0) == 4);
    CHECK(c.get_int("missing", 7) == 7);
    CHECK(c.entries().size() == 5);
}

TEST_CASE("typed getters") {
    const ConfigFile c = ConfigFile::parse("a = yes\nb = off\nc = 1e-3\nd = 4, 5 ,6\ne = -12\nf = x");
    CHECK(c.get_bool("a", false));
    CHECK_FALSE(c.get_bool("b", true));
    CHECK(c.get_double("c", 0.0) == 1e-3);
    CHECK(c.get_list("d") == std::vector<std::string>{"4", "5", "6"});
    CHECK(c.get_int("e", 0) == -12);
    CHECK_THROWS_AS(c.get_int("f", 0), ConfigError);
    CHECK_THROWS_AS(c.get_double("f", 0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("f", false), ConfigError);
    CHECK_THROWS_AS(c.get_int("c", 0), ConfigError);
}

TEST_CASE("syntax errors name the line") {
    try {
        (void)ConfigFile::parse("a = 1\nnot a pair\n", "x.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "x.cfg:2");
    }
    CHECK_THROWS_AS(ConfigFile::parse("a = 1\na = 2"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse("[sec\na = 1"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse("bad key = 1"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse("= 1"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::load("/nonexistent/oss.cfg"), ConfigError);
}

TEST_CASE("unused key tracking") {
    const ConfigFile c = ConfigFile::parse("a = 1\nb = 2");
    (void)c.get_int("a", 0);
    CHECK(c.unused_keys() == std::vector<std::string>{"b"});
}

TEST_CASE("split_list and trim") {
    CHECK(split_list(" a, b,,c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_list("1e9,2e9; 3e9,4e9", ';').size() == 2);
    CHECK(split_list("").empty());
    CHECK(trim("  \tx y \n") == "x y");
}

TEST_CASE("experiment config: defaults and derived quantities") {
    const ExperimentConfig c = ExperimentConfig::from_config(ConfigFile::parse(""));
    CHECK(c.nodes == 10);
    CHECK(c.patch_edge == 4);
    CHECK(c.sequence_samples() == 3136);
    CHECK(c.adc_rate_hz() == doctest::Approx(16e9));
    CHECK(c.features_per_node() == 196);
    CHECK(c.feature_dim() == 1960);
    CHECK(compression_ratio(c) == doctest::Approx(0.4));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("experiment config: rate modes") {
    auto fd = ExperimentConfig::from_config(ConfigFile::parse("adc.feature_dim = 980"));
    CHECK(fd.rate_mode == RateMode::feature_dim);
    CHECK(fd.feature_dim() == 980);
    CHECK(fd.adc_rate_hz() == doctest::Approx(8e9));
    CHECK(compression_ratio(fd) == doctest::Approx(0.8));

    auto f392 = ExperimentConfig::from_config(ConfigFile::parse("adc.feature_dim = 392\noss.nodes = 10"));
    CHECK(f392.feature_dim() == 390);  // 39 per node
    auto f196 = ExperimentConfig::from_config(ConfigFile::parse("adc.feature_dim = 196\noss.nodes = 2"));
    CHECK(f196.feature_dim() == 196);
    CHECK(compression_ratio(f196) == doctest::Approx(4.0));

    auto abs = ExperimentConfig::from_config(ConfigFile::parse("adc.sr_hz = 4e9"));
    CHECK(abs.features_per_node() == 49);

    auto half = ExperimentConfig::from_config(ConfigFile::parse("adc.sr_fraction = 0.5\noss.nodes = 5"));
    CHECK(half.feature_dim() == 490);

    CHECK_THROWS_AS(ExperimentConfig::from_config(ConfigFile::parse("adc.sr_hz = 1e9\nadc.feature_dim = 9")),
                    ConfigError);
}

TEST_CASE("experiment config: compression ratio examples") {
    CHECK(compression_ratio(784, 196) == 4.0);
    CHECK(compression_ratio(784, 784) == 1.0);
    CHECK(compression_ratio(784, 980) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(compression_ratio(784, 0), ArgumentError);
    auto bypass = ExperimentConfig::from_config(ConfigFile::parse("oss.bypass = true"));
    CHECK(bypass.feature_dim() == 784);
    CHECK(compression_ratio(bypass) == 1.0);
}

TEST_CASE("experiment config: errors name the offending field") {
    auto field_of = [](const std::string& text) -> std::string {
        try {
            ExperimentConfig::from_config(ConfigFile::parse(text)).validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return "";
    };
    CHECK(field_of("oss.nodez = 3") == "oss.nodez");
    CHECK(field_of("frontend.amplitude_map = cubic") == "frontend.amplitude_map");
    CHECK(field_of("adc.bits = 0") == "adc.bits");
    CHECK(field_of("adc.sr_fraction = 100") == "adc.sr_fraction");
    CHECK(field_of("adc.sr_fraction = 0.001") == "adc.sr_fraction");
    CHECK(field_of("oss.patch_edge = 1\nfrontend.oversample = 2") == "oss.patch_edge");
    CHECK(field_of("frontend.oversample = 1") == "frontend");
    CHECK(field_of("oss.nodes = 0") == "oss.nodes");
    CHECK(field_of("filterbank.plan = 1e9, 2e9; 3e9, 1e9\noss.nodes = 3") == "oss.nodes");
    CHECK(field_of("filterbank.plan = 1e9") == "filterbank.plan");
    CHECK(field_of("filterbank.plan = 200e9, 10e9") == "filterbank.plan");
    CHECK(field_of("sweep.nodes = 2,3") == "");

    ExperimentConfig c;
    c.train_images = "/nonexistent/train";
    try {
        c.validate_files();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.field()).rfind("data.", 0) == 0);
    }
}

TEST_CASE("explicit filter plan overrides the node count") {
    auto c = ExperimentConfig::from_config(ConfigFile::parse("filterbank.plan = 9.6e9, 3.2e9; 28.8e9, 3.2e9, 2"));
    CHECK(c.nodes == 2);
    const FilterBankConfig plan = c.filter_plan();
    CHECK(plan.nodes[1].center_hz == 28.8e9);
    CHECK(plan.nodes[1].order == 2);
    CHECK(plan.nodes[0].order == 1);
}

TEST_CASE("feature key text ignores training-only fields") {
    ExperimentConfig a;
    ExperimentConfig b = a;
    b.train.epochs = 3;
    b.train.learning_rate = 0.5;
    b.out_dir = "elsewhere";
    CHECK(a.feature_key_text() == b.feature_key_text());
    b.nodes = 5;
    CHECK(a.feature_key_text() != b.feature_key_text());
    ExperimentConfig s = a;
    s.set_seed(9);
    CHECK(a.feature_key_text() != s.feature_key_text());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
