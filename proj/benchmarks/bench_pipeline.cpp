#include <benchmark/benchmark.h>

#include <random>

#include "oss/classifier.hpp"
#include "oss/dataset.hpp"
#include "oss/experiment.hpp"
#include "oss/filterbank.hpp"
#include "oss/pipeline.hpp"
#include "oss/receiver.hpp"

namespace {

oss::OpticalWaveform random_light(std::size_t len) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    oss::OpticalWaveform w{std::vector<std::complex<double>>(len), 256e9};
    for (auto& s : w.samples) {
        s = {g(rng), g(rng)};
    }
    return w;
}

void BM_ApplyNode(benchmark::State& state) {
    const auto x = random_light(static_cast<std::size_t>(state.range(0)));
    const oss::FilterNodeConfig node = oss::plan_filters(10, 128e9).nodes[3];
    for (auto _ : state) {
        benchmark::DoNotOptimize(oss::apply_node(x, node));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyNode)->Arg(3136)->Arg(1 << 16);

void BM_Butterworth(benchmark::State& state) {
    oss::ElectricalWaveform x{std::vector<double>(static_cast<std::size_t>(state.range(0)), 1e-3), 256e9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(oss::butterworth_lpf(x, 4, 128e9));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Butterworth)->Arg(3136)->Arg(1 << 16);

void BM_ExtractImage(benchmark::State& state) {
    oss::ExperimentConfig cfg;
    cfg.nodes = static_cast<std::size_t>(state.range(0));
    cfg.full_scale = 1e-3;
    const oss::FeatureExtractor fx(cfg);
    std::vector<std::uint8_t> pixels(784);
    std::mt19937 rng(2);
    for (auto& p : pixels) {
        p = static_cast<std::uint8_t>(rng());
    }
    const oss::ImageView img{pixels, 28, 28};
    std::vector<float> out(fx.feature_dim());
    std::uint64_t idx = 0;
    for (auto _ : state) {
        fx.extract(img, idx++, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ExtractImage)->Arg(2)->Arg(10);

void BM_TrainEpoch(benchmark::State& state) {
    const std::size_t rows = 2000;
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    oss::FeatureMatrix x(rows, dim);
    std::vector<std::uint8_t> y(rows);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(0.0F, 1.0F);
    for (auto& v : x.values) {
        v = u(rng);
    }
    for (std::size_t i = 0; i < rows; ++i) {
        y[i] = static_cast<std::uint8_t>(i % 10);
    }
    oss::TrainConfig cfg;
    cfg.epochs = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(oss::train(x, y, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_TrainEpoch)->Arg(196)->Arg(980);

}  // namespace

BENCHMARK_MAIN();
