#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace oss {

inline constexpr std::size_t kClasses = 10;

using Probabilities = std::array<double, kClasses>;

/// Row-major sample matrix; each row is one flattened FeatureVector.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> values;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows_, std::size_t dim_) : rows(rows_), dim(dim_), values(rows_ * dim_) {}

    std::span<const float> row(std::size_t i) const { return std::span(values).subspan(i * dim, dim); }
    std::span<float> row(std::size_t i) { return std::span(values).subspan(i * dim, dim); }
};

/// Fully-connected layer dim -> 10. weights[i * 10 + c] connects feature i to class c.
struct FclParams {
    std::size_t dim = 0;
    std::vector<double> weights;
    std::array<double, kClasses> biases{};

    FclParams() = default;
    explicit FclParams(std::size_t dim_) : dim(dim_), weights(dim_ * kClasses, 0.0) {}

    bool operator==(const FclParams&) const = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 128;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;

    void validate() const;
};

struct AdamState {
    std::vector<double> m_w, v_w;
    std::array<double, kClasses> m_b{}, v_b{};
    std::uint64_t step = 0;

    explicit AdamState(std::size_t dim = 0) : m_w(dim * kClasses, 0.0), v_w(dim * kClasses, 0.0) {}
};

struct LossAndGrads {
    double loss = 0.0;
    FclParams grads;
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = -1.0;  ///< negative when no evaluation set was given
};

struct TrainResult {
    FclParams params;
    std::vector<EpochStats> history;
};

/// Glorot-uniform weights in +/- sqrt(6 / (dim + 10)), zero biases.
FclParams init_params(std::size_t dim, std::uint64_t seed);

/// softmax(W^T x + b), stabilized by subtracting the largest logit.
Probabilities forward(const FclParams& params, std::span<const float> x);
Probabilities softmax(const Probabilities& logits);

/// Mean cross-entropy over the selected rows and its analytic gradient.
LossAndGrads loss_and_grads(const FclParams& params, const FeatureMatrix& features,
                            std::span<const std::uint8_t> labels, std::span<const std::size_t> rows);

/// One bias-corrected Adam update in place.
void adam_step(FclParams& params, const FclParams& grads, AdamState& state, const TrainConfig& config);

/// Shuffled mini-batch training. If `test` is non-null its accuracy is
/// recorded after every epoch.
TrainResult train(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                  const TrainConfig& config, const FeatureMatrix* test = nullptr,
                  std::span<const std::uint8_t> test_labels = {});

/// Argmax prediction, ties resolved toward the lowest class index.
std::size_t predict(const FclParams& params, std::span<const float> x);

double evaluate(const FclParams& params, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels);

void save_checkpoint(const std::filesystem::path& path, const FclParams& params,
                     const TrainConfig& config);

struct Checkpoint {
    FclParams params;
    TrainConfig config;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace oss
