#include "oss/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "oss/errors.hpp"

namespace oss {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw ArgumentError("learning_rate must be > 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ArgumentError("Adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw ArgumentError("epsilon must be > 0");
    }
    if (batch_size < 1) {
        throw ArgumentError("batch_size must be >= 1");
    }
}

FclParams init_params(std::size_t dim, std::uint64_t seed) {
    FclParams p(dim);
    std::mt19937_64 rng(seed);
    const double limit = std::sqrt(6.0 / static_cast<double>(dim + kClasses));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : p.weights) {
        w = u(rng);
    }
    return p;
}

Probabilities softmax(const Probabilities& logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    Probabilities p;
    double sum = 0.0;
    for (std::size_t c = 0; c < kClasses; ++c) {
        p[c] = std::exp(logits[c] - top);
        sum += p[c];
    }
    for (double& v : p) {
        v /= sum;
    }
    return p;
}

namespace {

Probabilities logits_of(const FclParams& params, std::span<const float> x) {
    Probabilities z = params.biases;
    const double* w = params.weights.data();
    for (std::size_t i = 0; i < params.dim; ++i) {
        const double xi = x[i];
        if (xi == 0.0) {
            continue;
        }
        const double* wi = w + i * kClasses;
        for (std::size_t c = 0; c < kClasses; ++c) {
            z[c] += wi[c] * xi;
        }
    }
    return z;
}

void check_dim(const FclParams& params, std::size_t dim) {
    if (params.dim != dim || params.weights.size() != dim * kClasses) {
        throw ArgumentError("feature dimension " + std::to_string(dim) +
                            " does not match layer dimension " + std::to_string(params.dim));
    }
}

}  // namespace

Probabilities forward(const FclParams& params, std::span<const float> x) {
    check_dim(params, x.size());
    return softmax(logits_of(params, x));
}

LossAndGrads loss_and_grads(const FclParams& params, const FeatureMatrix& features,
                            std::span<const std::uint8_t> labels, std::span<const std::size_t> rows) {
    check_dim(params, features.dim);
    if (rows.empty()) {
        throw ArgumentError("loss_and_grads needs a nonempty batch");
    }
    LossAndGrads out{0.0, FclParams(params.dim)};
    double* gw = out.grads.weights.data();
    for (std::size_t r : rows) {
        const auto x = features.row(r);
        Probabilities delta = softmax(logits_of(params, x));
        const std::size_t y = labels[r];
        out.loss -= std::log(std::max(delta[y], 1e-300));
        delta[y] -= 1.0;
        for (std::size_t c = 0; c < kClasses; ++c) {
            out.grads.biases[c] += delta[c];
        }
        for (std::size_t i = 0; i < params.dim; ++i) {
            const double xi = x[i];
            if (xi == 0.0) {
                continue;
            }
            double* gi = gw + i * kClasses;
            for (std::size_t c = 0; c < kClasses; ++c) {
                gi[c] += xi * delta[c];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    out.loss *= inv;
    for (double& g : out.grads.weights) {
        g *= inv;
    }
    for (double& g : out.grads.biases) {
        g *= inv;
    }
    return out;
}

void adam_step(FclParams& params, const FclParams& grads, AdamState& state, const TrainConfig& config) {
    if (grads.dim != params.dim || state.m_w.size() != params.weights.size()) {
        throw ArgumentError("Adam state/gradient shape does not match parameters");
    }
    ++state.step;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    const double lr = config.learning_rate;
    const double eps = config.epsilon;

    auto update = [&](double& p, double g, double& m, double& v) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        p -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    };
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        update(params.weights[k], grads.weights[k], state.m_w[k], state.v_w[k]);
    }
    for (std::size_t c = 0; c < kClasses; ++c) {
        update(params.biases[c], grads.biases[c], state.m_b[c], state.v_b[c]);
    }
}

std::size_t predict(const FclParams& params, std::span<const float> x) {
    check_dim(params, x.size());
    const Probabilities z = logits_of(params, x);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

double evaluate(const FclParams& params, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels) {
    if (features.rows == 0) {
        throw ArgumentError("cannot evaluate on an empty set");
    }
    if (labels.size() != features.rows) {
        throw ArgumentError("label count does not match feature rows");
    }
    std::size_t correct = 0;
    for (std::size_t r = 0; r < features.rows; ++r) {
        correct += predict(params, features.row(r)) == labels[r] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(features.rows);
}

TrainResult train(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                  const TrainConfig& config, const FeatureMatrix* test,
                  std::span<const std::uint8_t> test_labels) {
    config.validate();
    if (features.rows == 0) {
        throw ArgumentError("cannot train on an empty dataset");
    }
    if (labels.size() != features.rows) {
        throw ArgumentError("label count does not match feature rows");
    }

    TrainResult result{init_params(features.dim, config.seed), {}};
    AdamState state(features.dim);
    std::mt19937_64 rng(config.seed ^ 0xA5A5A5A5DEADBEEFULL);
    std::vector<std::size_t> order(features.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            LossAndGrads lg = loss_and_grads(result.params, features, labels, batch);
            loss_sum += lg.loss * static_cast<double>(batch.size());
            adam_step(result.params, lg.grads, state, config);
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(features.rows);
        stats.train_accuracy = evaluate(result.params, features, labels);
        if (test != nullptr) {
            stats.test_accuracy = evaluate(result.params, *test, test_labels);
        }
        result.history.push_back(stats);
    }
    return result;
}

namespace {

constexpr char kCheckpointMagic[8] = {'O', 'S', 'S', 'F', 'C', 'L', '0', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) {
        throw LengthError("checkpoint truncated");
    }
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const FclParams& params,
                     const TrainConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.dim));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(kClasses));
    for (double w : params.weights) {
        put(out, w);
    }
    for (double b : params.biases) {
        put(out, b);
    }
    put(out, config.learning_rate);
    put(out, config.beta1);
    put(out, config.beta2);
    put(out, config.epsilon);
    put<std::uint64_t>(out, config.batch_size);
    put<std::uint64_t>(out, config.epochs);
    put<std::uint64_t>(out, config.seed);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw FormatError("not an FCL checkpoint: " + path.string());
    }
    const auto dim = get<std::uint32_t>(in);
    const auto classes = get<std::uint32_t>(in);
    if (classes != kClasses) {
        throw FormatError("checkpoint has " + std::to_string(classes) + " classes");
    }
    Checkpoint ck;
    ck.params = FclParams(dim);
    for (double& w : ck.params.weights) {
        w = get<double>(in);
    }
    for (double& b : ck.params.biases) {
        b = get<double>(in);
    }
    ck.config.learning_rate = get<double>(in);
    ck.config.beta1 = get<double>(in);
    ck.config.beta2 = get<double>(in);
    ck.config.epsilon = get<double>(in);
    ck.config.batch_size = get<std::uint64_t>(in);
    ck.config.epochs = get<std::uint64_t>(in);
    ck.config.seed = get<std::uint64_t>(in);
    return ck;
}

}  // namespace oss
