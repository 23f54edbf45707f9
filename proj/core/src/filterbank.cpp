#include "oss/filterbank.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oss/errors.hpp"

namespace oss {

using namespace std::complex_literals;

void FilterBankConfig::validate() const {
    if (nodes.empty()) {
        throw ArgumentError("filter bank has no nodes");
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (!(nodes[k].cutoff_hz > 0.0)) {
            throw ArgumentError("node " + std::to_string(k) + ": cutoff must be > 0");
        }
        if (nodes[k].order < 1) {
            throw ArgumentError("node " + std::to_string(k) + ": order must be >= 1");
        }
        if (k > 0 && !(nodes[k].center_hz > nodes[k - 1].center_hz)) {
            throw ArgumentError("node centres must be strictly increasing");
        }
    }
}

FilterBankConfig plan_filters(std::size_t node_count, double pixel_rate_hz, int order) {
    if (node_count == 0) {
        throw ArgumentError("plan_filters needs at least one node");
    }
    if (!(pixel_rate_hz > 0.0)) {
        throw ArgumentError("pixel rate must be > 0");
    }
    const double fc = pixel_rate_hz / (4.0 * static_cast<double>(node_count));
    FilterBankConfig plan;
    plan.nodes.reserve(node_count);
    for (std::size_t k = 1; k <= node_count; ++k) {
        plan.nodes.push_back({static_cast<double>(2 * k - 1) * fc, fc, order});
    }
    return plan;
}

std::complex<double> impulse_response(const FilterNodeConfig& node, double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return two_pi * node.cutoff_hz * std::exp(-two_pi * node.cutoff_hz * t) *
           std::exp(1i * (two_pi * node.center_hz * t));
}

std::complex<double> node_pole(const FilterNodeConfig& node, double sample_rate_hz) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return std::exp(std::complex<double>(-two_pi * node.cutoff_hz, two_pi * node.center_hz) /
                    sample_rate_hz);
}

void check_node(const FilterNodeConfig& node, double sample_rate_hz) {
    if (!(node.cutoff_hz > 0.0)) {
        throw ArgumentError("filter cutoff must be > 0");
    }
    if (node.order < 1) {
        throw ArgumentError("filter order must be >= 1");
    }
    if (std::abs(node.center_hz) + node.cutoff_hz > sample_rate_hz / 2.0 * (1.0 + 1e-12)) {
        throw ArgumentError("node at " + std::to_string(node.center_hz) + " Hz +/- " +
                            std::to_string(node.cutoff_hz) + " Hz exceeds Nyquist " +
                            std::to_string(sample_rate_hz / 2.0) + " Hz");
    }
}

OpticalWaveform apply_node(const OpticalWaveform& waveform, const FilterNodeConfig& node) {
    check_node(node, waveform.sample_rate_hz);
    const std::complex<double> p = node_pole(node, waveform.sample_rate_hz);
    const double gain = 1.0 - std::abs(p);

    OpticalWaveform out = waveform;
    for (int stage = 0; stage < node.order; ++stage) {
        std::complex<double> state = 0.0;
        for (auto& s : out.samples) {
            state = gain * s + p * state;
            s = state;
        }
    }
    return out;
}

std::complex<double> frequency_response(const FilterNodeConfig& node, double f_hz,
                                        double sample_rate_hz) {
    const std::complex<double> p = node_pole(node, sample_rate_hz);
    const double w = 2.0 * std::numbers::pi * f_hz / sample_rate_hz;
    const std::complex<double> stage = (1.0 - std::abs(p)) / (1.0 - p * std::exp(-1i * w));
    return std::pow(stage, node.order);
}

}  // namespace oss
