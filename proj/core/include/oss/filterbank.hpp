#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "oss/frontend.hpp"

namespace oss {

/// One spectrum-slicing node: a first-order (or cascaded) complex bandpass.
struct FilterNodeConfig {
    double center_hz = 0.0;  ///< detuning of the passband centre from the carrier
    double cutoff_hz = 0.0;  ///< one-sided cutoff
    int order = 1;
};

struct FilterBankConfig {
    std::vector<FilterNodeConfig> nodes;

    std::size_t size() const { return nodes.size(); }
    /// Checks per-node invariants and strictly increasing centres.
    void validate() const;
};

/// Tiles [0, PR/2] with N equal passbands: f_c = PR / (4N), f_m,k = (2k - 1) f_c.
FilterBankConfig plan_filters(std::size_t node_count, double pixel_rate_hz, int order = 1);

/// Continuous-time first-order kernel 2 pi f_c exp(-2 pi f_c t) exp(j 2 pi f_m t),
/// zero for t <= 0.
std::complex<double> impulse_response(const FilterNodeConfig& node, double t);

/// Discrete pole exp((-2 pi f_c + j 2 pi f_m) / fs).
std::complex<double> node_pole(const FilterNodeConfig& node, double sample_rate_hz);

/// Throws ArgumentError unless center + cutoff <= fs / 2 and cutoff > 0, order >= 1.
void check_node(const FilterNodeConfig& node, double sample_rate_hz);

/// Runs `order` cascaded one-pole stages y[k] = (1 - |p|) x[k] + p y[k-1]
/// from zero state. Each stage has unit gain at the centre frequency.
OpticalWaveform apply_node(const OpticalWaveform& waveform, const FilterNodeConfig& node);

/// [(1 - |p|) / (1 - p e^{-j 2 pi f / fs})]^order
std::complex<double> frequency_response(const FilterNodeConfig& node, double f_hz,
                                        double sample_rate_hz);

}  // namespace oss
