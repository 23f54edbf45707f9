#pragma once

#include <complex>
#include <vector>

#include "oss/dataset.hpp"

namespace oss {

/// How a pixel value maps onto the optical carrier.
enum class AmplitudeMap {
    field,  ///< field amplitude proportional to v, detected power ~ v^2
    power,  ///< optical power proportional to v
};

struct FrontendConfig {
    double pixel_rate_hz = 128e9;
    int oversample = 2;
    double peak_power_w = 10e-3;
    AmplitudeMap amplitude_map = AmplitudeMap::field;

    double sample_rate_hz() const { return pixel_rate_hz * oversample; }
    /// Throws ArgumentError when any invariant is violated.
    void validate() const;
};

/// Complex baseband field envelope in sqrt(W).
struct OpticalWaveform {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

/// Ideal NRZ Mach-Zehnder amplitude modulation: every pixel is held for
/// `oversample` samples with zero phase.
OpticalWaveform modulate(const PixelSequence& sequence, const FrontendConfig& config);

}  // namespace oss
