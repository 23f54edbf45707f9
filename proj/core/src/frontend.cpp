#include "oss/frontend.hpp"

#include <cmath>
#include <string>

#include "oss/errors.hpp"

namespace oss {

void FrontendConfig::validate() const {
    if (!(pixel_rate_hz > 0.0)) {
        throw ArgumentError("pixel_rate_hz must be > 0");
    }
    if (oversample < 2) {
        throw ArgumentError("oversample must be >= 2, got " + std::to_string(oversample));
    }
    if (!(peak_power_w > 0.0)) {
        throw ArgumentError("peak_power_w must be > 0");
    }
}

OpticalWaveform modulate(const PixelSequence& sequence, const FrontendConfig& config) {
    config.validate();
    const double peak_field = std::sqrt(config.peak_power_w);
    const auto os = static_cast<std::size_t>(config.oversample);

    OpticalWaveform out;
    out.sample_rate_hz = config.sample_rate_hz();
    out.samples.reserve(sequence.length() * os);
    for (double v : sequence.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ArgumentError("pixel value " + std::to_string(v) + " outside [0, 1]");
        }
        const double amp = config.amplitude_map == AmplitudeMap::field
                               ? peak_field * v
                               : peak_field * std::sqrt(v);
        out.samples.insert(out.samples.end(), os, std::complex<double>(amp, 0.0));
    }
    return out;
}

}  // namespace oss
