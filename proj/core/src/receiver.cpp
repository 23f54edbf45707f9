#include "oss/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "oss/errors.hpp"

namespace oss {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

void NoiseParams::validate() const {
    if (!(responsivity_a_per_w > 0.0)) {
        throw ArgumentError("responsivity must be > 0");
    }
    if (!(temperature_k >= 0.0)) {
        throw ArgumentError("temperature must be >= 0");
    }
    if (!(load_ohms > 0.0)) {
        throw ArgumentError("load resistance must be > 0");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t image, std::uint64_t node) {
    return splitmix64(splitmix64(splitmix64(seed) ^ image) ^ (node + 0x5851F42D4C957F2DULL));
}

ElectricalWaveform photodetect(const OpticalWaveform& waveform, const NoiseParams& noise) {
    noise.validate();
    const double r = noise.responsivity_a_per_w;
    const double bandwidth = waveform.sample_rate_hz / 2.0;

    ElectricalWaveform out;
    out.sample_rate_hz = waveform.sample_rate_hz;
    out.samples.resize(waveform.size());
    for (std::size_t k = 0; k < waveform.size(); ++k) {
        out.samples[k] = r * std::norm(waveform.samples[k]);
    }
    if (!noise.shot_enabled && !noise.thermal_enabled) {
        return out;
    }

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double thermal_var = noise.thermal_enabled
                                   ? 4.0 * kBoltzmann * noise.temperature_k * bandwidth / noise.load_ohms
                                   : 0.0;
    for (double& i : out.samples) {
        double var = thermal_var;
        if (noise.shot_enabled) {
            var += 2.0 * kElementaryCharge * i * bandwidth;
        }
        i += std::sqrt(var) * gauss(rng);
    }
    return out;
}

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz) {
    if (order < 2 || order % 2 != 0) {
        throw ArgumentError("Butterworth order must be even and >= 2");
    }
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0) {
        throw ArgumentError("Butterworth cutoff " + std::to_string(cutoff_hz) +
                            " Hz must lie in (0, " + std::to_string(sample_rate_hz / 2.0) + ") Hz");
    }
    const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    const double k2 = k * k;
    for (int s = 1; s <= order / 2; ++s) {
        // Conjugate analog pole pair at angle pi (2s - 1) / (2 order) from the imaginary axis.
        const double q = 1.0 / (2.0 * std::cos(std::numbers::pi * (2 * s - 1) / (2.0 * order)));
        const double norm = 1.0 / (1.0 + k / q + k2);
        Section sec{};
        sec.b0 = k2 * norm;
        sec.b1 = 2.0 * sec.b0;
        sec.b2 = sec.b0;
        sec.a1 = 2.0 * (k2 - 1.0) * norm;
        sec.a2 = (1.0 - k / q + k2) * norm;
        sections_.push_back(sec);
    }
}

std::vector<double> ButterworthLowpass::process(std::span<const double> input) const {
    std::vector<double> y(input.begin(), input.end());
    for (const Section& s : sections_) {
        // transposed direct form II
        double z1 = 0.0;
        double z2 = 0.0;
        for (double& v : y) {
            const double x = v;
            const double out = s.b0 * x + z1;
            z1 = s.b1 * x - s.a1 * out + z2;
            z2 = s.b2 * x - s.a2 * out;
            v = out;
        }
    }
    return y;
}

double pooling_bandwidth_hz(std::size_t n, double pixel_rate_hz) {
    if (n == 0) {
        throw ArgumentError("patch edge must be >= 1");
    }
    return pixel_rate_hz / static_cast<double>(n * n);
}

ElectricalWaveform butterworth_lpf(const ElectricalWaveform& waveform, std::size_t n,
                                   double pixel_rate_hz) {
    const ButterworthLowpass lpf(4, pooling_bandwidth_hz(n, pixel_rate_hz), waveform.sample_rate_hz);
    return {lpf.process(waveform.samples), waveform.sample_rate_hz};
}

double nyquist_sr(std::size_t n, double pixel_rate_hz) {
    return 2.0 * pooling_bandwidth_hz(n, pixel_rate_hz);
}

SamplingGrid sampling_grid(std::size_t length, double waveform_rate_hz, double adc_rate_hz) {
    if (!(adc_rate_hz > 0.0)) {
        throw ArgumentError("ADC rate must be > 0");
    }
    if (adc_rate_hz > waveform_rate_hz * (1.0 + 1e-12)) {
        throw ArgumentError("ADC rate " + std::to_string(adc_rate_hz) +
                            " Hz exceeds the electrical sample rate " +
                            std::to_string(waveform_rate_hz) + " Hz");
    }
    // The epsilon absorbs rounding when SR was itself solved from a count.
    constexpr double eps = 1e-9;
    SamplingGrid g;
    g.stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(waveform_rate_hz / adc_rate_hz + eps)));
    g.offset = g.stride / 2;
    g.count = static_cast<std::size_t>(
        std::floor(static_cast<double>(length) * adc_rate_hz / waveform_rate_hz + eps));
    return g;
}

std::vector<double> sample(const ElectricalWaveform& waveform, double adc_rate_hz) {
    const SamplingGrid g = sampling_grid(waveform.size(), waveform.sample_rate_hz, adc_rate_hz);
    std::vector<double> out(g.count);
    for (std::size_t k = 0; k < g.count; ++k) {
        out[k] = waveform.samples[g.offset + k * g.stride];
    }
    return out;
}

std::vector<double> quantize(std::span<const double> values, int bits, double full_scale) {
    if (bits < 1 || bits > 24) {
        throw ArgumentError("ADC bits must lie in [1, 24]");
    }
    if (!(full_scale > 0.0)) {
        throw ArgumentError("ADC full scale must be > 0");
    }
    const double top = std::ldexp(1.0, bits) - 1.0;
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double x = std::clamp(values[k], 0.0, full_scale) / full_scale;
        out[k] = std::round(x * top) / top;
    }
    return out;
}

FeatureStream sample_and_quantize(const ElectricalWaveform& waveform, const AdcConfig& adc) {
    if (!adc.full_scale) {
        throw ArgumentError("ADC full scale is 'auto' but has not been calibrated");
    }
    const std::vector<double> taps = sample(waveform, adc.sample_rate_hz);
    return {quantize(taps, adc.bits, *adc.full_scale), adc.bits};
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw ArgumentError("percentile of an empty set");
    }
    if (!(q >= 0.0 && q <= 100.0)) {
        throw ArgumentError("percentile rank must lie in [0, 100]");
    }
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double vlo = values[lo];
    double vhi = vlo;
    if (hi != lo) {
        vhi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    }
    return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

}  // namespace oss
