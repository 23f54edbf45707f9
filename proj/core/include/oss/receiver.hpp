#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oss/frontend.hpp"

namespace oss {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kBoltzmann = 1.380649e-23;            // J/K

struct NoiseParams {
    double responsivity_a_per_w = 1.0;
    double temperature_k = 290.0;
    double load_ohms = 50.0;
    bool shot_enabled = true;
    bool thermal_enabled = true;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Photocurrent in amperes.
struct ElectricalWaveform {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

struct AdcConfig {
    double sample_rate_hz = 0.0;
    int bits = 8;
    /// Quantizer range in amperes; empty means "auto" (calibrated elsewhere).
    std::optional<double> full_scale;
};

/// ADC output: quantized levels rescaled to [0, 1].
struct FeatureStream {
    std::vector<double> codes;
    int bits = 8;

    std::size_t size() const { return codes.size(); }
};

/// Independent sub-seed for (image, node) so per-image work can run in any order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t image, std::uint64_t node);

/// Square-law detection i = R |E|^2 with optional white Gaussian shot and
/// thermal noise over the simulation bandwidth fs / 2.
ElectricalWaveform photodetect(const OpticalWaveform& waveform, const NoiseParams& noise);

/// Cascade of second-order sections realizing an even-order Butterworth
/// low-pass, designed by the bilinear transform with cutoff prewarping.
class ButterworthLowpass {
public:
    ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz);

    /// Filters from zero initial state.
    std::vector<double> process(std::span<const double> input) const;

    struct Section {
        double b0, b1, b2, a1, a2;
    };
    std::span<const Section> sections() const { return sections_; }

private:
    std::vector<Section> sections_;
};

/// Pooling bandwidth PR / n^2 of the photodiode stage.
double pooling_bandwidth_hz(std::size_t n, double pixel_rate_hz);

/// Fourth-order Butterworth low-pass at PR / n^2. Throws ArgumentError when the
/// cutoff reaches the Nyquist frequency.
ElectricalWaveform butterworth_lpf(const ElectricalWaveform& waveform, std::size_t n,
                                   double pixel_rate_hz);

/// Nyquist ADC rate 2 PR / n^2 for the pooled photocurrent.
double nyquist_sr(std::size_t n, double pixel_rate_hz);

/// Decimation pattern of the ADC over a waveform of `length` samples.
struct SamplingGrid {
    std::size_t stride = 0;
    std::size_t offset = 0;
    std::size_t count = 0;
};

/// stride = floor(fs / SR), count = floor(length * SR / fs), first sample at
/// the centre of the first interval. Throws ArgumentError when SR > fs.
SamplingGrid sampling_grid(std::size_t length, double waveform_rate_hz, double adc_rate_hz);

/// Decimates without quantizing (used for full-scale calibration).
std::vector<double> sample(const ElectricalWaveform& waveform, double adc_rate_hz);

/// Clips to [0, full_scale] and rounds onto 2^bits uniform levels.
std::vector<double> quantize(std::span<const double> values, int bits, double full_scale);

/// Decimate then quantize. Requires a resolved full_scale.
FeatureStream sample_and_quantize(const ElectricalWaveform& waveform, const AdcConfig& adc);

/// Percentile q in [0, 100] by linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

}  // namespace oss
