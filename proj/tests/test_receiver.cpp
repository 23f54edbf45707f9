#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oss/errors.hpp"
#include "oss/receiver.hpp"

using namespace oss;
using cd = std::complex<double>;

namespace {

NoiseParams noiseless() {
    NoiseParams p;
    p.shot_enabled = false;
    p.thermal_enabled = false;
    return p;
}

double variance(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(v.size() - 1);
}

// Least-squares fit of a cos(wk) + b sin(wk) + c; returns sqrt(a^2 + b^2).
double fitted_amplitude(const std::vector<double>& y, std::size_t from, double w) {
    double m[3][3] = {};
    double r[3] = {};
    for (std::size_t k = from; k < y.size(); ++k) {
        const double basis[3] = {std::cos(w * k), std::sin(w * k), 1.0};
        for (int i = 0; i < 3; ++i) {
            r[i] += basis[i] * y[k];
            for (int j = 0; j < 3; ++j) {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    // Gaussian elimination on the 3x3 normal equations.
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const double f = m[j][i] / m[i][i];
            for (int c = 0; c < 3; ++c) {
                m[j][c] -= f * m[i][c];
            }
            r[j] -= f * r[i];
        }
    }
    double x[3];
    for (int i = 2; i >= 0; --i) {
        x[i] = r[i];
        for (int c = i + 1; c < 3; ++c) {
            x[i] -= m[i][c] * x[c];
        }
        x[i] /= m[i][i];
    }
    return std::hypot(x[0], x[1]);
}

}  // namespace

TEST_CASE("photodetect: square law, non-negativity") {
    OpticalWaveform w{std::vector<cd>(8, cd(1.0, 0.0)), 256e9};
    const ElectricalWaveform i = photodetect(w, noiseless());
    for (double s : i.samples) {
        CHECK(s == doctest::Approx(1.0));
    }
    OpticalWaveform z{{cd(0.3, -0.4), cd(-1.0, 2.0), cd(0.0, 0.0)}, 256e9};
    NoiseParams p = noiseless();
    p.responsivity_a_per_w = 0.8;
    const ElectricalWaveform iz = photodetect(z, p);
    CHECK(iz.samples[0] == doctest::Approx(0.8 * 0.25));
    CHECK(iz.samples[1] == doctest::Approx(0.8 * 5.0));
    CHECK(iz.samples[2] == 0.0);
}

TEST_CASE("shot noise variance matches 2 q I B over 1e6 samples") {
    const double fs = 256e9;
    OpticalWaveform w{std::vector<cd>(1'000'000, cd(std::sqrt(1e-3), 0.0)), fs};
    NoiseParams p;
    p.thermal_enabled = false;
    p.seed = 2024;
    const ElectricalWaveform i = photodetect(w, p);
    const double expected = 2.0 * kElementaryCharge * 1e-3 * 128e9;
    CHECK(std::abs(variance(i.samples) / expected - 1.0) <= 0.05);
}

TEST_CASE("thermal noise variance matches 4 k T B / R") {
    const double fs = 256e9;
    OpticalWaveform w{std::vector<cd>(200'000, cd(0.0, 0.0)), fs};
    NoiseParams p;
    p.shot_enabled = false;
    const ElectricalWaveform i = photodetect(w, p);
    const double expected = 4.0 * kBoltzmann * 290.0 * 128e9 / 50.0;
    CHECK(std::abs(variance(i.samples) / expected - 1.0) <= 0.05);
}

TEST_CASE("noise is deterministic per seed and sub-seeds differ") {
    OpticalWaveform w{std::vector<cd>(1000, cd(0.01, 0.0)), 256e9};
    NoiseParams p;
    p.seed = 5;
    CHECK(photodetect(w, p).samples == photodetect(w, p).samples);
    NoiseParams q = p;
    q.seed = 6;
    CHECK(photodetect(w, p).samples != photodetect(w, q).samples);

    CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("pooling bandwidth and Nyquist rate") {
    CHECK(pooling_bandwidth_hz(4, 128e9) == doctest::Approx(8e9));
    CHECK(nyquist_sr(4, 128e9) == doctest::Approx(16e9));
    CHECK(nyquist_sr(2, 128e9) == doctest::Approx(64e9));
    CHECK(nyquist_sr(1, 128e9) == doctest::Approx(256e9));
    CHECK_THROWS_AS(nyquist_sr(0, 128e9), ArgumentError);
}

TEST_CASE("Butterworth low-pass: DC gain, cutoff attenuation, bilinear identity") {
    const double fs = 256e9;
    ElectricalWaveform dc{std::vector<double>(2000, 1.0), fs};
    const ElectricalWaveform y = butterworth_lpf(dc, 4, 128e9);
    CHECK(y.samples.back() == doctest::Approx(1.0).epsilon(1e-9));

    const double fc = pooling_bandwidth_hz(4, 128e9);
    const double w = 2.0 * std::numbers::pi * fc / fs;
    ElectricalWaveform tone{std::vector<double>(8192), fs};
    for (std::size_t k = 0; k < tone.size(); ++k) {
        tone.samples[k] = std::sin(w * static_cast<double>(k));
    }
    const ElectricalWaveform out = butterworth_lpf(tone, 4, 128e9);
    const double gain = fitted_amplitude(out.samples, 2048, w);
    CHECK(std::abs(gain / std::sqrt(0.5) - 1.0) <= 0.02);

    // |H|^2 = 1 / (1 + (tan(w/2) / tan(wc/2))^8) for the prewarped bilinear design
    const ButterworthLowpass lpf(4, fc, fs);
    for (double f : {1e9, 4e9, 8e9, 16e9, 40e9, 100e9}) {
        const double wf = 2.0 * std::numbers::pi * f / fs;
        const cd z = std::polar(1.0, -wf);
        cd h = 1.0;
        for (const auto& s : lpf.sections()) {
            h *= (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z);
        }
        const double ratio = std::tan(wf / 2) / std::tan(w / 2);
        CHECK(std::norm(h) == doctest::Approx(1.0 / (1.0 + std::pow(ratio, 8))).epsilon(1e-9));
    }
}

TEST_CASE("Butterworth rejects cutoff at or beyond Nyquist") {
    ElectricalWaveform x{std::vector<double>(10, 1.0), 128e9};
    CHECK_THROWS_AS(butterworth_lpf(x, 1, 128e9), ArgumentError);
    CHECK_THROWS_AS(ButterworthLowpass(3, 1e9, 10e9), ArgumentError);
    CHECK_NOTHROW(butterworth_lpf(x, 2, 128e9));
}

TEST_CASE("pooling: settled output per held segment equals its value within 2%") {
    const double pr = 128e9;
    const int os = 2;
    for (std::size_t n : {2, 3, 4, 5}) {
        CAPTURE(n);
        // Each patch occupies 2 n^2 pixels of the serialized stream.
        const std::size_t seg = 2 * n * n * os;
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> u(0.1, 1.0);
        std::vector<double> levels(12);
        for (double& v : levels) {
            v = u(rng);
        }
        ElectricalWaveform x{{}, pr * os};
        for (double v : levels) {
            // hold each level long enough for the 4th-order response to settle
            x.samples.insert(x.samples.end(), 4 * seg, v);
        }
        const ElectricalWaveform y = butterworth_lpf(x, n, pr);
        for (std::size_t s = 0; s < levels.size(); ++s) {
            const double settled = y.samples[(s + 1) * 4 * seg - 1];
            CHECK(std::abs(settled - levels[s]) <= 0.02 * levels[s]);
        }
    }
}

TEST_CASE("sampling grid and feature count") {
    const SamplingGrid g = sampling_grid(3136, 256e9, 16e9);
    CHECK(g.stride == 16);
    CHECK(g.offset == 8);
    CHECK(g.count == 196);
    const SamplingGrid h = sampling_grid(3136, 256e9, 8e9);
    CHECK(h.count == 98);
    CHECK(h.stride == 32);
    CHECK_THROWS_AS(sampling_grid(100, 1e9, 2e9), ArgumentError);
    CHECK_THROWS_AS(sampling_grid(100, 1e9, 0.0), ArgumentError);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 10 + rng() % 5000;
        const double fs = 256e9;
        const double sr = fs / (1.0 + static_cast<double>(rng() % 64));
        const SamplingGrid s = sampling_grid(len, fs, sr);
        REQUIRE(s.count == static_cast<std::size_t>(std::floor(len * sr / fs + 1e-9)));
        if (s.count > 0) {
            REQUIRE(s.offset + (s.count - 1) * s.stride < len);
        }
    }
}

TEST_CASE("quantizer endpoints and 1-bit ramp") {
    ElectricalWaveform top{std::vector<double>(64, 2.5e-3), 256e9};
    const FeatureStream a = sample_and_quantize(top, {16e9, 8, 2.5e-3});
    CHECK(a.size() == 4);
    for (double c : a.codes) {
        CHECK(c == 1.0);
    }
    ElectricalWaveform zero{std::vector<double>(64, 0.0), 256e9};
    for (double c : sample_and_quantize(zero, {16e9, 8, 1e-3}).codes) {
        CHECK(c == 0.0);
    }
    CHECK_THROWS_AS(sample_and_quantize(zero, {16e9, 8, std::nullopt}), ArgumentError);
    CHECK_THROWS_AS(sample_and_quantize(zero, {512e9, 8, 1.0}), ArgumentError);

    // exhaustive check of the two-level quantizer on a dense ramp
    const double fsc = 3.0;
    std::vector<double> ramp(10001);
    for (std::size_t k = 0; k < ramp.size(); ++k) {
        ramp[k] = fsc * static_cast<double>(k) / 10000.0;
    }
    const auto q = quantize(ramp, 1, fsc);
    for (std::size_t k = 0; k < ramp.size(); ++k) {
        REQUIRE(q[k] == (ramp[k] >= fsc / 2 ? 1.0 : 0.0));
    }
}

TEST_CASE("property: quantizer idempotence, grid membership, monotonicity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const int bits = 1 + static_cast<int>(rng() % 12);
        const double fsc = 0.1 + u(rng) + 0.5;
        std::vector<double> x(64);
        for (double& v : x) {
            v = u(rng) * fsc;
        }
        const auto q = quantize(x, bits, fsc);
        REQUIRE(quantize(q, bits, 1.0) == q);
        const double top = std::ldexp(1.0, bits) - 1.0;
        for (double c : q) {
            REQUIRE(c >= 0.0);
            REQUIRE(c <= 1.0);
            REQUIRE(std::abs(c * top - std::round(c * top)) < 1e-9);
        }

        // pointwise-larger optical input never yields a smaller code
        OpticalWaveform lo{std::vector<cd>(256), 256e9};
        OpticalWaveform hi = lo;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            const double a = std::abs(u(rng));
            lo.samples[k] = cd(a, 0.0);
            hi.samples[k] = cd(a + std::abs(u(rng)) * 0.1, 0.0);
        }
        const AdcConfig adc{32e9, bits, 1.0};
        const auto ql = sample_and_quantize(photodetect(lo, noiseless()), adc).codes;
        const auto qh = sample_and_quantize(photodetect(hi, noiseless()), adc).codes;
        for (std::size_t k = 0; k < ql.size(); ++k) {
            REQUIRE(qh[k] >= ql[k]);
        }
    }
}

TEST_CASE("percentile") {
    std::vector<double> v(1001);
    std::iota(v.begin(), v.end(), 0.0);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
    CHECK(percentile(v, 0.0) == 0.0);
    CHECK(percentile(v, 100.0) == 1000.0);
    CHECK(percentile(v, 99.9) == doctest::Approx(999.0));
    CHECK(percentile({1.0, 2.0}, 50.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(percentile({}, 50.0), ArgumentError);
}
