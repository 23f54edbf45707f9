#pragma once

#include <string>
#include <vector>

namespace oss {

inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s

struct HardwareSpec {
    int wavelengths = 1;
    int patch_edge = 4;
    int nodes = 10;
    double pixel_rate_hz = 128e9;
    double ring_radius_m = 108e-6;
    double node_spacing_m = 10e-6;

    void validate() const;
};

struct PowerModelParams {
    double photon_energy_j = 0.0;  ///< h nu; see photon_energy()
    int bit_precision = 5;
    double pd_capacitance_f = 0.2e-15;
    double pd_voltage_v = 1.0;
    double mod_energy_j_per_bit = 1e-12;
    double adc_energy_j_per_bit = 2e-12;
    double eta_laser = 0.1;
    double eta_mrr = 0.45;
    double eta_pd = 0.1;

    double eta() const { return eta_laser * eta_mrr * eta_pd; }
    void validate() const;
};

double photon_energy(double wavelength_m);

/// Reference-configuration defaults with h nu taken at 1550 nm.
PowerModelParams default_power_params();

/// W * n^2 * N * PR, in MAC/s.
double compute_speed(const HardwareSpec& spec);

/// (4.4 R) * N * (4.4 R + dh), in m^2.
double footprint(const HardwareSpec& spec);

struct PowerBreakdown {
    double receiver_w = 0.0;
    double modulator_w = 0.0;
    double adc_w = 0.0;
    double total_w = 0.0;
    /// True when 2^(2 N_b + 1) wins the max() over C_d V_r / e.
    bool quantization_branch = true;
    double photons_per_sample = 0.0;
};

/// P = W [ N h nu max(2^(2N_b+1), C_d V_r / e) PR / (n^2 eta)
///        + E_mod N_b PR + N E_ADC N_b PR / n^2 ]
/// Per-node receiver and ADC terms, one shared modulator. Throws
/// ArgumentError when eta is zero.
PowerBreakdown power(const HardwareSpec& spec, const PowerModelParams& pm);

struct MetricsReport {
    double compute_speed_macs = 0.0;
    double compute_speed_ops = 0.0;
    double footprint_m2 = 0.0;
    double power_w = 0.0;
    double efficiency_tops_per_w = 0.0;
    double density_tops_per_mm2 = 0.0;
    PowerBreakdown breakdown;
};

/// Efficiency and density from speed, power and footprint (OPS = 2 MAC).
MetricsReport derived_figures(double macs_per_s, const PowerBreakdown& power, double footprint_m2);

MetricsReport evaluate_metrics(const HardwareSpec& spec, const PowerModelParams& pm);

/// Literal comparison rows (not modeled).
struct ReferenceSystem {
    std::string scheme;
    double clock_ghz;
    std::string mnist_accuracy;
    double efficiency_tops_per_w;  ///< negative when not reported
    double density_tops_per_mm2;   ///< negative when not reported
};
const std::vector<ReferenceSystem>& reference_systems();

inline constexpr double kReportedOssEfficiency = 28.38;
inline constexpr double kReportedOssDensity = 17.65;
inline constexpr double kReportedOssPowerW = 1.42;
inline constexpr double kReportedFootprintMm2 = 2.32;
inline constexpr double kReportedMinNodePowerW = 100e-6;

}  // namespace oss
