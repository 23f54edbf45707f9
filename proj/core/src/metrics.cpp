#include "oss/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "oss/errors.hpp"
#include "oss/receiver.hpp"

namespace oss {

void HardwareSpec::validate() const {
    if (wavelengths < 1 || patch_edge < 1 || nodes < 0) {
        throw ArgumentError("hardware counts must be positive");
    }
    if (!(pixel_rate_hz > 0.0) || !(ring_radius_m > 0.0) || node_spacing_m < 0.0) {
        throw ArgumentError("hardware rates and lengths must be positive");
    }
}

void PowerModelParams::validate() const {
    for (double e : {eta_laser, eta_mrr, eta_pd}) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw ArgumentError("efficiencies must lie in [0, 1]");
        }
    }
    if (!(photon_energy_j > 0.0) || bit_precision < 1) {
        throw ArgumentError("photon energy and bit precision must be positive");
    }
}

double photon_energy(double wavelength_m) {
    return kPlanck * kSpeedOfLight / wavelength_m;
}

PowerModelParams default_power_params() {
    PowerModelParams pm;
    pm.photon_energy_j = photon_energy(1550e-9);
    return pm;
}

double compute_speed(const HardwareSpec& spec) {
    const double n2 = static_cast<double>(spec.patch_edge) * spec.patch_edge;
    return spec.wavelengths * n2 * spec.nodes * spec.pixel_rate_hz;
}

double footprint(const HardwareSpec& spec) {
    const double ring = 2.2 * 2.0 * spec.ring_radius_m;
    return ring * spec.nodes * (ring + spec.node_spacing_m);
}

PowerBreakdown power(const HardwareSpec& spec, const PowerModelParams& pm) {
    pm.validate();
    const double eta = pm.eta();
    if (eta == 0.0) {
        throw ArgumentError("combined quantum efficiency is zero");
    }
    const double n2 = static_cast<double>(spec.patch_edge) * spec.patch_edge;
    const double nodes = spec.nodes;
    const double pr = spec.pixel_rate_hz;
    const double nb = pm.bit_precision;

    const double quant = std::ldexp(1.0, 2 * pm.bit_precision + 1);
    const double capacitive = pm.pd_capacitance_f * pm.pd_voltage_v / kElementaryCharge;

    PowerBreakdown b;
    b.quantization_branch = quant >= capacitive;
    b.photons_per_sample = std::max(quant, capacitive);
    b.receiver_w = spec.wavelengths * nodes * pm.photon_energy_j * b.photons_per_sample * pr / (n2 * eta);
    b.modulator_w = spec.wavelengths * pm.mod_energy_j_per_bit * nb * pr;
    b.adc_w = spec.wavelengths * nodes * pm.adc_energy_j_per_bit * nb * pr / n2;
    b.total_w = b.receiver_w + b.modulator_w + b.adc_w;
    return b;
}

MetricsReport derived_figures(double macs_per_s, const PowerBreakdown& power, double footprint_m2) {
    if (!(power.total_w > 0.0)) {
        throw ArgumentError("power must be > 0 to derive efficiency");
    }
    if (!(footprint_m2 > 0.0)) {
        throw ArgumentError("footprint must be > 0 to derive density");
    }
    MetricsReport r;
    r.compute_speed_macs = macs_per_s;
    r.compute_speed_ops = 2.0 * macs_per_s;
    r.footprint_m2 = footprint_m2;
    r.power_w = power.total_w;
    r.breakdown = power;
    r.efficiency_tops_per_w = r.compute_speed_ops / power.total_w / 1e12;
    r.density_tops_per_mm2 = r.compute_speed_ops / (footprint_m2 * 1e6) / 1e12;
    return r;
}

MetricsReport evaluate_metrics(const HardwareSpec& spec, const PowerModelParams& pm) {
    spec.validate();
    return derived_figures(compute_speed(spec), power(spec, pm), footprint(spec));
}

const std::vector<ReferenceSystem>& reference_systems() {
    static const std::vector<ReferenceSystem> rows = {
        {"Nvidia Tesla P40", 1.3, "> 99", 0.19, 0.1},
        {"DEAP", 128, "97.6", 3.42, -1.0},
        {"Photonic tensor core", 128, "96.1", 0.18, 284},
        {"OSS-CNN (reported)", 128, "97.6", kReportedOssEfficiency, kReportedOssDensity},
    };
    return rows;
}

}  // namespace oss
