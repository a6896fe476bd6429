#pragma once

#include <vector>

#include "sfwm/dispersion.hpp"
#include "sfwm/phasematch.hpp"
#include "sfwm/units.hpp"

namespace sfwm::pairgen {

/// Pump, collection and interaction parameters entering the pair-rate model.
/// SI units throughout.
struct SourceConfig {
    phasematch::PumpState pump;
    double pump_bandwidth_m = 0.0;        // FWHM of the pump spectrum
    double rep_rate_hz = 0.0;
    double gamma_w_m = 0.0;               // nonlinear parameter, 1/(W m)
    double effective_length_m = 0.0;      // loss-limited interaction length
    double collection_bandwidth_hz = 0.0; // of the signal-arm filter
    double birefringence = 0.0;

    void validate() const;
};

/// Conversion of a filter's wavelength FWHM to a frequency bandwidth,
/// dnu = c * dlambda / lambda^2 at the filter center.
double filter_bandwidth_hz(Wavelength center, double fwhm_m);

/// Peak power of a pulsed pump from its average power,
/// P_peak = P_avg / (rep_rate * pulse_duration).
double peak_power_from_average(double average_power_w, double rep_rate_hz,
                               double pulse_duration_s);

/// Model-scale photon pair rate
///   dnu * (gamma P0 L_eff)^2 * sinc^2(delta_k L_eff / 2),
/// the printed expression taken with proportionality constant 1. Normalized
/// and ratio-based quantities are constant-free.
double pair_rate(const SourceConfig& cfg, double delta_k);

struct TuningPoint {
    double pump_nm = 0.0;
    double normalized_rate = 0.0;
    double delta_k = 0.0;  // rad/m
};

/// sinc^2(delta_k L_eff / 2) versus pump at a fixed signal wavelength (the
/// collection filter center), idler following energy conservation, normalized
/// to peak 1 across the range.
std::vector<TuningPoint> tuning_curve(const SourceConfig& cfg,
                                      const dispersion::SellmeierModel& model,
                                      Wavelength signal_fixed, double pump_lo_nm,
                                      double pump_hi_nm, double step_nm);

/// Measured count rates (per second) and the detector efficiencies needed to
/// exclude them from the coupling estimates.
struct MeasuredCounts {
    double singles_signal_cps = 0.0;
    double singles_idler_cps = 0.0;
    double coincidences_cps = 0.0;
    double det_eff_signal = 1.0;
    double det_eff_idler = 1.0;

    void validate() const;
};

struct KlyshkoResult {
    double coupling_signal = 0.0;       // optical transmission of the signal arm
    double coupling_idler = 0.0;        // optical transmission of the idler arm
    double internal_pair_rate_cps = 0.0;
};

/// Klyshko-style analysis: arm transmissions from coincidence/singles ratios
/// with detector efficiencies divided out, and the internal pair generation
/// rate singles_s * singles_i / coincidences (detector and coupling factors
/// cancel in the ratio).
KlyshkoResult klyshko_analysis(const MeasuredCounts& m);

}  // namespace sfwm::pairgen
