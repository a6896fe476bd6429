#pragma once

#include <optional>
#include <vector>

#include "sfwm/dispersion.hpp"
#include "sfwm/units.hpp"

namespace sfwm::phasematch {

enum class Axis { slow, fast };

struct PumpState {
    Wavelength wavelength = Wavelength::from_nm(957.0);
    double peak_power_w = 0.0;
    Axis polarization = Axis::slow;
};

/// One phase-matched (pump, signal, idler) triple. Wavelengths in nm for
/// direct CSV output; energy conservation holds to 1e-12 /nm and
/// signal <= pump <= idler.
struct PhaseMatchPoint {
    double pump_nm = 0.0;
    double signal_nm = 0.0;
    double idler_nm = 0.0;
    double delta_k = 0.0;  // rad/m, residual at the returned root
    double birefringence = 0.0;

    void validate() const;  // throws std::logic_error on broken invariants
};

/// Cross-polarized SFWM phase mismatch
///   delta k = 2 k_p - k_i - k_s + (2/3) gamma P0,
/// pump on the slow axis (index offset +B), signal and idler co-polarized on
/// the fast axis (offset 0).
double delta_k(const dispersion::SellmeierModel& model, Wavelength pump, Wavelength signal,
               Wavelength idler, double birefringence, double gamma_w_m, double peak_power_w);

struct SolveResult {
    std::optional<PhaseMatchPoint> point;
    // delta k at the scan bracket endpoints, reported when no sign change
    // was found (point empty).
    double bracket_delta_k_short = 0.0;  // short-wavelength end of the scan
    double bracket_delta_k_near = 0.0;   // near-degenerate end (pump - 1 nm)
};

/// Find the non-degenerate signal root delta_k = 0 for a given pump.
/// Scans signal wavelengths downward from pump - 1 nm in 0.5 nm steps
/// (stopping at pump/2 + 1 nm or where signal/idler would leave the
/// Sellmeier window), then bisects the sign change to 1e-4 nm.
SolveResult solve_signal_idler(const dispersion::SellmeierModel& model, Wavelength pump,
                               double birefringence, double gamma_p0 = 0.0);

/// One pump step of a phase-matching curve; `point` is empty at pumps with
/// no solution (gap marker).
struct CurveSample {
    double pump_nm = 0.0;
    std::optional<PhaseMatchPoint> point;
};

/// Signal/idler branches versus pump over [pump_lo_nm, pump_hi_nm] in steps
/// of step_nm; empty range yields an empty curve.
std::vector<CurveSample> phasematch_curve(const dispersion::SellmeierModel& model,
                                          double birefringence, double pump_lo_nm,
                                          double pump_hi_nm, double step_nm,
                                          double gamma_p0 = 0.0);

/// Energy-conserving signal for a classically seeded idler channel,
/// 1/(2/lp - 1/lseed); requires seed >= pump.
Wavelength classical_fwm_signal(const dispersion::SellmeierModel& model, Wavelength pump,
                                Wavelength seed);

}  // namespace sfwm::phasematch
