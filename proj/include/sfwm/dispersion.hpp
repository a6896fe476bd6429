#pragma once

#include <array>
#include <string>

#include "sfwm/units.hpp"

namespace sfwm::dispersion {

/// Three-term Sellmeier dispersion model with an enforced validity window:
///   n^2(L) = 1 + sum_j B_j L^2 / (L^2 - L_j^2),  L in micrometers.
/// Evaluation outside the window is an error; extrapolated Sellmeier values
/// are silently wrong.
struct SellmeierModel {
    std::array<double, 3> strength;      // oscillator strengths B_j (>= 0)
    std::array<double, 3> resonance_um;  // resonance wavelengths L_j (> 0), um
    double window_lo_um = 0.21;
    double window_hi_um = 3.7;
    std::string source;

    SellmeierModel(std::array<double, 3> b, std::array<double, 3> lambda_um,
                   double lo_um, double hi_um, std::string src);

    /// Default fused-silica model (Corning HPFS 7980 datasheet fit); the same
    /// coefficients ship in data/fused_silica_sellmeier.json.
    static const SellmeierModel& fused_silica();

    /// Load a coefficient file: {"B": [3], "lambda_um": [3],
    /// "window_um": [lo, hi], "source": str}.
    static SellmeierModel load(const std::string& path);

    /// Coefficient JSON document (same schema as load), serialized compactly.
    /// Echoed into every CLI output for reproducibility.
    std::string to_json() const;

    bool in_window(Wavelength lambda) const;
};

/// n(lambda) from the Sellmeier sum. Throws std::domain_error outside the
/// model's validity window.
double refractive_index(const SellmeierModel& model, Wavelength lambda);

/// Angular wavenumber 2*pi*(n(lambda) + index_offset)/lambda in rad/m.
/// index_offset carries the birefringence of the mode's polarization axis
/// (0 on the fast axis, +B on the slow axis).
double wavenumber(const SellmeierModel& model, Wavelength lambda, double index_offset);

/// Energy conservation for SFWM, 2/lp = 1/ls + 1/li, solved for the idler.
/// Exact relation, no dispersion involved. Throws std::domain_error when
/// 2/lp - 1/ls <= 0 ("no energy-conserving idler").
Wavelength idler_from_energy_conservation(Wavelength pump, Wavelength signal);

}  // namespace sfwm::dispersion
