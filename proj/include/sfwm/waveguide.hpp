#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfwm/dispersion.hpp"
#include "sfwm/units.hpp"

namespace sfwm::waveguide {

struct LossPoint {
    double wavelength_nm = 0.0;
    double loss_db_per_cm = 0.0;
};

/// Step-index equivalent description of the laser-written guide.
/// Lengths in SI meters; JSON I/O uses um/mm/nm keys.
struct WaveguideSpec {
    double core_diameter_m = 0.0;
    double delta_n = 0.0;          // peak index contrast of the core
    double birefringence = 0.0;    // slow minus fast axis
    double physical_length_m = 0.0;
    double birefringent_length_m = 0.0;  // stress-track region, <= physical length
    std::vector<LossPoint> loss_table;   // strictly increasing wavelengths

    void validate() const;  // throws std::invalid_argument

    static WaveguideSpec from_json_text(const std::string& text);
    std::string to_json() const;
};

struct MfdSample {
    double wavelength_nm = 0.0;
    double mfd_x_um = 0.0;
    double mfd_y_um = 0.0;

    void validate() const;
};

/// CSV columns: wavelength_nm, mfd_x_um, mfd_y_um. Parse errors carry the
/// 1-based line number.
std::vector<MfdSample> load_mfd_samples(const std::string& csv_path);

struct LossQuery {
    double loss_db_per_cm = 0.0;
    bool extrapolated = false;  // wavelength outside the loss table
};

/// Propagation loss at a wavelength: linear interpolation in log-loss between
/// table entries, nearest-neighbor (flagged) outside the table.
LossQuery loss_at(const WaveguideSpec& spec, Wavelength lambda);

/// Normalized frequency V = (2 pi a / lambda) * NA with
/// NA = sqrt((n + delta_n)^2 - n^2) and n from the Sellmeier model.
double v_number(const WaveguideSpec& spec, Wavelength lambda,
                const dispersion::SellmeierModel& model);

/// Marcuse's empirical Gaussian-width fit for a step-index guide,
///   MFD = d * (0.65 + 1.619 V^-3/2 + 2.879 V^-6),
/// valid for V > 0.8. Returns meters.
double mfd_marcuse(const WaveguideSpec& spec, Wavelength lambda,
                   const dispersion::SellmeierModel& model);

struct StepIndexFit {
    double core_diameter_m = 0.0;
    double delta_n = 0.0;
    double rms_residual_m = 0.0;
};

/// Least-squares fit of mfd_marcuse over (core diameter, delta_n) to measured
/// mode-field diameters. mfd_x and mfd_y are averaged per sample before
/// fitting. Needs >= 3 samples at distinct wavelengths. Simplex restarts from
/// a 3x3 grid of starting points; throws FitError on non-convergence.
StepIndexFit fit_step_index(std::span<const MfdSample> samples,
                            const dispersion::SellmeierModel& model);

/// Loss-limited effective interaction length (1 - exp(-alpha L))/alpha with
/// alpha from the dB/cm loss figure; exactly L when the loss is zero.
double effective_length(double loss_db_per_cm, double length_m);

/// Kerr nonlinear parameter gamma = 2 pi n2 / (lambda A_eff) with the
/// Gaussian-mode area A_eff = pi (MFD/2)^2. Returns 1/(W m).
double nonlinear_gamma(Wavelength lambda, double n2_m2_per_w, double mfd_m);

}  // namespace sfwm::waveguide
