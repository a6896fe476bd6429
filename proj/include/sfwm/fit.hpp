#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfwm/pairgen.hpp"

namespace sfwm::fit {

struct TuningSample {
    double pump_nm = 0.0;
    double normalized_counts = 0.0;
    double uncertainty = 0.0;
};

/// CSV columns: pump_nm, normalized_counts (or normalized_rate), uncertainty
/// (optional; defaults to 0.01). Parse errors carry the 1-based line number.
std::vector<TuningSample> load_tuning_samples(const std::string& csv_path,
                                              double default_uncertainty = 0.01);

struct FitOptions {
    bool float_effective_length = false;
    double b_lo = 0.5e-4;  // physically bounded search box for B
    double b_hi = 5.0e-4;
    bool bootstrap = false;  // parametric bootstrap sigma, in addition to the chi^2+1 profile
    int bootstrap_replicas = 200;
    std::uint64_t bootstrap_seed = 0;
};

struct FitReport {
    double birefringence = 0.0;
    double birefringence_sigma = 0.0;  // chi^2 + 1 profile half-width
    std::optional<double> effective_length_m;
    std::optional<double> effective_length_sigma;
    std::optional<double> bootstrap_sigma;
    double chi2 = 0.0;
    double chi2_per_dof = 0.0;
    std::vector<double> residuals;  // data minus model, per sample
};

/// Weighted least squares of the tuning-curve model over the birefringence
/// (and optionally the effective length). The model is evaluated on the
/// samples' own pump grid and normalized to its peak there, mirroring how
/// measured curves are normalized. Uncertainties come from chi^2 + 1
/// profiling. Needs >= 5 samples spanning the central lobe; flat data raises
/// FitError("uninformative data").
FitReport fit_birefringence(std::span<const TuningSample> samples,
                            const dispersion::SellmeierModel& model, Wavelength signal,
                            const pairgen::SourceConfig& cfg, const FitOptions& options = {});

/// One external birefringence estimate; either a gaussian value +/- sigma or
/// an explicit interval. wavelength_nm marks the band it was measured in.
struct BirefringenceEstimate {
    std::string label;
    double value = 0.0;
    double sigma = 0.0;  // 0 = point estimate (no gaussian error known)
    std::optional<std::pair<double, double>> interval;
    std::optional<double> wavelength_nm;

    std::pair<double, double> as_interval() const;
};

struct PairCompatibility {
    std::string label_a, label_b;
    bool intervals_overlap = false;
    std::optional<double> z_score;  // when both estimates carry sigma > 0
};

struct ConsistencyReport {
    std::vector<PairCompatibility> pairs;
    bool wavelength_trend_flag = false;  // longer-wavelength estimates sit lower
    std::vector<std::string> notes;
};

/// Pairwise overlap/compatibility of independent birefringence estimates;
/// flags the wavelength-dependence hypothesis when a longer-wavelength
/// estimate sits strictly below a shorter-wavelength one.
ConsistencyReport birefringence_consistency_report(
    std::span<const BirefringenceEstimate> estimates);

}  // namespace sfwm::fit
