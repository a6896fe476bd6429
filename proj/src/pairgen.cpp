#include "sfwm/pairgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfwm::pairgen {

void SourceConfig::validate() const {
    if (!(pump.peak_power_w >= 0.0)) throw std::invalid_argument("pump peak power must be >= 0");
    if (!(pump_bandwidth_m > 0.0)) throw std::invalid_argument("pump bandwidth must be > 0");
    if (!(rep_rate_hz > 0.0)) throw std::invalid_argument("repetition rate must be > 0");
    if (!(gamma_w_m > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (!(effective_length_m > 0.0)) throw std::invalid_argument("effective length must be > 0");
    if (!(collection_bandwidth_hz > 0.0))
        throw std::invalid_argument("collection bandwidth must be > 0");
    if (!(birefringence >= 0.0)) throw std::invalid_argument("birefringence must be >= 0");
}

double filter_bandwidth_hz(Wavelength center, double fwhm_m) {
    if (!(fwhm_m > 0.0)) throw std::invalid_argument("filter FWHM must be > 0");
    return kSpeedOfLight * fwhm_m / (center.m() * center.m());
}

double peak_power_from_average(double average_power_w, double rep_rate_hz,
                               double pulse_duration_s) {
    if (!(average_power_w >= 0.0)) throw std::invalid_argument("average power must be >= 0");
    if (!(rep_rate_hz > 0.0 && pulse_duration_s > 0.0))
        throw std::invalid_argument("repetition rate and pulse duration must be > 0");
    return average_power_w / (rep_rate_hz * pulse_duration_s);
}

static double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

double pair_rate(const SourceConfig& cfg, double delta_k) {
    const double amp = cfg.gamma_w_m * cfg.pump.peak_power_w * cfg.effective_length_m;
    const double s = sinc(delta_k * cfg.effective_length_m / 2.0);
    return cfg.collection_bandwidth_hz * amp * amp * s * s;
}

std::vector<TuningPoint> tuning_curve(const SourceConfig& cfg,
                                      const dispersion::SellmeierModel& model,
                                      Wavelength signal_fixed, double pump_lo_nm,
                                      double pump_hi_nm, double step_nm) {
    if (!(step_nm > 0.0)) throw std::invalid_argument("pump step must be > 0");
    std::vector<TuningPoint> curve;
    for (double p = pump_lo_nm; p <= pump_hi_nm + 1e-9; p += step_nm) {
        const auto pump = Wavelength::from_nm(p);
        const auto idler = dispersion::idler_from_energy_conservation(pump, signal_fixed);
        const double dk = phasematch::delta_k(model, pump, signal_fixed, idler,
                                              cfg.birefringence, cfg.gamma_w_m,
                                              cfg.pump.peak_power_w);
        const double s = sinc(dk * cfg.effective_length_m / 2.0);
        curve.push_back({p, s * s, dk});
    }
    double peak = 0.0;
    for (const auto& pt : curve) peak = std::max(peak, pt.normalized_rate);
    if (peak > 0.0)
        for (auto& pt : curve) pt.normalized_rate /= peak;
    return curve;
}

void MeasuredCounts::validate() const {
    if (!(singles_signal_cps >= 0.0 && singles_idler_cps >= 0.0 && coincidences_cps >= 0.0))
        throw std::invalid_argument("count rates must be >= 0");
    if (coincidences_cps > std::min(singles_signal_cps, singles_idler_cps))
        throw std::invalid_argument("coincidence rate exceeds a singles rate");
    if (!(det_eff_signal > 0.0 && det_eff_signal <= 1.0 && det_eff_idler > 0.0 &&
          det_eff_idler <= 1.0))
        throw std::invalid_argument("detector efficiencies must lie in (0, 1]");
}

KlyshkoResult klyshko_analysis(const MeasuredCounts& m) {
    m.validate();
    if (!(m.coincidences_cps > 0.0))
        throw std::invalid_argument("insufficient statistics: zero coincidences");
    KlyshkoResult r;
    r.coupling_idler = m.coincidences_cps / (m.singles_signal_cps * m.det_eff_idler);
    r.coupling_signal = m.coincidences_cps / (m.singles_idler_cps * m.det_eff_signal);
    r.internal_pair_rate_cps =
        m.singles_signal_cps * m.singles_idler_cps / m.coincidences_cps;
    return r;
}

}  // namespace sfwm::pairgen
