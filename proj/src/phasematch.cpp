#include "sfwm/phasematch.hpp"

#include <cmath>
#include <sstream>

namespace sfwm::phasematch {

using dispersion::idler_from_energy_conservation;
using dispersion::refractive_index;
using dispersion::wavenumber;

void PhaseMatchPoint::validate() const {
    const double ec = std::abs(2.0 / pump_nm - 1.0 / signal_nm - 1.0 / idler_nm);
    if (!(ec < 1e-12))
        throw std::logic_error("phase-match point violates energy conservation");
    if (!(signal_nm <= pump_nm && pump_nm <= idler_nm))
        throw std::logic_error("phase-match point violates signal <= pump <= idler");
}

double delta_k(const dispersion::SellmeierModel& model, Wavelength pump, Wavelength signal,
               Wavelength idler, double birefringence, double gamma_w_m,
               double peak_power_w) {
    const double kp = wavenumber(model, pump, birefringence);
    const double ks = wavenumber(model, signal, 0.0);
    const double ki = wavenumber(model, idler, 0.0);
    // grouping keeps the expression exactly symmetric in signal and idler
    return 2.0 * kp - (ki + ks) + (2.0 / 3.0) * gamma_w_m * peak_power_w;
}

namespace {

// delta k as a function of the signal wavelength alone, idler following from
// energy conservation. Both signal and idler must stay inside the Sellmeier
// window; returns nullopt where they do not.
std::optional<double> delta_k_at_signal(const dispersion::SellmeierModel& model,
                                        Wavelength pump, double signal_nm,
                                        double birefringence, double gamma_p0) {
    const auto signal = Wavelength::from_nm(signal_nm);
    if (!model.in_window(signal)) return std::nullopt;
    const auto idler = idler_from_energy_conservation(pump, signal);
    if (!model.in_window(idler)) return std::nullopt;
    const double kp = wavenumber(model, pump, birefringence);
    const double ks = wavenumber(model, signal, 0.0);
    const double ki = wavenumber(model, idler, 0.0);
    return 2.0 * kp - (ki + ks) + (2.0 / 3.0) * gamma_p0;
}

}  // namespace

SolveResult solve_signal_idler(const dispersion::SellmeierModel& model, Wavelength pump,
                               double birefringence, double gamma_p0) {
    if (!(birefringence >= 0.0))
        throw std::invalid_argument("birefringence must be >= 0");

    const double pump_nm = pump.nm();
    const double scan_hi = pump_nm - 1.0;        // degeneracy guard
    const double scan_lo = pump_nm / 2.0 + 1.0;  // energy-conservation limit
    const double step = 0.5;

    SolveResult out;
    double prev_nm = scan_hi;
    auto prev_dk = delta_k_at_signal(model, pump, prev_nm, birefringence, gamma_p0);
    if (!prev_dk) return out;  // pump outside usable window
    out.bracket_delta_k_near = *prev_dk;
    out.bracket_delta_k_short = *prev_dk;

    for (double s = scan_hi - step; s > scan_lo; s -= step) {
        auto dk = delta_k_at_signal(model, pump, s, birefringence, gamma_p0);
        if (!dk) break;  // idler (or signal) left the Sellmeier window
        out.bracket_delta_k_short = *dk;
        if ((*dk < 0.0) != (*prev_dk < 0.0) || *dk == 0.0) {
            // bisect [s, prev_nm]: to 1e-4 nm on the wavelength, then keep
            // halving until the residual meets the |delta k| < 1e-6 rad/m
            // contract (the interval stays far above the double-precision
            // floor when it does)
            double lo = s, hi = prev_nm;
            double f_lo = *dk;
            double root_nm = 0.5 * (lo + hi);
            for (int iter = 0; iter < 200; ++iter) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;  // no representable midpoint left
                const double f_mid =
                    *delta_k_at_signal(model, pump, mid, birefringence, gamma_p0);
                root_nm = mid;
                if ((f_mid < 0.0) == (f_lo < 0.0)) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
                if (hi - lo < 1e-4 && std::abs(f_mid) < 1e-6) break;
            }
            const auto signal = Wavelength::from_nm(root_nm);
            const auto idler = idler_from_energy_conservation(pump, signal);
            PhaseMatchPoint point;
            point.pump_nm = pump_nm;
            point.signal_nm = root_nm;
            point.idler_nm = idler.nm();
            point.delta_k = *delta_k_at_signal(model, pump, root_nm, birefringence, gamma_p0);
            point.birefringence = birefringence;
            point.validate();
            out.point = point;
            return out;
        }
        prev_nm = s;
        prev_dk = dk;
    }
    return out;
}

std::vector<CurveSample> phasematch_curve(const dispersion::SellmeierModel& model,
                                          double birefringence, double pump_lo_nm,
                                          double pump_hi_nm, double step_nm,
                                          double gamma_p0) {
    if (!(step_nm > 0.0)) throw std::invalid_argument("pump step must be > 0");
    std::vector<CurveSample> curve;
    for (double p = pump_lo_nm; p <= pump_hi_nm + 1e-9; p += step_nm) {
        auto solved = solve_signal_idler(model, Wavelength::from_nm(p), birefringence, gamma_p0);
        curve.push_back({p, solved.point});
    }
    return curve;
}

Wavelength classical_fwm_signal(const dispersion::SellmeierModel& model, Wavelength pump,
                                Wavelength seed) {
    if (seed < pump)
        throw std::invalid_argument("seed wavelength must not be shorter than the pump");
    if (!model.in_window(pump) || !model.in_window(seed)) {
        std::ostringstream msg;
        msg << "pump " << pump.nm() << " nm or seed " << seed.nm()
            << " nm outside Sellmeier validity window";
        throw std::domain_error(msg.str());
    }
    // same closed form as the idler relation with the roles exchanged
    return idler_from_energy_conservation(pump, seed);
}

}  // namespace sfwm::phasematch
