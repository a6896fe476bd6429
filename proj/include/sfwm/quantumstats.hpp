#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sfwm::quantumstats {

struct DetectorModel {
    double efficiency = 1.0;   // in [0, 1]
    double dead_time_s = 0.0;  // non-paralyzable: blind for exactly this long after a click
    double dark_rate_hz = 0.0;
    std::string label;

    void validate() const;
};

/// Thermal pair source: mean_pairs_per_pulse photons per arm drawn from
/// independent thermal (geometric) Schmidt modes. schmidt_modes is the
/// effective mode number K = 1/purity and may be non-integer; the mode
/// weights are chosen so that sum w = 1 and sum w^2 = 1/K exactly.
struct PairSourceModel {
    double mean_pairs_per_pulse = 0.0;  // mu, within the collected signal band
    double schmidt_modes = 1.0;         // effective K >= 1
    double rep_rate_hz = 8.0e7;
    double transmission_signal = 1.0;   // optical transmission, signal arm
    double transmission_idler = 1.0;    // optical transmission, idler arm
    double idler_mode_count = 10.0;     // effective modes of the unfiltered idler
    double idler_bandwidth_ratio = 10.0;  // unfiltered / filtered bandwidth

    void validate() const;
};

enum class SimMode { cross, self_signal, self_idler };

const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& name);

/// Tallies of one simulated run. In cross mode singles_s/singles_i are the
/// signal/idler arm clicks and `coincidences` counts pulses where both
/// clicked. In the self modes the arm is split 50:50 onto two copies of the
/// arm's detector; singles_s/singles_i then hold the two splitter outputs and
/// `split_coincidences` the pulses where both fired.
struct CountingRecord {
    std::uint64_t pulses = 0;
    std::uint64_t singles_s = 0;
    std::uint64_t singles_i = 0;
    std::uint64_t coincidences = 0;
    std::uint64_t split_coincidences = 0;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::cross;
};

/// Per-pulse Monte Carlo of the counting experiment. Pulse-indexed
/// coincidence windows (one bin per pump pulse); photons survive arm
/// transmission and detector efficiency independently; detectors blank for
/// dead_time after each click; dark counts fold into each pulse window as a
/// Poisson click probability. Identical inputs and seed give an identical
/// record. Requires duration * rep_rate >= 1e5 pulses.
CountingRecord simulate_counts(const PairSourceModel& src, const DetectorModel& det_s,
                               const DetectorModel& det_i, double duration_s,
                               std::uint64_t seed, SimMode mode);

/// Visit every pulse that produced at least one click (pulse index, click a,
/// click b). The click stream is the one simulate_counts tallies for
/// identical inputs.
void scan_clicks(const PairSourceModel& src, const DetectorModel& det_s,
                 const DetectorModel& det_i, std::uint64_t pulses, std::uint64_t seed,
                 SimMode mode,
                 const std::function<void(std::uint64_t, bool, bool)>& visit);

struct G2Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// g_si(0) = coincidences * pulses / (singles_s * singles_i) with Poisson
/// error propagation. Record must come from cross mode with nonzero singles.
G2Estimate g2_cross(const CountingRecord& rec);

/// Unheralded self-g2(0) over the two splitter outputs,
/// split_coincidences * pulses / (singles_a * singles_b).
G2Estimate g2_self(const CountingRecord& rec);

/// Schmidt purity from thermal statistics, purity = g_self - 1; requires
/// g_self in [1, 2].
double purity_from_g2(double g_self);

struct CauchySchwarzResult {
    double violation_ratio = 0.0;  // gsi^2 / (gss * gii), classical bound 1
    double n_sigma = 0.0;          // (gsi - sqrt(gss*gii)) in propagated sigma units
};

CauchySchwarzResult cauchy_schwarz(const G2Estimate& gss, const G2Estimate& gii,
                                   const G2Estimate& gsi);

/// Record JSON including seed, all model parameters and tallies.
std::string record_to_json(const CountingRecord& rec, const PairSourceModel& src,
                           const DetectorModel& det_s, const DetectorModel& det_i);

}  // namespace sfwm::quantumstats
