#pragma once

#include <cstdint>
#include <string>

#include "sfwm/dispersion.hpp"
#include "sfwm/pairgen.hpp"
#include "sfwm/quantumstats.hpp"
#include "sfwm/waveguide.hpp"

namespace sfwm::scenario {

/// One experiment description binding all modules: the waveguide, the derived
/// source configuration (gamma from the mode size at the pump, effective
/// length from the loss table over the stress-track region, collection
/// bandwidth from the signal filter), the pair-source statistics and the two
/// detectors.
struct Scenario {
    waveguide::WaveguideSpec guide;
    pairgen::SourceConfig source;  // fully derived, SI units
    quantumstats::PairSourceModel pair_source;
    quantumstats::DetectorModel detector_signal;
    quantumstats::DetectorModel detector_idler;
    dispersion::SellmeierModel sellmeier = dispersion::SellmeierModel::fused_silica();

    double signal_filter_center_nm = 830.0;
    double signal_filter_fwhm_nm = 3.0;
    bool pump_loss_extrapolated = false;  // pump fell outside the loss table

    std::string outputs_dir;
    std::uint64_t seed = 0;
    std::string file_hash;  // fnv1a64 of the scenario file bytes, hex
};

Scenario load_scenario(const std::string& path);

}  // namespace sfwm::scenario
