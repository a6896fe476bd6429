#include "sfwm/scenario.hpp"

#include <filesystem>

#include "json.hpp"

#include "sfwm/provenance.hpp"

namespace sfwm::scenario {

Scenario load_scenario(const std::string& path) {
    const std::string text = slurp_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad scenario JSON " + path + ": " + e.what());
    }

    Scenario sc;
    sc.file_hash = fnv1a64_hex(text);
    sc.guide = waveguide::WaveguideSpec::from_json_text(j.at("waveguide").dump());

    if (j.contains("sellmeier_file")) {
        auto rel = j.at("sellmeier_file").get<std::string>();
        auto base = std::filesystem::path(path).parent_path();
        sc.sellmeier = dispersion::SellmeierModel::load((base / rel).string());
    }

    const auto& src = j.at("source");
    const auto pump_nm = src.at("pump_wavelength_nm").get<double>();
    const auto pump = Wavelength::from_nm(pump_nm);

    sc.signal_filter_center_nm = src.at("signal_filter").at("center_nm").get<double>();
    sc.signal_filter_fwhm_nm = src.at("signal_filter").at("fwhm_nm").get<double>();

    sc.source.pump.wavelength = pump;
    if (src.contains("pump_peak_power_mw")) {
        sc.source.pump.peak_power_w = src.at("pump_peak_power_mw").get<double>() * 1e-3;
    } else if (src.contains("pump_avg_power_mw") && src.contains("pulse_duration_fs")) {
        sc.source.pump.peak_power_w = pairgen::peak_power_from_average(
            src.at("pump_avg_power_mw").get<double>() * 1e-3,
            src.at("rep_rate_hz").get<double>(),
            src.at("pulse_duration_fs").get<double>() * 1e-15);
    } else {
        throw std::invalid_argument(
            "scenario source needs pump_peak_power_mw, or pump_avg_power_mw plus "
            "pulse_duration_fs");
    }
    sc.source.pump.polarization =
        src.value("pump_polarization", std::string("slow")) == "fast" ? phasematch::Axis::fast
                                                                      : phasematch::Axis::slow;
    sc.source.pump_bandwidth_m = src.at("pump_bandwidth_nm").get<double>() * 1e-9;
    sc.source.rep_rate_hz = src.at("rep_rate_hz").get<double>();
    sc.source.birefringence = sc.guide.birefringence;

    const double n2 = src.value("n2_m2_per_w", 2.6e-20);
    const double mfd_pump = waveguide::mfd_marcuse(sc.guide, pump, sc.sellmeier);
    sc.source.gamma_w_m = waveguide::nonlinear_gamma(pump, n2, mfd_pump);

    const auto loss = waveguide::loss_at(sc.guide, pump);
    sc.pump_loss_extrapolated = loss.extrapolated;
    sc.source.effective_length_m =
        waveguide::effective_length(loss.loss_db_per_cm, sc.guide.birefringent_length_m);

    sc.source.collection_bandwidth_hz =
        pairgen::filter_bandwidth_hz(Wavelength::from_nm(sc.signal_filter_center_nm),
                                     sc.signal_filter_fwhm_nm * 1e-9);
    sc.source.validate();

    const auto& ps = j.at("pair_source");
    sc.pair_source.mean_pairs_per_pulse = ps.at("mean_pairs_per_pulse").get<double>();
    const double purity = ps.value("schmidt_purity", 1.0);
    if (!(purity > 0.0 && purity <= 1.0))
        throw std::invalid_argument("schmidt_purity must lie in (0, 1]");
    sc.pair_source.schmidt_modes = 1.0 / purity;
    sc.pair_source.rep_rate_hz = sc.source.rep_rate_hz;
    sc.pair_source.transmission_signal = ps.at("transmission_signal").get<double>();
    sc.pair_source.transmission_idler = ps.at("transmission_idler").get<double>();
    sc.pair_source.idler_mode_count = ps.value("idler_mode_count", 10.0);
    sc.pair_source.idler_bandwidth_ratio = ps.value("idler_bandwidth_ratio", 10.0);
    sc.pair_source.validate();

    const auto& dets = j.at("detectors");
    if (!dets.is_array() || dets.size() != 2)
        throw std::invalid_argument(
            "scenario needs exactly 2 detectors (signal arm first, idler arm second)");
    auto parse_det = [](const nlohmann::json& d) {
        quantumstats::DetectorModel m;
        m.label = d.value("label", std::string{});
        m.efficiency = d.at("efficiency").get<double>();
        m.dead_time_s = d.value("dead_time_us", 0.0) * 1e-6;
        m.dark_rate_hz = d.value("dark_rate_hz", 0.0);
        m.validate();
        return m;
    };
    sc.detector_signal = parse_det(dets[0]);
    sc.detector_idler = parse_det(dets[1]);

    sc.outputs_dir = j.value("outputs", std::string("."));
    sc.seed = j.value("seed", 0ull);
    return sc;
}

}  // namespace sfwm::scenario
