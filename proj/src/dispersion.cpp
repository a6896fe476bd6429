#include "sfwm/dispersion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace sfwm::dispersion {

SellmeierModel::SellmeierModel(std::array<double, 3> b, std::array<double, 3> lambda_um,
                               double lo_um, double hi_um, std::string src)
    : strength(b), resonance_um(lambda_um), window_lo_um(lo_um), window_hi_um(hi_um),
      source(std::move(src)) {
    for (double bj : strength)
        if (!(bj >= 0.0)) throw std::invalid_argument("Sellmeier strength B_j must be >= 0");
    for (double lj : resonance_um)
        if (!(lj > 0.0)) throw std::invalid_argument("Sellmeier resonance wavelength must be > 0");
    if (!(window_lo_um > 0.0 && window_hi_um > window_lo_um))
        throw std::invalid_argument("Sellmeier validity window must satisfy 0 < lo < hi");
}

const SellmeierModel& SellmeierModel::fused_silica() {
    // Corning HPFS 7980 fused silica, datasheet Sellmeier fit at 22 C.
    static const SellmeierModel model(
        {0.68374049400, 0.42032361300, 0.58502748000},
        {0.06784930869213039, 0.11574491608705757, 8.030770398909436},
        0.21, 3.7, "Corning HPFS 7980 fused silica datasheet Sellmeier fit (22 C)");
    return model;
}

SellmeierModel SellmeierModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open Sellmeier coefficient file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad Sellmeier coefficient file " + path + ": " + e.what());
    }
    auto b = j.at("B");
    auto l = j.at("lambda_um");
    auto w = j.at("window_um");
    if (b.size() != 3 || l.size() != 3 || w.size() != 2)
        throw std::invalid_argument("Sellmeier file must carry 3 terms and a [lo, hi] window");
    return SellmeierModel({b[0].get<double>(), b[1].get<double>(), b[2].get<double>()},
                          {l[0].get<double>(), l[1].get<double>(), l[2].get<double>()},
                          w[0].get<double>(), w[1].get<double>(),
                          j.value("source", std::string{}));
}

std::string SellmeierModel::to_json() const {
    nlohmann::json j;
    j["B"] = strength;
    j["lambda_um"] = resonance_um;
    j["window_um"] = {window_lo_um, window_hi_um};
    j["source"] = source;
    return j.dump();
}

bool SellmeierModel::in_window(Wavelength lambda) const {
    // tolerate unit-conversion rounding at the window edges
    const double um = lambda.um();
    const double eps = 1e-9 * window_hi_um;
    return um >= window_lo_um - eps && um <= window_hi_um + eps;
}

double refractive_index(const SellmeierModel& model, Wavelength lambda) {
    if (!model.in_window(lambda)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "wavelength %.6g um outside Sellmeier validity window [%g, %g] um",
                      lambda.um(), model.window_lo_um, model.window_hi_um);
        throw std::domain_error(buf);
    }
    const double l2 = lambda.um() * lambda.um();
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double r2 = model.resonance_um[j] * model.resonance_um[j];
        sum += model.strength[j] * l2 / (l2 - r2);
    }
    return std::sqrt(1.0 + sum);
}

double wavenumber(const SellmeierModel& model, Wavelength lambda, double index_offset) {
    return 2.0 * std::numbers::pi * (refractive_index(model, lambda) + index_offset) / lambda.m();
}

Wavelength idler_from_energy_conservation(Wavelength pump, Wavelength signal) {
    const double inv = 2.0 / pump.m() - 1.0 / signal.m();
    if (!(inv > 0.0)) {
        std::ostringstream msg;
        msg << "no energy-conserving idler for pump " << pump.nm() << " nm, signal "
            << signal.nm() << " nm";
        throw std::domain_error(msg.str());
    }
    return Wavelength::from_m(1.0 / inv);
}

}  // namespace sfwm::dispersion
