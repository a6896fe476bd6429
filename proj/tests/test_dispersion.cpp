#include <cmath>
#include <random>

#include "doctest.h"

#include "sfwm/dispersion.hpp"

using namespace sfwm;
using namespace sfwm::dispersion;

namespace {

const SellmeierModel& silica() { return SellmeierModel::fused_silica(); }

SellmeierModel vacuum_model() {
    return SellmeierModel({0.0, 0.0, 0.0}, {0.0684043, 0.1162414, 9.896161}, 0.21, 3.7,
                          "vacuum limit");
}

}  // namespace

TEST_CASE("refractive index of fused silica at the sodium d-line") {
    // REPL evaluation of the closed-form three-term sum: 1.4584656082
    const double n = refractive_index(silica(), Wavelength::from_nm(587.6));
    CHECK(n == doctest::Approx(1.4584656082).epsilon(1e-9));
    CHECK(std::abs(n - 1.45846) < 1e-4);
}

TEST_CASE("vacuum limit: all strengths zero gives n = 1 exactly") {
    CHECK(refractive_index(vacuum_model(), Wavelength::from_nm(1000.0)) == 1.0);
}

TEST_CASE("normal dispersion across the signal/idler band") {
    CHECK(refractive_index(silica(), Wavelength::from_nm(830.0)) >
          refractive_index(silica(), Wavelength::from_nm(1130.0)));
}

TEST_CASE("index is monotonically decreasing on [600, 1600] nm") {
    double prev = refractive_index(silica(), Wavelength::from_nm(600.0));
    for (int nm = 601; nm <= 1600; ++nm) {
        const double n = refractive_index(silica(), Wavelength::from_nm(double(nm)));
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("evaluation outside the validity window is a domain error") {
    CHECK_THROWS_WITH_AS(refractive_index(silica(), Wavelength::from_nm(100.0)),
                         doctest::Contains("[0.21, 3.7]"), std::domain_error);
    CHECK_THROWS_AS(refractive_index(silica(), Wavelength::from_nm(5000.0)),
                    std::domain_error);
    // window edges evaluate
    CHECK(refractive_index(silica(), Wavelength::from_um(0.21)) > 1.0);
    CHECK(refractive_index(silica(), Wavelength::from_um(3.7)) > 1.0);
}

TEST_CASE("model construction rejects bad coefficients") {
    CHECK_THROWS_AS(SellmeierModel({-0.1, 0.4, 0.9}, {0.07, 0.12, 9.9}, 0.21, 3.7, ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(SellmeierModel({0.7, 0.4, 0.9}, {0.07, -0.12, 9.9}, 0.21, 3.7, ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(SellmeierModel({0.7, 0.4, 0.9}, {0.07, 0.12, 9.9}, 3.7, 0.21, ""),
                    std::invalid_argument);
}

TEST_CASE("wavenumber arithmetic identity at n + offset = 1.45") {
    // vacuum model (n = 1) with offset 0.45: k = 2 pi 1.45 / 1 um
    const double k = wavenumber(vacuum_model(), Wavelength::from_nm(1000.0), 0.45);
    CHECK(k == doctest::Approx(9.1106186954104e6).epsilon(1e-10));
}

TEST_CASE("wavenumber offset shifts k by exactly 2 pi B / lambda") {
    const double pi2 = 2.0 * std::acos(-1.0);
    for (double nm : {700.0, 957.0, 1300.0}) {
        for (double b : {1.64e-4, 4.0e-4, 1.0e-2}) {
            const auto lambda = Wavelength::from_nm(nm);
            const double k0 = wavenumber(silica(), lambda, 0.0);
            const double dk = wavenumber(silica(), lambda, b) - k0;
            // exact up to the rounding of the k's themselves
            CHECK(std::abs(dk - pi2 * b / lambda.m()) < 8.0 * 2.3e-16 * k0);
        }
    }
}

TEST_CASE("pump wavenumber follows the refractive index") {
    const auto pump = Wavelength::from_nm(957.0);
    const double pi2 = 2.0 * std::acos(-1.0);
    const double expected = pi2 * refractive_index(silica(), pump) / pump.m();
    CHECK(wavenumber(silica(), pump, 0.0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(wavenumber(silica(), pump, 0.0) == doctest::Approx(9526383.802392423).epsilon(1e-12));
}

TEST_CASE("energy conservation: 957/830 pairs with an 1130 nm idler") {
    const auto idler = idler_from_energy_conservation(Wavelength::from_nm(957.0),
                                                      Wavelength::from_nm(830.0));
    CHECK(idler.nm() == doctest::Approx(1129.886201991465).epsilon(1e-12));
    CHECK(std::abs(idler.nm() - 1130.0) < 0.5);
}

TEST_CASE("energy conservation degenerate case") {
    const auto idler = idler_from_energy_conservation(Wavelength::from_nm(957.0),
                                                      Wavelength::from_nm(957.0));
    CHECK(idler.nm() == doctest::Approx(957.0).epsilon(1e-12));
}

TEST_CASE("classical seeded geometry: 843/742 pairs with a 976 nm idler") {
    const auto idler = idler_from_energy_conservation(Wavelength::from_nm(843.0),
                                                      Wavelength::from_nm(742.0));
    CHECK(idler.nm() == doctest::Approx(975.8283931357).epsilon(1e-10));
}

TEST_CASE("no energy-conserving idler for too-long signals") {
    CHECK_THROWS_WITH_AS(idler_from_energy_conservation(Wavelength::from_nm(1000.0),
                                                        Wavelength::from_nm(499.0)),
                         doctest::Contains("no energy-conserving idler"), std::domain_error);
}

TEST_CASE("idler relation is an involution on the signal/idler pair") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> pump_nm(700.0, 1100.0);
    std::uniform_real_distribution<double> frac(0.55, 0.999);
    for (int i = 0; i < 500; ++i) {
        const auto pump = Wavelength::from_nm(pump_nm(eng));
        const auto signal = Wavelength::from_nm(pump.nm() * frac(eng));
        const auto idler = idler_from_energy_conservation(pump, signal);
        const auto back = idler_from_energy_conservation(pump, idler);
        CHECK(back.nm() == doctest::Approx(signal.nm()).epsilon(1e-12));
    }
}

TEST_CASE("coefficient file round trip") {
    const auto loaded =
        SellmeierModel::load(std::string(SFWM_REPO_DIR) + "/data/fused_silica_sellmeier.json");
    for (int j = 0; j < 3; ++j) {
        CHECK(loaded.strength[j] == silica().strength[j]);
        CHECK(loaded.resonance_um[j] == silica().resonance_um[j]);
    }
    CHECK(loaded.window_lo_um == silica().window_lo_um);
    CHECK(loaded.window_hi_um == silica().window_hi_um);
    CHECK(refractive_index(loaded, Wavelength::from_nm(587.6)) ==
          refractive_index(silica(), Wavelength::from_nm(587.6)));
}

TEST_CASE("wavelength type rejects non-positive values") {
    CHECK_THROWS_AS(Wavelength::from_nm(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Wavelength::from_nm(-5.0), std::invalid_argument);
}
