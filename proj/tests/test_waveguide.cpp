#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"

#include "sfwm/errors.hpp"
#include "sfwm/waveguide.hpp"

using namespace sfwm;
using namespace sfwm::waveguide;

namespace {

const dispersion::SellmeierModel& silica() { return dispersion::SellmeierModel::fused_silica(); }

WaveguideSpec reference_guide() {
    WaveguideSpec spec;
    spec.core_diameter_m = 6.1e-6;
    spec.delta_n = 4e-3;
    spec.birefringence = 1.64e-4;
    spec.physical_length_m = 30e-3;
    spec.birefringent_length_m = 26e-3;
    spec.loss_table = {{808.0, 0.29}, {980.0, 0.21}, {1550.0, 2.9}};
    spec.validate();
    return spec;
}

// forward model evaluated independently of the library path under test
double marcuse_oracle(double d_m, double dn, double lambda_nm) {
    const double n = dispersion::refractive_index(silica(), Wavelength::from_nm(lambda_nm));
    const double na = std::sqrt((n + dn) * (n + dn) - n * n);
    const double v = 2.0 * std::acos(-1.0) * (d_m / 2.0) / (lambda_nm * 1e-9) * na;
    return d_m * (0.65 + 1.619 * std::pow(v, -1.5) + 2.879 * std::pow(v, -6.0));
}

}  // namespace

TEST_CASE("V number of the published device at 808 nm") {
    const double v = v_number(reference_guide(), Wavelength::from_nm(808.0), silica());
    CHECK(v == doctest::Approx(2.5590115055).epsilon(1e-9));  // REPL oracle
    CHECK(std::abs(v - 2.56) < 0.01);
}

TEST_CASE("V vanishes without index contrast and scales as 1/lambda") {
    WaveguideSpec spec = reference_guide();
    spec.delta_n = 1e-300;  // guidance-free limit
    CHECK(v_number(spec, Wavelength::from_nm(808.0), silica()) ==
          doctest::Approx(0.0).epsilon(1e-10));

    const auto guide = reference_guide();
    const double v1 = v_number(guide, Wavelength::from_nm(700.0), silica());
    const double v2 = v_number(guide, Wavelength::from_nm(1400.0), silica());
    // up to the weak dispersion of the NA, v is proportional to 1/lambda
    CHECK(v1 / v2 == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("Marcuse mode-field diameter at the published device wavelengths") {
    const auto guide = reference_guide();
    CHECK(mfd_marcuse(guide, Wavelength::from_nm(808.0), silica()) ==
          doctest::Approx(6.440043e-6).epsilon(1e-6));
    CHECK(mfd_marcuse(guide, Wavelength::from_nm(1550.0), silica()) ==
          doctest::Approx(13.581712e-6).epsilon(1e-6));
    // qualitative check: the 1550 nm mode is much more extended
    CHECK(mfd_marcuse(guide, Wavelength::from_nm(1550.0), silica()) > 13e-6);
    CHECK(mfd_marcuse(guide, Wavelength::from_nm(1550.0), silica()) < 14e-6);
}

TEST_CASE("MFD is strictly increasing in wavelength over [635, 1550] nm") {
    const auto guide = reference_guide();
    double prev = mfd_marcuse(guide, Wavelength::from_nm(635.0), silica());
    for (int nm = 640; nm <= 1550; nm += 5) {
        const double m = mfd_marcuse(guide, Wavelength::from_nm(double(nm)), silica());
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("Marcuse fit rejects V <= 0.8") {
    WaveguideSpec spec = reference_guide();
    spec.delta_n = 4e-5;
    CHECK_THROWS_WITH_AS(mfd_marcuse(spec, Wavelength::from_nm(1550.0), silica()),
                         doctest::Contains("Marcuse"), std::domain_error);
}

TEST_CASE("effective length") {
    CHECK(effective_length(0.0, 26e-3) == 26e-3);  // lossless limit, exact
    CHECK(effective_length(0.21, 26e-3) == doctest::Approx(0.024432017226).epsilon(1e-9));
    // asymptote 1/alpha
    const double alpha = 0.21 * std::log(10.0) / 10.0 * 100.0;
    CHECK(effective_length(0.21, 1e3) == doctest::Approx(1.0 / alpha).epsilon(1e-9));
    CHECK_THROWS_AS(effective_length(-0.1, 26e-3), std::domain_error);
    CHECK_THROWS_AS(effective_length(0.21, 0.0), std::domain_error);
}

TEST_CASE("effective length never exceeds the physical length") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> loss(0.0, 5.0);
    std::uniform_real_distribution<double> len(1e-3, 0.2);
    for (int i = 0; i < 300; ++i) {
        const double a = loss(eng), l = len(eng);
        const double le = effective_length(a, l);
        CHECK(le <= l);
        if (a == 0.0)
            CHECK(le == l);
        else
            CHECK(le < l);
    }
}

TEST_CASE("nonlinear gamma") {
    CHECK(nonlinear_gamma(Wavelength::from_nm(957.0), 2.6e-20, 7e-6) ==
          doctest::Approx(4.435630051e-3).epsilon(1e-9));
    const double g1 = nonlinear_gamma(Wavelength::from_nm(957.0), 2.6e-20, 7e-6);
    const double g2 = nonlinear_gamma(Wavelength::from_nm(957.0), 2.6e-20, 14e-6);
    CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(nonlinear_gamma(Wavelength::from_nm(957.0), 0.0, 7e-6) == 0.0);
}

TEST_CASE("loss interpolation is log-linear with flagged extrapolation") {
    const auto guide = reference_guide();
    CHECK(loss_at(guide, Wavelength::from_nm(808.0)).loss_db_per_cm == doctest::Approx(0.29));
    CHECK(loss_at(guide, Wavelength::from_nm(980.0)).loss_db_per_cm == doctest::Approx(0.21));
    const auto mid = loss_at(guide, Wavelength::from_nm(957.0));
    CHECK(mid.loss_db_per_cm == doctest::Approx(0.2192623787).epsilon(1e-9));
    CHECK_FALSE(mid.extrapolated);
    const auto below = loss_at(guide, Wavelength::from_nm(600.0));
    CHECK(below.loss_db_per_cm == doctest::Approx(0.29));
    CHECK(below.extrapolated);
    const auto above = loss_at(guide, Wavelength::from_nm(1600.0));
    CHECK(above.loss_db_per_cm == doctest::Approx(2.9));
    CHECK(above.extrapolated);
}

TEST_CASE("waveguide spec validation") {
    WaveguideSpec bad = reference_guide();
    bad.delta_n = 0.06;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = reference_guide();
    bad.birefringent_length_m = 31e-3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = reference_guide();
    bad.loss_table = {{980.0, 0.21}, {808.0, 0.29}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = reference_guide();
    bad.birefringence = -1e-4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("waveguide spec JSON round trip") {
    const auto guide = reference_guide();
    const auto back = WaveguideSpec::from_json_text(guide.to_json());
    CHECK(back.core_diameter_m == doctest::Approx(guide.core_diameter_m).epsilon(1e-12));
    CHECK(back.delta_n == doctest::Approx(guide.delta_n).epsilon(1e-12));
    CHECK(back.birefringence == doctest::Approx(guide.birefringence).epsilon(1e-12));
    CHECK(back.loss_table.size() == 3);
}

TEST_CASE("MFD sample validation") {
    const MfdSample sub_diffraction{808.0, 0.3, 6.0};
    CHECK_THROWS_AS(sub_diffraction.validate(), std::invalid_argument);
    const MfdSample negative{808.0, -6.0, 6.0};
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
    const MfdSample fine{808.0, 6.3, 6.5};
    fine.validate();
}

TEST_CASE("step-index fit recovers noiseless synthetic parameters") {
    const double d_true = 6.1e-6, dn_true = 4e-3;
    std::vector<MfdSample> samples;
    for (double nm : {635.0, 808.0, 980.0, 1550.0}) {
        const double m = marcuse_oracle(d_true, dn_true, nm) * 1e6;
        samples.push_back({nm, m, m});
    }
    const auto fit = fit_step_index(samples, silica());
    CHECK(std::abs(fit.core_diameter_m / d_true - 1.0) < 5e-3);
    CHECK(std::abs(fit.delta_n / dn_true - 1.0) < 5e-3);
    CHECK(fit.rms_residual_m < 1e-9);

    // fixed point: refitting the fit's own forward curve reproduces the
    // parameters to 1e-6 relative
    std::vector<MfdSample> refit_samples;
    WaveguideSpec fitted;
    fitted.core_diameter_m = fit.core_diameter_m;
    fitted.delta_n = fit.delta_n;
    for (double nm : {635.0, 808.0, 980.0, 1550.0}) {
        const double m = mfd_marcuse(fitted, Wavelength::from_nm(nm), silica()) * 1e6;
        refit_samples.push_back({nm, m, m});
    }
    const auto fit2 = fit_step_index(refit_samples, silica());
    CHECK(std::abs(fit2.core_diameter_m / fit.core_diameter_m - 1.0) < 1e-6);
    CHECK(std::abs(fit2.delta_n / fit.delta_n - 1.0) < 1e-6);
}

TEST_CASE("step-index fit under 2% multiplicative noise") {
    const double d_true = 6.1e-6, dn_true = 4e-3;
    std::mt19937_64 eng(1234);
    std::normal_distribution<double> gauss(0.0, 0.02);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<MfdSample> samples;
        for (double nm : {635.0, 808.0, 980.0, 1550.0}) {
            const double m = marcuse_oracle(d_true, dn_true, nm) * 1e6;
            samples.push_back({nm, m * (1.0 + gauss(eng)), m * (1.0 + gauss(eng))});
        }
        const auto fit = fit_step_index(samples, silica());
        CHECK(std::abs(fit.core_diameter_m / d_true - 1.0) < 0.10);
        CHECK(std::abs(fit.delta_n / dn_true - 1.0) < 0.10);
    }
}

TEST_CASE("fitted forward curve tracks the truth within the residual band") {
    const double d_true = 6.1e-6, dn_true = 4e-3;
    std::mt19937_64 eng(77);
    std::normal_distribution<double> gauss(0.0, 0.02);
    std::vector<MfdSample> samples;
    for (double nm : {635.0, 808.0, 980.0, 1550.0}) {
        const double m = marcuse_oracle(d_true, dn_true, nm) * 1e6;
        samples.push_back({nm, m * (1.0 + gauss(eng)), m * (1.0 + gauss(eng))});
    }
    const auto fit = fit_step_index(samples, silica());
    WaveguideSpec fitted;
    fitted.core_diameter_m = fit.core_diameter_m;
    fitted.delta_n = fit.delta_n;
    for (int nm = 640; nm <= 1550; nm += 26) {
        const double model = mfd_marcuse(fitted, Wavelength::from_nm(double(nm)), silica());
        const double truth = marcuse_oracle(d_true, dn_true, double(nm));
        CHECK(std::abs(model - truth) < 3.0 * fit.rms_residual_m + 0.02 * truth);
    }
}

TEST_CASE("step-index fit preconditions") {
    std::vector<MfdSample> two = {{635.0, 5.7, 5.7}, {808.0, 6.4, 6.4}};
    CHECK_THROWS_AS(fit_step_index(two, silica()), std::invalid_argument);
    std::vector<MfdSample> dup = {{635.0, 5.7, 5.7}, {635.0, 5.8, 5.8}, {635.0, 5.9, 5.9}};
    CHECK_THROWS_AS(fit_step_index(dup, silica()), std::invalid_argument);
}

TEST_CASE("MFD CSV ingestion") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "sfwm_wg_test";
    fs::create_directories(dir);
    const auto good = dir / "mfd.csv";
    {
        std::ofstream out(good);
        out << "wavelength_nm,mfd_x_um,mfd_y_um\n635,5.66,5.65\n808,6.44,6.43\n";
    }
    const auto samples = load_mfd_samples(good.string());
    REQUIRE(samples.size() == 2);
    CHECK(samples[1].mfd_x_um == doctest::Approx(6.44));

    const auto bad = dir / "bad.csv";
    {
        std::ofstream out(bad);
        out << "wavelength_nm,mfd_x_um,mfd_y_um\n635,5.66,5.65\n808,oops,6.43\n";
    }
    CHECK_THROWS_WITH_AS(load_mfd_samples(bad.string()), doctest::Contains(":3"),
                         std::invalid_argument);
}
