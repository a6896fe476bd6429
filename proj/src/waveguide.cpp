#include "sfwm/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sfwm/csv.hpp"
#include "sfwm/errors.hpp"
#include "sfwm/optimize.hpp"

namespace sfwm::waveguide {

void WaveguideSpec::validate() const {
    if (!(core_diameter_m > 0.0))
        throw std::invalid_argument("waveguide core diameter must be > 0");
    if (!(delta_n > 0.0 && delta_n < 0.05))
        throw std::invalid_argument("waveguide index contrast must lie in (0, 0.05)");
    if (!(birefringence >= 0.0))
        throw std::invalid_argument("waveguide birefringence must be >= 0");
    if (!(physical_length_m > 0.0 && birefringent_length_m > 0.0))
        throw std::invalid_argument("waveguide lengths must be > 0");
    if (birefringent_length_m > physical_length_m)
        throw std::invalid_argument("birefringent length exceeds physical length");
    for (std::size_t i = 0; i < loss_table.size(); ++i) {
        if (!(loss_table[i].loss_db_per_cm > 0.0))
            throw std::invalid_argument("loss table entries must be > 0 dB/cm");
        if (i > 0 && !(loss_table[i].wavelength_nm > loss_table[i - 1].wavelength_nm))
            throw std::invalid_argument("loss table wavelengths must be strictly increasing");
    }
}

WaveguideSpec WaveguideSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad waveguide JSON: ") + e.what());
    }
    WaveguideSpec spec;
    spec.core_diameter_m = j.at("core_diameter_um").get<double>() * 1e-6;
    spec.delta_n = j.at("delta_n").get<double>();
    spec.birefringence = j.at("birefringence").get<double>();
    spec.physical_length_m = j.at("physical_length_mm").get<double>() * 1e-3;
    spec.birefringent_length_m = j.at("birefringent_length_mm").get<double>() * 1e-3;
    for (const auto& row : j.at("loss_table"))
        spec.loss_table.push_back(
            {row.at("wavelength_nm").get<double>(), row.at("loss_db_per_cm").get<double>()});
    spec.validate();
    return spec;
}

std::string WaveguideSpec::to_json() const {
    nlohmann::json j;
    j["core_diameter_um"] = core_diameter_m * 1e6;
    j["delta_n"] = delta_n;
    j["birefringence"] = birefringence;
    j["physical_length_mm"] = physical_length_m * 1e3;
    j["birefringent_length_mm"] = birefringent_length_m * 1e3;
    j["loss_table"] = nlohmann::json::array();
    for (const auto& p : loss_table)
        j["loss_table"].push_back(
            {{"wavelength_nm", p.wavelength_nm}, {"loss_db_per_cm", p.loss_db_per_cm}});
    return j.dump(2);
}

void MfdSample::validate() const {
    if (!(wavelength_nm > 0.0 && mfd_x_um > 0.0 && mfd_y_um > 0.0))
        throw std::invalid_argument("MFD sample fields must be > 0");
    // diffraction sanity bound: the mode cannot be narrower than lambda/2
    const double half_lambda_um = wavelength_nm * 1e-3 / 2.0;
    if (mfd_x_um < half_lambda_um || mfd_y_um < half_lambda_um)
        throw std::invalid_argument("MFD sample below the lambda/2 diffraction bound");
}

std::vector<MfdSample> load_mfd_samples(const std::string& csv_path) {
    const auto table = csvio::read_numeric_csv(csv_path);
    const int cw = csvio::column(table, "wavelength_nm");
    const int cx = csvio::column(table, "mfd_x_um");
    const int cy = csvio::column(table, "mfd_y_um");
    if (cw < 0 || cx < 0 || cy < 0)
        throw std::invalid_argument(csv_path +
                                    ": need columns wavelength_nm, mfd_x_um, mfd_y_um");
    std::vector<MfdSample> samples;
    for (const auto& row : table.rows) {
        MfdSample s{row[cw], row[cx], row[cy]};
        s.validate();
        samples.push_back(s);
    }
    return samples;
}

LossQuery loss_at(const WaveguideSpec& spec, Wavelength lambda) {
    if (spec.loss_table.empty())
        throw std::invalid_argument("waveguide has no loss table");
    const double nm = lambda.nm();
    const auto& t = spec.loss_table;
    if (nm <= t.front().wavelength_nm)
        return {t.front().loss_db_per_cm, nm < t.front().wavelength_nm};
    if (nm >= t.back().wavelength_nm)
        return {t.back().loss_db_per_cm, nm > t.back().wavelength_nm};
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (nm <= t[i].wavelength_nm) {
            const double u =
                (nm - t[i - 1].wavelength_nm) / (t[i].wavelength_nm - t[i - 1].wavelength_nm);
            const double log_loss = std::log(t[i - 1].loss_db_per_cm) +
                                    u * (std::log(t[i].loss_db_per_cm) -
                                         std::log(t[i - 1].loss_db_per_cm));
            return {std::exp(log_loss), false};
        }
    }
    return {t.back().loss_db_per_cm, false};  // unreachable
}

double v_number(const WaveguideSpec& spec, Wavelength lambda,
                const dispersion::SellmeierModel& model) {
    const double n = dispersion::refractive_index(model, lambda);
    const double na = std::sqrt((n + spec.delta_n) * (n + spec.delta_n) - n * n);
    const double a = spec.core_diameter_m / 2.0;
    return 2.0 * std::numbers::pi * a / lambda.m() * na;
}

static double marcuse_width_factor(double v) {
    return 0.65 + 1.619 * std::pow(v, -1.5) + 2.879 * std::pow(v, -6.0);
}

double mfd_marcuse(const WaveguideSpec& spec, Wavelength lambda,
                   const dispersion::SellmeierModel& model) {
    const double v = v_number(spec, lambda, model);
    if (!(v > 0.8)) {
        std::ostringstream msg;
        msg << "V = " << v << " outside Marcuse fit validity (need V > 0.8)";
        throw std::domain_error(msg.str());
    }
    return spec.core_diameter_m * marcuse_width_factor(v);
}

StepIndexFit fit_step_index(std::span<const MfdSample> samples,
                            const dispersion::SellmeierModel& model) {
    if (samples.size() < 3)
        throw std::invalid_argument("fit_step_index needs >= 3 MFD samples");
    std::set<double> wavelengths;
    for (const auto& s : samples) {
        s.validate();
        wavelengths.insert(s.wavelength_nm);
    }
    if (wavelengths.size() < 3)
        throw std::invalid_argument("fit_step_index needs >= 3 distinct wavelengths");

    struct Point {
        Wavelength lambda;
        double mfd_m;
    };
    std::vector<Point> pts;
    for (const auto& s : samples)
        pts.push_back({Wavelength::from_nm(s.wavelength_nm),
                       0.5 * (s.mfd_x_um + s.mfd_y_um) * 1e-6});

    // Parameters are optimized in log space; the two scales differ by ~1e3.
    auto objective = [&](const std::vector<double>& x) {
        const double d = std::exp(x[0]);
        const double dn = std::exp(x[1]);
        if (!(dn > 0.0 && dn < 0.05)) return 1e6 * (1.0 + std::abs(x[1]));
        WaveguideSpec trial;
        trial.core_diameter_m = d;
        trial.delta_n = dn;
        double sse = 0.0;
        for (const auto& p : pts) {
            const double v = v_number(trial, p.lambda, model);
            if (!(v > 0.8)) return 1e6 * (1.0 + (0.8 - v));
            const double m = trial.core_diameter_m * marcuse_width_factor(v);
            sse += (m - p.mfd_m) * (m - p.mfd_m);
        }
        return sse / 1e-12;  // um^2 scale keeps the objective O(1)
    };

    const double d_starts[] = {3e-6, 6e-6, 12e-6};
    const double dn_starts[] = {1e-3, 4e-3, 1.6e-2};
    opt::SimplexOptions options;
    options.relative_tolerance = 1e-10;

    opt::SimplexResult best;
    best.fx = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (double d0 : d_starts) {
        for (double dn0 : dn_starts) {
            auto r = opt::nelder_mead(objective, {std::log(d0), std::log(dn0)}, 0.15, options);
            any_converged = any_converged || r.converged;
            if (r.fx < best.fx) best = r;
        }
    }
    const double n = static_cast<double>(pts.size());
    const double rms = std::sqrt(best.fx * 1e-12 / n);
    if (!any_converged || best.x.empty())
        throw FitError("fit_step_index did not converge",
                       {std::exp(best.x.empty() ? 0.0 : best.x[0]),
                        std::exp(best.x.empty() ? 0.0 : best.x[1])},
                       rms);
    return {std::exp(best.x[0]), std::exp(best.x[1]), rms};
}

double effective_length(double loss_db_per_cm, double length_m) {
    if (!(loss_db_per_cm >= 0.0)) throw std::domain_error("loss must be >= 0 dB/cm");
    if (!(length_m > 0.0)) throw std::domain_error("length must be > 0");
    if (loss_db_per_cm == 0.0) return length_m;
    const double alpha_per_m = loss_db_per_cm * std::numbers::ln10 / 10.0 * 100.0;
    return (1.0 - std::exp(-alpha_per_m * length_m)) / alpha_per_m;
}

double nonlinear_gamma(Wavelength lambda, double n2_m2_per_w, double mfd_m) {
    if (!(n2_m2_per_w >= 0.0)) throw std::domain_error("n2 must be >= 0");
    if (!(mfd_m > 0.0)) throw std::domain_error("MFD must be > 0");
    const double a_eff = std::numbers::pi * (mfd_m / 2.0) * (mfd_m / 2.0);
    return 2.0 * std::numbers::pi * n2_m2_per_w / (lambda.m() * a_eff);
}

}  // namespace sfwm::waveguide
