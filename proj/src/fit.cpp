#include "sfwm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sfwm/csv.hpp"
#include "sfwm/errors.hpp"
#include "sfwm/optimize.hpp"

namespace sfwm::fit {

std::vector<TuningSample> load_tuning_samples(const std::string& csv_path,
                                              double default_uncertainty) {
    const auto table = csvio::read_numeric_csv(csv_path);
    const int cp = csvio::column(table, "pump_nm");
    int cc = csvio::column(table, "normalized_counts");
    if (cc < 0) cc = csvio::column(table, "normalized_rate");
    const int cu = csvio::column(table, "uncertainty");
    if (cp < 0 || cc < 0)
        throw std::invalid_argument(
            csv_path + ": need columns pump_nm and normalized_counts (or normalized_rate)");
    std::vector<TuningSample> samples;
    for (const auto& row : table.rows) {
        TuningSample s;
        s.pump_nm = row[cp];
        s.normalized_counts = row[cc];
        s.uncertainty = cu >= 0 ? row[cu] : default_uncertainty;
        samples.push_back(s);
    }
    return samples;
}

namespace {

void validate_samples(std::span<const TuningSample> samples) {
    if (samples.size() < 5)
        throw std::invalid_argument("fit needs >= 5 tuning samples across the central lobe");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].uncertainty > 0.0))
            throw std::invalid_argument("tuning sample uncertainties must be > 0");
        if (i > 0 && !(samples[i].pump_nm > samples[i - 1].pump_nm))
            throw std::invalid_argument("tuning sample pump grid must be strictly increasing");
    }
}

// model curve on the samples' pump grid, normalized to its peak there
std::vector<double> model_curve(std::span<const TuningSample> samples,
                                const dispersion::SellmeierModel& model, Wavelength signal,
                                const pairgen::SourceConfig& base, double birefringence,
                                double effective_length_m) {
    pairgen::SourceConfig cfg = base;
    cfg.birefringence = birefringence;
    cfg.effective_length_m = effective_length_m;
    std::vector<double> out;
    out.reserve(samples.size());
    double peak = 0.0;
    for (const auto& s : samples) {
        const auto pump = Wavelength::from_nm(s.pump_nm);
        const auto idler = dispersion::idler_from_energy_conservation(pump, signal);
        const double dk = phasematch::delta_k(model, pump, signal, idler, cfg.birefringence,
                                              cfg.gamma_w_m, cfg.pump.peak_power_w);
        const double x = dk * cfg.effective_length_m / 2.0;
        const double v = x == 0.0 ? 1.0 : std::sin(x) / x;
        out.push_back(v * v);
        peak = std::max(peak, out.back());
    }
    if (peak > 0.0)
        for (double& v : out) v /= peak;
    return out;
}

double chi2_of(std::span<const TuningSample> samples, const std::vector<double>& model) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = (samples[i].normalized_counts - model[i]) / samples[i].uncertainty;
        chi2 += r * r;
    }
    return chi2;
}

// Half-width of the chi^2 = chi2_min + 1 contour around b_hat on one side.
// Walks outward geometrically to bracket the crossing, then bisects.
double profile_halfwidth(const std::function<double(double)>& chi2, double b_hat,
                         double chi2_min, double direction, double box_lo, double box_hi) {
    const double limit = direction > 0 ? box_hi : box_lo;
    double step = std::max(1e-4 * b_hat, 1e-9);
    double prev = b_hat;
    double cur = b_hat;
    for (int i = 0; i < 200; ++i) {
        cur = b_hat + direction * step;
        if (direction > 0 ? cur >= limit : cur <= limit) {
            cur = limit;
            if (chi2(cur) - chi2_min < 1.0) return std::abs(cur - b_hat);  // contour open
            break;
        }
        if (chi2(cur) - chi2_min >= 1.0) break;
        prev = cur;
        step *= 2.0;
    }
    double lo = prev, hi = cur;
    for (int i = 0; i < 80 && std::abs(hi - lo) > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2(mid) - chi2_min >= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return std::abs(0.5 * (lo + hi) - b_hat);
}

}  // namespace

FitReport fit_birefringence(std::span<const TuningSample> samples,
                            const dispersion::SellmeierModel& model, Wavelength signal,
                            const pairgen::SourceConfig& cfg, const FitOptions& options) {
    validate_samples(samples);

    double lo_counts = samples[0].normalized_counts, hi_counts = lo_counts;
    double mean_sigma = 0.0;
    for (const auto& s : samples) {
        lo_counts = std::min(lo_counts, s.normalized_counts);
        hi_counts = std::max(hi_counts, s.normalized_counts);
        mean_sigma += s.uncertainty / double(samples.size());
    }
    if (hi_counts - lo_counts < std::max(1e-9, 0.5 * mean_sigma))
        throw FitError("uninformative data: tuning samples are flat", {}, 0.0);

    const double l_ref = cfg.effective_length_m;

    auto chi2_bl = [&](double b, double l) {
        return chi2_of(samples, model_curve(samples, model, signal, cfg, b, l));
    };

    FitReport report;
    double b_hat = 0.0, l_hat = l_ref;

    if (!options.float_effective_length) {
        auto chi2_b = [&](double b) { return chi2_bl(b, l_ref); };
        // coarse grid guards against side-lobe local minima, golden section polishes
        double best_b = options.b_lo, best_c = chi2_b(options.b_lo);
        const int grid = 60;
        for (int i = 1; i <= grid; ++i) {
            const double b = options.b_lo + (options.b_hi - options.b_lo) * i / grid;
            const double c = chi2_b(b);
            if (c < best_c) {
                best_c = c;
                best_b = b;
            }
        }
        const double span = (options.b_hi - options.b_lo) / grid;
        b_hat = opt::golden_section(chi2_b, std::max(options.b_lo, best_b - span),
                                    std::min(options.b_hi, best_b + span), 1e-12);
    } else {
        auto objective = [&](const std::vector<double>& x) {
            const double b = x[0] * 1e-4;  // keep both coordinates O(1)
            const double l = x[1] * l_ref;
            if (b < options.b_lo || b > options.b_hi || l <= 0.0 || l > 10.0 * l_ref)
                return 1e9;
            return chi2_bl(b, l);
        };
        opt::SimplexOptions sopt;
        sopt.relative_tolerance = 1e-10;
        opt::SimplexResult best;
        best.fx = std::numeric_limits<double>::infinity();
        bool converged = false;
        for (double b0 : {1.0, 1.64, 2.5}) {
            auto r = opt::nelder_mead(objective, {b0, 1.0}, 0.2, sopt);
            converged = converged || r.converged;
            if (r.fx < best.fx) best = r;
        }
        if (!converged)
            throw FitError("fit_birefringence simplex did not converge",
                           {best.x[0] * 1e-4, best.x[1] * l_ref}, best.fx);
        b_hat = best.x[0] * 1e-4;
        l_hat = best.x[1] * l_ref;
    }

    const double chi2_min = chi2_bl(b_hat, l_hat);

    // uncertainty from the +1 contour; when the effective length floats, it is
    // re-minimized at each trial B (profile likelihood) and vice versa
    auto chi2_profile_b = [&](double b) {
        if (!options.float_effective_length) return chi2_bl(b, l_ref);
        auto over_l = [&](double l) { return chi2_bl(b, l); };
        const double l_opt = opt::golden_section(over_l, 0.25 * l_ref, 4.0 * l_ref, 1e-9);
        return chi2_bl(b, l_opt);
    };
    const double up = profile_halfwidth(chi2_profile_b, b_hat, chi2_min, +1.0, options.b_lo,
                                        options.b_hi);
    const double down = profile_halfwidth(chi2_profile_b, b_hat, chi2_min, -1.0, options.b_lo,
                                          options.b_hi);
    report.birefringence = b_hat;
    report.birefringence_sigma = 0.5 * (up + down);

    if (options.float_effective_length) {
        auto chi2_profile_l = [&](double l) {
            auto over_b = [&](double b) { return chi2_bl(b, l); };
            const double b_opt = opt::golden_section(over_b, options.b_lo, options.b_hi, 1e-12);
            return chi2_bl(b_opt, l);
        };
        const double lu =
            profile_halfwidth(chi2_profile_l, l_hat, chi2_min, +1.0, 0.25 * l_ref, 4.0 * l_ref);
        const double ld =
            profile_halfwidth(chi2_profile_l, l_hat, chi2_min, -1.0, 0.25 * l_ref, 4.0 * l_ref);
        report.effective_length_m = l_hat;
        report.effective_length_sigma = 0.5 * (lu + ld);
    }

    const auto best_model = model_curve(samples, model, signal, cfg, b_hat, l_hat);
    for (std::size_t i = 0; i < samples.size(); ++i)
        report.residuals.push_back(samples[i].normalized_counts - best_model[i]);
    report.chi2 = chi2_min;
    const int dof =
        static_cast<int>(samples.size()) - (options.float_effective_length ? 2 : 1);
    report.chi2_per_dof = dof > 0 ? chi2_min / dof : 0.0;

    if (options.bootstrap) {
        std::mt19937_64 eng(options.bootstrap_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> replicas;
        std::vector<TuningSample> resampled(samples.begin(), samples.end());
        for (int r = 0; r < options.bootstrap_replicas; ++r) {
            for (std::size_t i = 0; i < resampled.size(); ++i)
                resampled[i].normalized_counts =
                    best_model[i] + samples[i].uncertainty * gauss(eng);
            auto chi2_b = [&](double b) {
                return chi2_of(resampled,
                               model_curve(resampled, model, signal, cfg, b, l_hat));
            };
            replicas.push_back(
                opt::golden_section(chi2_b, options.b_lo, options.b_hi, 1e-11));
        }
        double mean = 0.0;
        for (double v : replicas) mean += v / replicas.size();
        double var = 0.0;
        for (double v : replicas) var += (v - mean) * (v - mean) / (replicas.size() - 1);
        report.bootstrap_sigma = std::sqrt(var);
    }
    return report;
}

std::pair<double, double> BirefringenceEstimate::as_interval() const {
    if (interval) return *interval;
    return {value - sigma, value + sigma};
}

ConsistencyReport birefringence_consistency_report(
    std::span<const BirefringenceEstimate> estimates) {
    if (estimates.size() < 2)
        throw std::invalid_argument("consistency report needs >= 2 estimates");
    ConsistencyReport report;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        for (std::size_t j = i + 1; j < estimates.size(); ++j) {
            const auto& a = estimates[i];
            const auto& b = estimates[j];
            const auto ia = a.as_interval();
            const auto ib = b.as_interval();
            PairCompatibility pc;
            pc.label_a = a.label;
            pc.label_b = b.label;
            pc.intervals_overlap = ia.first <= ib.second && ib.first <= ia.second;
            if (a.sigma > 0.0 && b.sigma > 0.0)
                pc.z_score = std::abs(a.value - b.value) /
                             std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma);
            if (!pc.intervals_overlap) {
                std::ostringstream note;
                note << "estimates '" << a.label << "' and '" << b.label
                     << "' are incompatible (disjoint intervals";
                if (pc.z_score) note << ", z = " << *pc.z_score;
                note << ")";
                report.notes.push_back(note.str());
            }
            // wavelength-dependence hypothesis: the longer-wavelength estimate
            // sits strictly below the shorter-wavelength one
            if (a.wavelength_nm && b.wavelength_nm) {
                const auto& shorter = *a.wavelength_nm <= *b.wavelength_nm ? a : b;
                const auto& longer = *a.wavelength_nm <= *b.wavelength_nm ? b : a;
                if (longer.as_interval().second < shorter.as_interval().first) {
                    report.wavelength_trend_flag = true;
                    std::ostringstream note;
                    note << "'" << longer.label << "' (" << *longer.wavelength_nm
                         << " nm) sits below '" << shorter.label << "' ("
                         << *shorter.wavelength_nm
                         << " nm): consistent with birefringence decreasing with wavelength";
                    report.notes.push_back(note.str());
                }
            }
            report.pairs.push_back(std::move(pc));
        }
    }
    return report;
}

}  // namespace sfwm::fit
