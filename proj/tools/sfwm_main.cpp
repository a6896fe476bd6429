// sfwm — design and verification toolkit for birefringent-waveguide SFWM
// photon-pair sources. Subcommands cover dispersion tables, phase-matching
// curves, tuning curves, Monte Carlo counting runs, birefringence fits,
// Klyshko analysis and the birefringence consistency report.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfwm/csv.hpp"
#include "sfwm/errors.hpp"
#include "sfwm/fit.hpp"
#include "sfwm/pairgen.hpp"
#include "sfwm/phasematch.hpp"
#include "sfwm/provenance.hpp"
#include "sfwm/quantumstats.hpp"
#include "sfwm/scenario.hpp"

namespace fs = std::filesystem;
using namespace sfwm;

namespace {

struct OutputContext {
    fs::path dir;
    std::string scenario_hash = "none";
    std::uint64_t seed = 0;
    std::string sellmeier_json;
};

fs::path resolve_out_dir(const std::string& flag_dir, const std::string& scenario_dir) {
    if (!flag_dir.empty()) return flag_dir;
    if (const char* env = std::getenv("SFWM_OUTPUT_DIR"); env && *env) return env;
    if (!scenario_dir.empty()) return scenario_dir;
    return ".";
}

std::ofstream open_artifact(const OutputContext& ctx, const std::string& name,
                            fs::path& path_out) {
    fs::create_directories(ctx.dir);
    path_out = ctx.dir / name;
    std::ofstream out(path_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path_out.string());
    return out;
}

void csv_preamble(std::ofstream& out, const OutputContext& ctx) {
    out << "# tool_version: " << kToolVersion << "\n";
    out << "# scenario_hash: " << ctx.scenario_hash << "\n";
    out << "# seed: " << ctx.seed << "\n";
    out << "# sellmeier: " << ctx.sellmeier_json << "\n";
}

nlohmann::ordered_json provenance_json(const OutputContext& ctx) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["scenario_hash"] = ctx.scenario_hash;
    j["seed"] = ctx.seed;
    j["sellmeier"] = nlohmann::json::parse(ctx.sellmeier_json);
    return j;
}

void finish_artifact(const fs::path& path) {
    write_timestamp_sidecar(path.string());
    std::cout << "wrote " << path.string() << "\n";
}

std::string format_b(double b) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", b);
    return buf;
}

// ---------------------------------------------------------------- dispersion

int cmd_dispersion(const std::vector<double>& lambdas_nm, const std::string& sellmeier_file,
                   const std::string& out_dir, const std::string& out_name) {
    const auto model = sellmeier_file.empty() ? dispersion::SellmeierModel::fused_silica()
                                              : dispersion::SellmeierModel::load(sellmeier_file);
    OutputContext ctx{resolve_out_dir(out_dir, ""), "none", 0, model.to_json()};

    // validate before opening the file so errors leave nothing behind
    struct Row {
        double nm, n, k;
    };
    std::vector<Row> rows;
    for (double nm : lambdas_nm) {
        const auto lambda = Wavelength::from_nm(nm);
        rows.push_back({nm, dispersion::refractive_index(model, lambda),
                        dispersion::wavenumber(model, lambda, 0.0)});
    }

    fs::path path;
    auto out = open_artifact(ctx, out_name, path);
    csv_preamble(out, ctx);
    out << "lambda_nm,n,k_rad_per_m\n";
    for (const auto& r : rows)
        out << csvio::format_double(r.nm) << "," << csvio::format_double(r.n) << ","
            << csvio::format_double(r.k) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

// ---------------------------------------------------------------- phasematch

int cmd_phasematch(const scenario::Scenario& sc, std::vector<double> b_list, double pump_lo,
                   double pump_hi, double step, bool include_spm,
                   const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, sc.outputs_dir), sc.file_hash, sc.seed,
                      sc.sellmeier.to_json()};
    const double gamma_p0 =
        include_spm ? sc.source.gamma_w_m * sc.source.pump.peak_power_w : 0.0;
    for (double b : b_list) {
        const auto curve =
            phasematch::phasematch_curve(sc.sellmeier, b, pump_lo, pump_hi, step, gamma_p0);
        fs::path path;
        auto out = open_artifact(ctx, "phasematch_B" + format_b(b) + ".csv", path);
        csv_preamble(out, ctx);
        out << "pump_nm,signal_nm,idler_nm,delta_k_rad_per_m,birefringence\n";
        for (const auto& s : curve) {
            out << csvio::format_double(s.pump_nm) << ",";
            if (s.point) {
                out << csvio::format_double(s.point->signal_nm) << ","
                    << csvio::format_double(s.point->idler_nm) << ","
                    << csvio::format_double(s.point->delta_k) << ",";
            } else {
                out << ",,,";  // gap row: no phase-matched pair at this pump
            }
            out << csvio::format_double(b) << "\n";
        }
        out.close();
        finish_artifact(path);
    }
    return 0;
}

// -------------------------------------------------------------------- tuning

int cmd_tuning(const scenario::Scenario& sc, std::optional<double> signal_nm, double pump_lo,
               double pump_hi, double step, const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, sc.outputs_dir), sc.file_hash, sc.seed,
                      sc.sellmeier.to_json()};
    if (sc.pump_loss_extrapolated)
        std::cerr << "warning: pump wavelength outside the loss table; "
                     "nearest-neighbor loss used for L_eff\n";
    const double sig = signal_nm.value_or(sc.signal_filter_center_nm);
    const auto curve = pairgen::tuning_curve(sc.source, sc.sellmeier,
                                             Wavelength::from_nm(sig), pump_lo, pump_hi, step);
    fs::path path;
    auto out = open_artifact(ctx, "tuning.csv", path);
    csv_preamble(out, ctx);
    out << "# signal_nm: " << csvio::format_double(sig) << "\n";
    out << "# effective_length_m: " << csvio::format_double(sc.source.effective_length_m)
        << "\n";
    out << "pump_nm,normalized_rate,delta_k\n";
    for (const auto& pt : curve)
        out << csvio::format_double(pt.pump_nm) << ","
            << csvio::format_double(pt.normalized_rate) << ","
            << csvio::format_double(pt.delta_k) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

// ------------------------------------------------------------------ simulate

nlohmann::ordered_json estimate_json(const quantumstats::G2Estimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}};
}

int cmd_simulate(const scenario::Scenario& sc, double duration_s, const std::string& mode_name,
                 std::optional<std::uint64_t> seed_flag, const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, sc.outputs_dir), sc.file_hash,
                      seed_flag.value_or(sc.seed), sc.sellmeier.to_json()};
    const std::uint64_t base_seed = ctx.seed;

    auto run = [&](quantumstats::SimMode mode, std::uint64_t seed) {
        const auto rec = quantumstats::simulate_counts(sc.pair_source, sc.detector_signal,
                                                       sc.detector_idler, duration_s, seed,
                                                       mode);
        fs::path path;
        auto out = open_artifact(
            ctx, std::string("record_") + quantumstats::to_string(mode) + ".json", path);
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(quantumstats::record_to_json(
            rec, sc.pair_source, sc.detector_signal, sc.detector_idler));
        j["provenance"] = provenance_json(ctx);
        out << j.dump(2) << "\n";
        out.close();
        finish_artifact(path);
        return rec;
    };

    nlohmann::ordered_json summary;
    summary["provenance"] = provenance_json(ctx);
    summary["duration_s"] = duration_s;

    if (mode_name == "all") {
        const auto rec_cross = run(quantumstats::SimMode::cross, base_seed);
        const auto rec_ss = run(quantumstats::SimMode::self_signal, base_seed + 1);
        const auto rec_ii = run(quantumstats::SimMode::self_idler, base_seed + 2);
        const auto gsi = quantumstats::g2_cross(rec_cross);
        const auto gss = quantumstats::g2_self(rec_ss);
        const auto gii = quantumstats::g2_self(rec_ii);
        summary["g_si"] = estimate_json(gsi);
        summary["g_ss"] = estimate_json(gss);
        summary["g_ii"] = estimate_json(gii);
        // derived quantities need populated estimators; short runs may not
        // accumulate any split coincidences
        if (gss.value >= 1.0 && gss.value <= 2.0)
            summary["schmidt_purity"] = quantumstats::purity_from_g2(gss.value);
        else
            summary["schmidt_purity"] = nullptr;
        if (gss.value > 0.0 && gii.value > 0.0 && gsi.value > 0.0) {
            const auto cs = quantumstats::cauchy_schwarz(gss, gii, gsi);
            summary["cauchy_schwarz"] = {{"violation_ratio", cs.violation_ratio},
                                         {"n_sigma", cs.n_sigma}};
        } else {
            summary["cauchy_schwarz"] = nullptr;
        }
    } else {
        const auto mode = quantumstats::sim_mode_from_string(mode_name);
        const auto rec = run(mode, base_seed);
        if (mode == quantumstats::SimMode::cross)
            summary["g_si"] = estimate_json(quantumstats::g2_cross(rec));
        else {
            const auto g = quantumstats::g2_self(rec);
            summary[mode == quantumstats::SimMode::self_signal ? "g_ss" : "g_ii"] =
                estimate_json(g);
        }
    }

    fs::path path;
    auto out = open_artifact(ctx, "simulate_summary.json", path);
    out << summary.dump(2) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

// ----------------------------------------------------------------------- fit

int cmd_fit(const scenario::Scenario& sc, const std::string& data_path,
            std::optional<double> signal_nm, bool float_leff, int bootstrap,
            std::uint64_t bootstrap_seed, const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, sc.outputs_dir), sc.file_hash, sc.seed,
                      sc.sellmeier.to_json()};
    if (sc.pump_loss_extrapolated)
        std::cerr << "warning: pump wavelength outside the loss table; "
                     "nearest-neighbor loss used for L_eff\n";
    const auto samples = fit::load_tuning_samples(data_path);
    fit::FitOptions options;
    options.float_effective_length = float_leff;
    options.bootstrap = bootstrap > 0;
    options.bootstrap_replicas = bootstrap;
    options.bootstrap_seed = bootstrap_seed;
    const double sig = signal_nm.value_or(sc.signal_filter_center_nm);
    const auto report = fit::fit_birefringence(samples, sc.sellmeier,
                                               Wavelength::from_nm(sig), sc.source, options);

    nlohmann::ordered_json j;
    j["provenance"] = provenance_json(ctx);
    j["input"] = {{"path", data_path},
                  {"hash", fnv1a64_hex(slurp_file(data_path))},
                  {"samples", samples.size()},
                  {"signal_nm", sig}};
    j["birefringence"] = report.birefringence;
    j["birefringence_sigma"] = report.birefringence_sigma;
    if (report.effective_length_m) {
        j["effective_length_m"] = *report.effective_length_m;
        j["effective_length_sigma"] = *report.effective_length_sigma;
    }
    if (report.bootstrap_sigma) j["bootstrap_sigma"] = *report.bootstrap_sigma;
    j["chi2"] = report.chi2;
    j["chi2_per_dof"] = report.chi2_per_dof;
    j["residuals"] = report.residuals;

    fs::path path;
    auto out = open_artifact(ctx, "fit_report.json", path);
    out << j.dump(2) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

// ------------------------------------------------------------------- klyshko

int cmd_klyshko(const pairgen::MeasuredCounts& m, double integration_time_s,
                const std::string& scenario_hash, std::uint64_t seed,
                const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, ""), scenario_hash, seed,
                      dispersion::SellmeierModel::fused_silica().to_json()};
    const auto r = pairgen::klyshko_analysis(m);

    // first-order Poisson propagation on the counted totals
    const double cs = m.singles_signal_cps * integration_time_s;
    const double ci = m.singles_idler_cps * integration_time_s;
    const double cc = m.coincidences_cps * integration_time_s;
    const double rel_ci = std::sqrt(1.0 / cc + 1.0 / cs);
    const double rel_cs = std::sqrt(1.0 / cc + 1.0 / ci);
    const double rel_rate = std::sqrt(1.0 / cc + 1.0 / cs + 1.0 / ci);

    nlohmann::ordered_json j;
    j["provenance"] = provenance_json(ctx);
    j["inputs"] = {{"singles_signal_cps", m.singles_signal_cps},
                   {"singles_idler_cps", m.singles_idler_cps},
                   {"coincidences_cps", m.coincidences_cps},
                   {"det_eff_signal", m.det_eff_signal},
                   {"det_eff_idler", m.det_eff_idler},
                   {"integration_time_s", integration_time_s}};
    j["coupling_signal"] = r.coupling_signal;
    j["coupling_signal_sigma"] = r.coupling_signal * rel_cs;
    j["coupling_idler"] = r.coupling_idler;
    j["coupling_idler_sigma"] = r.coupling_idler * rel_ci;
    j["internal_pair_rate_cps"] = r.internal_pair_rate_cps;
    j["internal_pair_rate_sigma_cps"] = r.internal_pair_rate_cps * rel_rate;

    fs::path path;
    auto out = open_artifact(ctx, "klyshko_report.json", path);
    out << j.dump(2) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

// -------------------------------------------------------------------- report

std::vector<fit::BirefringenceEstimate> default_estimates() {
    std::vector<fit::BirefringenceEstimate> v;
    v.push_back({"polarization_rotation", 1.8e-4, 0.3e-4, std::nullopt, 960.0});
    fit::BirefringenceEstimate classical;
    classical.label = "classical_fwm";
    classical.value = 2.015e-4;
    classical.interval = std::make_pair(1.9e-4, 2.13e-4);
    classical.wavelength_nm = 843.0;
    v.push_back(classical);
    v.push_back({"quantum_tuning", 1.64e-4, 0.0, std::nullopt, 957.0});
    return v;
}

std::vector<fit::BirefringenceEstimate> load_estimates(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad estimates JSON " + path + ": " + e.what());
    }
    std::vector<fit::BirefringenceEstimate> v;
    for (const auto& item : j) {
        fit::BirefringenceEstimate e;
        e.label = item.at("label").get<std::string>();
        e.value = item.at("value").get<double>();
        e.sigma = item.value("sigma", 0.0);
        if (item.contains("interval"))
            e.interval = std::make_pair(item["interval"][0].get<double>(),
                                        item["interval"][1].get<double>());
        if (item.contains("wavelength_nm"))
            e.wavelength_nm = item["wavelength_nm"].get<double>();
        v.push_back(e);
    }
    return v;
}

int cmd_report(const std::string& estimates_path, const std::string& out_dir) {
    OutputContext ctx{resolve_out_dir(out_dir, ""), "none", 0,
                      dispersion::SellmeierModel::fused_silica().to_json()};
    const auto estimates =
        estimates_path.empty() ? default_estimates() : load_estimates(estimates_path);
    const auto report = fit::birefringence_consistency_report(estimates);

    nlohmann::ordered_json j;
    j["provenance"] = provenance_json(ctx);
    j["estimates"] = nlohmann::ordered_json::array();
    for (const auto& e : estimates) {
        nlohmann::ordered_json ej;
        ej["label"] = e.label;
        ej["value"] = e.value;
        if (e.sigma > 0.0) ej["sigma"] = e.sigma;
        if (e.interval) ej["interval"] = {e.interval->first, e.interval->second};
        if (e.wavelength_nm) ej["wavelength_nm"] = *e.wavelength_nm;
        j["estimates"].push_back(ej);
    }
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs) {
        nlohmann::ordered_json pj;
        pj["a"] = p.label_a;
        pj["b"] = p.label_b;
        pj["intervals_overlap"] = p.intervals_overlap;
        if (p.z_score) pj["z_score"] = *p.z_score;
        j["pairs"].push_back(pj);
    }
    j["wavelength_trend_flag"] = report.wavelength_trend_flag;
    j["notes"] = report.notes;

    fs::path path;
    auto out = open_artifact(ctx, "consistency_report.json", path);
    out << j.dump(2) << "\n";
    out.close();
    finish_artifact(path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sfwm: birefringent-waveguide SFWM photon-pair source toolkit"};
    app.require_subcommand(1);
    std::string out_dir;

    // dispersion
    auto* disp = app.add_subcommand("dispersion", "refractive index and wavenumber table");
    std::vector<double> lambdas;
    std::string sellmeier_file, disp_out = "dispersion.csv";
    disp->add_option("--lambda-nm", lambdas, "wavelengths in nm")->delimiter(',');
    disp->add_option("--sellmeier", sellmeier_file, "Sellmeier coefficient JSON file");
    disp->add_option("--out", disp_out, "output CSV name");

    // shared scenario option for the scenario-bound subcommands
    std::string scenario_path;

    auto* pm = app.add_subcommand("phasematch", "phase-matching curves per birefringence");
    std::string b_list_arg = "1.0e-4,1.64e-4,2.5e-4,4.0e-4";
    double pm_lo = 900.0, pm_hi = 1000.0, pm_step = 1.0;
    bool include_spm = false;
    pm->add_option("--scenario", scenario_path, "scenario JSON")->required();
    pm->add_option("--b-list", b_list_arg,
                   "comma-separated birefringence values (empty for none)");
    pm->add_option("--pump-min", pm_lo, "pump range start, nm");
    pm->add_option("--pump-max", pm_hi, "pump range end, nm");
    pm->add_option("--step", pm_step, "pump step, nm");
    pm->add_flag("--include-spm", include_spm, "include the (2/3) gamma P0 term");

    auto* tu = app.add_subcommand("tuning", "normalized tuning curve at fixed signal");
    double tu_lo = 945.0, tu_hi = 970.0, tu_step = 0.1;
    std::optional<double> tu_signal;
    tu->add_option("--scenario", scenario_path, "scenario JSON")->required();
    tu->add_option("--signal-nm", tu_signal, "signal wavelength (default: filter center)");
    tu->add_option("--pump-min", tu_lo, "pump range start, nm");
    tu->add_option("--pump-max", tu_hi, "pump range end, nm");
    tu->add_option("--step", tu_step, "pump step, nm");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo counting run");
    double duration = 0.0;
    std::string mode = "all";
    std::optional<std::uint64_t> seed_flag;
    sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sim->add_option("--duration", duration, "simulated duration in seconds")->required();
    sim->add_option("--mode", mode, "cross | self_signal | self_idler | all");
    sim->add_option("--seed", seed_flag, "seed override (default: scenario seed)");

    auto* fit_cmd = app.add_subcommand("fit", "birefringence fit to tuning data");
    std::string data_path;
    std::optional<double> fit_signal;
    bool float_leff = false;
    int bootstrap = 0;
    std::uint64_t bootstrap_seed = 0;
    fit_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    fit_cmd->add_option("--data", data_path, "tuning samples CSV")->required();
    fit_cmd->add_option("--signal-nm", fit_signal, "signal wavelength (default: filter center)");
    fit_cmd->add_flag("--float-leff", float_leff, "also fit the effective length");
    fit_cmd->add_option("--bootstrap", bootstrap, "bootstrap replicas (0 = off)");
    fit_cmd->add_option("--bootstrap-seed", bootstrap_seed, "bootstrap RNG seed");

    auto* kly = app.add_subcommand("klyshko", "couplings and internal rate from counts");
    pairgen::MeasuredCounts counts;
    double integration = 1.0;
    kly->add_option("--singles-signal", counts.singles_signal_cps, "signal singles, counts/s")
        ->required();
    kly->add_option("--singles-idler", counts.singles_idler_cps, "idler singles, counts/s")
        ->required();
    kly->add_option("--coincidences", counts.coincidences_cps, "coincidences, counts/s")
        ->required();
    kly->add_option("--det-eff-signal", counts.det_eff_signal, "signal detector efficiency")
        ->required();
    kly->add_option("--det-eff-idler", counts.det_eff_idler, "idler detector efficiency")
        ->required();
    kly->add_option("--integration-time", integration, "integration time, s (for sigmas)");

    auto* rep = app.add_subcommand("report", "birefringence consistency report");
    std::string estimates_path;
    rep->add_option("--estimates", estimates_path,
                    "estimates JSON (default: built-in device estimates)");

    for (auto* sub : {disp, pm, tu, sim, fit_cmd, kly, rep})
        sub->add_option("--out-dir", out_dir,
                        "output directory (overrides SFWM_OUTPUT_DIR and the scenario)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (disp->parsed()) return cmd_dispersion(lambdas, sellmeier_file, out_dir, disp_out);
        if (pm->parsed()) {
            const auto sc = scenario::load_scenario(scenario_path);
            std::vector<double> b_list;
            std::stringstream ss(b_list_arg);
            std::string token;
            while (std::getline(ss, token, ',')) {
                if (token.empty()) continue;
                std::size_t pos = 0;
                const double b = std::stod(token, &pos);
                if (pos != token.size())
                    throw std::invalid_argument("bad birefringence value: " + token);
                b_list.push_back(b);
            }
            return cmd_phasematch(sc, b_list, pm_lo, pm_hi, pm_step, include_spm, out_dir);
        }
        if (tu->parsed()) {
            const auto sc = scenario::load_scenario(scenario_path);
            return cmd_tuning(sc, tu_signal, tu_lo, tu_hi, tu_step, out_dir);
        }
        if (sim->parsed()) {
            const auto sc = scenario::load_scenario(scenario_path);
            return cmd_simulate(sc, duration, mode, seed_flag, out_dir);
        }
        if (fit_cmd->parsed()) {
            const auto sc = scenario::load_scenario(scenario_path);
            return cmd_fit(sc, data_path, fit_signal, float_leff, bootstrap, bootstrap_seed,
                           out_dir);
        }
        if (kly->parsed()) return cmd_klyshko(counts, integration, "none", 0, out_dir);
        if (rep->parsed()) return cmd_report(estimates_path, out_dir);
    } catch (const FitError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
