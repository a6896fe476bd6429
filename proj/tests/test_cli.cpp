#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "sfwm/csv.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SFWM_CLI_PATH;
const std::string kScenario = std::string(SFWM_REPO_DIR) + "/scenarios/reference_device.json";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("sfwm_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
};

int run(const std::string& args, const fs::path& dir, const std::string& stderr_file = "") {
    std::string cmd = kCli + " " + args;
    if (!stderr_file.empty()) cmd += " 2>" + (dir / stderr_file).string();
    cmd += " >" + (dir / "stdout.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dispersion command emits index and wavenumber rows") {
    TempDir dir("dispersion");
    REQUIRE(run("dispersion --lambda-nm 587.6,830 --out-dir " + dir.path.string(), dir.path) ==
            0);
    const auto table = sfwm::csvio::read_numeric_csv((dir.path / "dispersion.csv").string());
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == doctest::Approx(1.45846).epsilon(1e-4));
    CHECK(fs::exists(dir.path / "dispersion.csv.meta.json"));
}

TEST_CASE("dispersion with an empty wavelength list is a header-only success") {
    TempDir dir("dispersion_empty");
    REQUIRE(run("dispersion --out-dir " + dir.path.string(), dir.path) == 0);
    const auto table = sfwm::csvio::read_numeric_csv((dir.path / "dispersion.csv").string());
    CHECK(table.header.size() == 3);
    CHECK(table.rows.empty());
}

TEST_CASE("dispersion outside the validity window exits 2 with the window named") {
    TempDir dir("dispersion_err");
    CHECK(run("dispersion --lambda-nm 100 --out-dir " + dir.path.string(), dir.path,
              "err.txt") == 2);
    const auto err = slurp(dir.path / "err.txt");
    CHECK(err.find("0.21") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path / "dispersion.csv"));
}

TEST_CASE("phasematch command writes one curve file per birefringence") {
    TempDir dir("phasematch");
    REQUIRE(run("phasematch --scenario " + kScenario + " --pump-min 950 --pump-max 965" +
                    " --out-dir " + dir.path.string(),
                dir.path) == 0);
    for (const char* name :
         {"phasematch_B1.000e-04.csv", "phasematch_B1.640e-04.csv",
          "phasematch_B2.500e-04.csv", "phasematch_B4.000e-04.csv"})
        CHECK(fs::exists(dir.path / name));

    const auto table =
        sfwm::csvio::read_numeric_csv((dir.path / "phasematch_B1.640e-04.csv").string());
    bool found = false;
    for (const auto& row : table.rows) {
        // every populated row satisfies energy conservation to 1e-12 /nm
        if (!std::isnan(row[1])) {
            CHECK(std::abs(2.0 / row[0] - 1.0 / row[1] - 1.0 / row[2]) < 1e-12);
        }
        if (row[0] == 957.0) {
            found = true;
            CHECK(row[1] == doctest::Approx(830.25).epsilon(1e-3));
            CHECK(row[2] == doctest::Approx(1129.42).epsilon(1e-3));
        }
    }
    CHECK(found);
}

TEST_CASE("phasematch with an empty list writes nothing and succeeds") {
    TempDir dir("phasematch_empty");
    REQUIRE(run("phasematch --scenario " + kScenario + " --b-list \"\" --out-dir " +
                    dir.path.string(),
                dir.path) == 0);
    int csvs = 0;
    for (const auto& e : fs::directory_iterator(dir.path))
        if (e.path().extension() == ".csv") ++csvs;
    CHECK(csvs == 0);
}

TEST_CASE("tuning command peaks at the calculated pump and is reproducible") {
    TempDir a("tuning_a");
    TempDir b("tuning_b");
    const std::string args = "tuning --scenario " + kScenario + " --step 0.2 --out-dir ";
    REQUIRE(run(args + a.path.string(), a.path) == 0);
    REQUIRE(run(args + b.path.string(), b.path) == 0);

    const auto table = sfwm::csvio::read_numeric_csv((a.path / "tuning.csv").string());
    double best_pump = 0.0, best = -1.0;
    for (const auto& row : table.rows) {
        if (row[1] > best) {
            best = row[1];
            best_pump = row[0];
        }
    }
    CHECK(best == 1.0);
    CHECK(std::abs(best_pump - 957.0) < 1.0);

    // artifacts are byte-identical across reruns; timestamps live in sidecars
    CHECK(slurp(a.path / "tuning.csv") == slurp(b.path / "tuning.csv"));
    CHECK(fs::exists(a.path / "tuning.csv.meta.json"));

    // provenance preamble: version, scenario hash, seed, coefficient echo
    const auto text = slurp(a.path / "tuning.csv");
    CHECK(text.find("# tool_version: 0.1.0") != std::string::npos);
    CHECK(text.find("# scenario_hash: ") != std::string::npos);
    CHECK(text.find("# seed: 20260811") != std::string::npos);
    CHECK(text.find("# sellmeier: ") != std::string::npos);
    const auto sidecar = nlohmann::json::parse(slurp(a.path / "tuning.csv.meta.json"));
    CHECK(sidecar.contains("timestamp"));
}

TEST_CASE("simulate is deterministic for a fixed seed") {
    TempDir a("simulate_a");
    TempDir b("simulate_b");
    const std::string args =
        "simulate --scenario " + kScenario + " --duration 0.00125 --mode cross --out-dir ";
    REQUIRE(run(args + a.path.string(), a.path) == 0);
    REQUIRE(run(args + b.path.string(), b.path) == 0);
    CHECK(slurp(a.path / "record_cross.json") == slurp(b.path / "record_cross.json"));

    const auto j = nlohmann::json::parse(slurp(a.path / "record_cross.json"));
    CHECK(j.at("seed").get<std::uint64_t>() == 20260811);
    CHECK(j.at("provenance").at("tool_version").get<std::string>() == "0.1.0");
    const auto summary = nlohmann::json::parse(slurp(a.path / "simulate_summary.json"));
    CHECK(summary.contains("g_si"));
}

TEST_CASE("simulate mode all emits the full estimator summary") {
    TempDir dir("simulate_all");
    REQUIRE(run("simulate --scenario " + kScenario +
                    " --duration 0.0125 --seed 7 --out-dir " + dir.path.string(),
                dir.path) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir.path / "simulate_summary.json"));
    for (const char* key : {"g_si", "g_ss", "g_ii", "schmidt_purity", "cauchy_schwarz"})
        CHECK(summary.contains(key));
    CHECK(fs::exists(dir.path / "record_self_idler.json"));
}

TEST_CASE("fit command round trips the tuning artifact") {
    TempDir dir("fit");
    REQUIRE(run("tuning --scenario " + kScenario + " --step 0.5 --out-dir " +
                    dir.path.string(),
                dir.path) == 0);
    REQUIRE(run("fit --scenario " + kScenario + " --data " +
                    (dir.path / "tuning.csv").string() + " --out-dir " + dir.path.string(),
                dir.path) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "fit_report.json"));
    CHECK(std::abs(j.at("birefringence").get<double>() / 1.64e-4 - 1.0) < 1e-3);
    CHECK(j.at("input").at("hash").get<std::string>().size() == 16);
}

TEST_CASE("fit rejects malformed CSV naming the line") {
    TempDir dir("fit_bad");
    {
        std::ofstream out(dir.path / "bad.csv");
        out << "pump_nm,normalized_counts\n945,0.5\n946,zzz\n";
    }
    CHECK(run("fit --scenario " + kScenario + " --data " + (dir.path / "bad.csv").string() +
                  " --out-dir " + dir.path.string(),
              dir.path, "err.txt") == 2);
    CHECK(slurp(dir.path / "err.txt").find("bad.csv") != std::string::npos);
}

TEST_CASE("fit reports a numerical failure for flat data") {
    TempDir dir("fit_flat");
    {
        std::ofstream out(dir.path / "flat.csv");
        out << "pump_nm,normalized_counts,uncertainty\n";
        for (int i = 0; i < 10; ++i)
            out << (945.0 + i) << ",0.5,0.05\n";
    }
    CHECK(run("fit --scenario " + kScenario + " --data " + (dir.path / "flat.csv").string() +
                  " --out-dir " + dir.path.string(),
              dir.path, "err.txt") == 3);
    CHECK(slurp(dir.path / "err.txt").find("uninformative") != std::string::npos);
}

TEST_CASE("klyshko command reproduces the published operating point") {
    TempDir dir("klyshko");
    REQUIRE(run("klyshko --singles-signal 40400 --singles-idler 44440 --coincidences 355.52"
                " --det-eff-signal 0.40 --det-eff-idler 0.08 --out-dir " +
                    dir.path.string(),
                dir.path) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "klyshko_report.json"));
    CHECK(j.at("coupling_signal").get<double>() == doctest::Approx(0.02).epsilon(1e-6));
    CHECK(j.at("coupling_idler").get<double>() == doctest::Approx(0.11).epsilon(1e-6));
    CHECK(j.at("internal_pair_rate_cps").get<double>() ==
          doctest::Approx(5.05e6).epsilon(1e-6));
    CHECK(j.at("internal_pair_rate_sigma_cps").get<double>() > 0.0);
}

TEST_CASE("report command flags the device's birefringence discrepancy") {
    TempDir dir("report");
    REQUIRE(run("report --out-dir " + dir.path.string(), dir.path) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "consistency_report.json"));
    CHECK(j.at("wavelength_trend_flag").get<bool>());
    CHECK(j.at("pairs").size() == 3);
}

TEST_CASE("output directory env var is honored") {
    TempDir dir("envdir");
    const std::string cmd = "SFWM_OUTPUT_DIR=" + dir.path.string() + " " + kCli +
                            " dispersion --lambda-nm 830 >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir.path / "dispersion.csv"));
}

TEST_CASE("help and usage errors") {
    TempDir dir("help");
    CHECK(run("--help", dir.path, "err.txt") == 0);
    CHECK(run("frobnicate", dir.path, "err.txt") == 2);
    CHECK(run("fit --scenario " + kScenario, dir.path, "err.txt") == 2);  // missing --data
}
