#include "sfwm/quantumstats.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace sfwm::quantumstats {

void DetectorModel::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    if (!(dead_time_s >= 0.0)) throw std::invalid_argument("dead time must be >= 0");
    if (!(dark_rate_hz >= 0.0)) throw std::invalid_argument("dark rate must be >= 0");
}

void PairSourceModel::validate() const {
    if (!(mean_pairs_per_pulse >= 0.0))
        throw std::invalid_argument("mean pairs per pulse must be >= 0");
    if (!(schmidt_modes >= 1.0)) throw std::invalid_argument("Schmidt mode number must be >= 1");
    if (!(rep_rate_hz > 0.0)) throw std::invalid_argument("repetition rate must be > 0");
    if (!(transmission_signal >= 0.0 && transmission_signal <= 1.0 &&
          transmission_idler >= 0.0 && transmission_idler <= 1.0))
        throw std::invalid_argument("arm transmissions must lie in [0, 1]");
    if (!(idler_mode_count >= 1.0))
        throw std::invalid_argument("idler mode count must be >= 1");
    if (!(idler_bandwidth_ratio >= 1.0))
        throw std::invalid_argument("idler bandwidth ratio must be >= 1");
}

const char* to_string(SimMode mode) {
    switch (mode) {
        case SimMode::cross: return "cross";
        case SimMode::self_signal: return "self_signal";
        case SimMode::self_idler: return "self_idler";
    }
    return "?";
}

SimMode sim_mode_from_string(const std::string& name) {
    if (name == "cross") return SimMode::cross;
    if (name == "self_signal") return SimMode::self_signal;
    if (name == "self_idler") return SimMode::self_idler;
    throw std::invalid_argument("unknown simulation mode: " + name);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t s) : eng(s) {}
    // uniform in (0, 1]; safe under log()
    double uniform() { return 1.0 - (eng() >> 11) * 0x1.0p-53; }
};

/// Mode means for an effective (possibly non-integer) Schmidt number:
/// m = floor(K) equal modes plus one smaller mode, with weights solving
/// sum w = 1 and sum w^2 = 1/K exactly.
std::vector<double> thermal_mode_means(double mu, double k_eff) {
    std::vector<double> means;
    if (!(mu > 0.0)) return means;
    int m = static_cast<int>(std::floor(k_eff + 1e-12));
    if (k_eff - m < 1e-9) {
        means.assign(m, mu / m);
        return means;
    }
    const double disc = 1.0 - (m + 1.0) * (1.0 - 1.0 / k_eff) / m;
    const double w = (1.0 + std::sqrt(disc)) / (m + 1.0);
    const double w_extra = 1.0 - m * w;
    means.assign(m, w * mu);
    if (w_extra > 1e-15) means.push_back(w_extra * mu);
    return means;
}

/// Distribution of the total photon number per pulse. The arms share the
/// per-pulse totals and every photon sees the same thinning probability, so
/// only the total matters: its pmf is the convolution of the per-mode
/// geometric distributions, tabulated once and sampled by CDF inversion
/// (one uniform per draw, usually answered at n = 1).
struct ModeSet {
    std::vector<double> cdf;  // cdf[n] = P(N <= n)
    double p_empty = 1.0;
    bool trivial = true;  // no occupied modes at all (mu = 0)

    explicit ModeSet(const std::vector<double>& means) {
        trivial = means.empty();
        if (trivial) return;
        std::vector<double> pmf{1.0};
        for (double mu : means) {
            const double q = mu / (1.0 + mu);
            std::vector<double> geom;
            double term = 1.0 - q, cum = 0.0;
            while (cum < 1.0 - 1e-17 && geom.size() < 4096) {
                geom.push_back(term);
                cum += term;
                term *= q;
            }
            std::vector<double> next(pmf.size() + geom.size() - 1, 0.0);
            for (std::size_t i = 0; i < pmf.size(); ++i)
                for (std::size_t j = 0; j < geom.size(); ++j) next[i + j] += pmf[i] * geom[j];
            pmf = std::move(next);
        }
        cdf.resize(pmf.size());
        double cum = 0.0;
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            cum += pmf[i];
            cdf[i] = cum;
        }
        cdf.back() = 1.0;  // absorb the ~1e-17 truncated tail
        p_empty = cdf[0];
    }

    std::uint32_t find(double u) const {
        for (std::size_t n = 0; n < cdf.size(); ++n)
            if (cdf[n] >= u) return static_cast<std::uint32_t>(n);
        return static_cast<std::uint32_t>(cdf.size() - 1);
    }

    std::uint32_t sample(Rng& rng) const { return find(rng.uniform()); }

    // total conditioned on at least one photon
    std::uint32_t sample_nonempty(Rng& rng) const {
        return find(p_empty + rng.uniform() * (1.0 - p_empty));
    }
};

double no_click_prob(std::uint32_t n, double p, double log1m_p) {
    if (n == 0) return 1.0;
    if (n == 1) return 1.0 - p;
    if (n == 2) return (1.0 - p) * (1.0 - p);
    return std::exp(n * log1m_p);
}

constexpr std::uint64_t kChunkPulses = 1'000'000;

/// Core pulse-train loop. Fixed-size chunks carry independent RNG streams
/// derived from the seed, so tallies merge by addition and are independent
/// of any chunk-level parallelization. Dead-time state resets at chunk
/// boundaries (worst case one extra click per detector per chunk).
template <class Visit>
void run_pulses(const PairSourceModel& src, const DetectorModel& det_a,
                const DetectorModel& det_b, std::uint64_t pulses, std::uint64_t seed,
                SimMode mode, Visit&& visit) {
    src.validate();
    det_a.validate();
    det_b.validate();

    const bool self = mode != SimMode::cross;
    double mu = src.mean_pairs_per_pulse;
    double k_eff = src.schmidt_modes;
    if (mode == SimMode::self_idler) {
        mu *= src.idler_bandwidth_ratio;
        k_eff = src.idler_mode_count;
    }
    const ModeSet modes{thermal_mode_means(mu, k_eff)};

    // In the self modes both splitter outputs carry copies of the measured
    // arm's detector.
    const DetectorModel& out_a = mode == SimMode::self_idler ? det_b : det_a;
    const DetectorModel& out_b = mode == SimMode::cross ? det_b : out_a;

    // per-photon registration probabilities
    double pa, pb;
    if (mode == SimMode::cross) {
        pa = src.transmission_signal * out_a.efficiency;
        pb = src.transmission_idler * out_b.efficiency;
    } else {
        const double t =
            mode == SimMode::self_signal ? src.transmission_signal : src.transmission_idler;
        pa = pb = t * out_a.efficiency / 2.0;  // arm split 50:50 onto two equal detectors
    }
    const double log1m_pa = std::log1p(-pa);
    const double log1m_pb = std::log1p(-pb);
    const double log1m_pab = self ? std::log1p(-(pa + pb)) : 0.0;

    const double p_dark_a = out_a.dark_rate_hz > 0.0
                                ? -std::expm1(-out_a.dark_rate_hz / src.rep_rate_hz)
                                : 0.0;
    const double p_dark_b = out_b.dark_rate_hz > 0.0
                                ? -std::expm1(-out_b.dark_rate_hz / src.rep_rate_hz)
                                : 0.0;
    const bool has_dark = p_dark_a > 0.0 || p_dark_b > 0.0;

    const std::uint64_t dead_pulses_a =
        static_cast<std::uint64_t>(std::floor(out_a.dead_time_s * src.rep_rate_hz));
    const std::uint64_t dead_pulses_b =
        static_cast<std::uint64_t>(std::floor(out_b.dead_time_s * src.rep_rate_hz));

    if (modes.trivial && !has_dark) return;  // empty source, silent detectors

    const double log_p_empty = modes.trivial ? 0.0 : std::log(modes.p_empty);

    for (std::uint64_t chunk_start = 0; chunk_start < pulses; chunk_start += kChunkPulses) {
        const std::uint64_t chunk_n = std::min(kChunkPulses, pulses - chunk_start);
        Rng rng(splitmix64(seed + 0x632BE59BD9B4E019ull * (chunk_start / kChunkPulses)));
        std::uint64_t next_live_a = 0, next_live_b = 0;

        std::uint64_t p = 0;
        while (p < chunk_n) {
            std::uint32_t n = 0;
            if (!has_dark) {
                // jump over the run of empty pulses (geometric, memoryless
                // so clamping at the chunk edge is exact)
                if (modes.p_empty < 1.0) {
                    const double gap = std::floor(std::log(rng.uniform()) / log_p_empty);
                    if (gap >= static_cast<double>(chunk_n - p)) break;
                    p += static_cast<std::uint64_t>(gap);
                    n = modes.sample_nonempty(rng);
                } else {
                    break;
                }
            } else {
                n = modes.trivial ? 0 : modes.sample(rng);
            }

            const bool live_a = p >= next_live_a;
            const bool live_b = p >= next_live_b;
            bool click_a = false, click_b = false;

            if (!self) {
                // arms see the same photon number; survivals independent
                if (live_a && n > 0) click_a = rng.uniform() > no_click_prob(n, pa, log1m_pa);
                if (live_b && n > 0) click_b = rng.uniform() > no_click_prob(n, pb, log1m_pb);
            } else if (n > 0 && (live_a || live_b)) {
                // 50:50 routing anti-correlates the outputs; sample the exact joint
                const double p_none_a = no_click_prob(n, pa, log1m_pa);
                const double p_none_ab = no_click_prob(n, pa + pb, pa + pb >= 1.0
                                                                      ? -700.0
                                                                      : log1m_pab);
                click_a = rng.uniform() > p_none_a;
                const double p_nb =
                    click_a ? (p_none_a - p_none_ab) / (1.0 - p_none_a)  // P(!b | a)
                            : p_none_ab / p_none_a;                      // P(!b | !a)
                click_b = rng.uniform() > p_nb;
                click_a = click_a && live_a;
                click_b = click_b && live_b;
            }

            if (has_dark) {
                if (live_a && !click_a && p_dark_a > 0.0) click_a = rng.uniform() <= p_dark_a;
                if (live_b && !click_b && p_dark_b > 0.0) click_b = rng.uniform() <= p_dark_b;
            }

            if (click_a) next_live_a = p + 1 + dead_pulses_a;
            if (click_b) next_live_b = p + 1 + dead_pulses_b;
            if (click_a || click_b) visit(chunk_start + p, click_a, click_b);
            ++p;
        }
    }
}

}  // namespace

CountingRecord simulate_counts(const PairSourceModel& src, const DetectorModel& det_s,
                               const DetectorModel& det_i, double duration_s,
                               std::uint64_t seed, SimMode mode) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be > 0");
    const double pulses_d = duration_s * src.rep_rate_hz;
    if (!(pulses_d >= 1e5))
        throw std::invalid_argument(
            "duration * rep_rate must cover at least 1e5 pulses for meaningful statistics");

    CountingRecord rec;
    rec.pulses = static_cast<std::uint64_t>(std::llround(pulses_d));
    rec.seed = seed;
    rec.mode = mode;
    run_pulses(src, det_s, det_i, rec.pulses, seed, mode,
               [&](std::uint64_t, bool a, bool b) {
                   if (a) ++rec.singles_s;
                   if (b) ++rec.singles_i;
                   if (a && b) {
                       if (mode == SimMode::cross)
                           ++rec.coincidences;
                       else
                           ++rec.split_coincidences;
                   }
               });
    return rec;
}

void scan_clicks(const PairSourceModel& src, const DetectorModel& det_s,
                 const DetectorModel& det_i, std::uint64_t pulses, std::uint64_t seed,
                 SimMode mode,
                 const std::function<void(std::uint64_t, bool, bool)>& visit) {
    run_pulses(src, det_s, det_i, pulses, seed, mode, visit);
}

namespace {

G2Estimate g2_from_tallies(std::uint64_t coinc, std::uint64_t pulses, std::uint64_t s_a,
                           std::uint64_t s_b) {
    if (s_a == 0 || s_b == 0)
        throw std::invalid_argument("g2 estimator needs nonzero singles in both channels");
    G2Estimate est;
    const double N = static_cast<double>(pulses);
    const double a = static_cast<double>(s_a);
    const double b = static_cast<double>(s_b);
    const double c = static_cast<double>(coinc);
    if (coinc == 0) {
        est.value = 0.0;
        est.std_error = N / (a * b);  // one-coincidence scale
        return est;
    }
    est.value = c * N / (a * b);
    est.std_error = est.value * std::sqrt(1.0 / c + 1.0 / a + 1.0 / b);
    return est;
}

}  // namespace

G2Estimate g2_cross(const CountingRecord& rec) {
    if (rec.mode != SimMode::cross)
        throw std::invalid_argument("g2_cross needs a record from cross mode");
    return g2_from_tallies(rec.coincidences, rec.pulses, rec.singles_s, rec.singles_i);
}

G2Estimate g2_self(const CountingRecord& rec) {
    if (rec.mode == SimMode::cross)
        throw std::invalid_argument("g2_self needs a record from a self mode");
    return g2_from_tallies(rec.split_coincidences, rec.pulses, rec.singles_s, rec.singles_i);
}

double purity_from_g2(double g_self) {
    if (!(g_self >= 1.0 && g_self <= 2.0))
        throw std::domain_error("non-thermal statistics: g_self outside [1, 2]");
    return g_self - 1.0;
}

CauchySchwarzResult cauchy_schwarz(const G2Estimate& gss, const G2Estimate& gii,
                                   const G2Estimate& gsi) {
    if (!(gss.value > 0.0 && gii.value > 0.0 && gsi.value > 0.0))
        throw std::invalid_argument("cauchy_schwarz needs positive g2 values");
    CauchySchwarzResult r;
    r.violation_ratio = gsi.value * gsi.value / (gss.value * gii.value);
    const double bound = std::sqrt(gss.value * gii.value);
    const double sigma_bound =
        0.5 / bound *
        std::sqrt(gii.value * gii.value * gss.std_error * gss.std_error +
                  gss.value * gss.value * gii.std_error * gii.std_error);
    const double num = gsi.value - bound;
    const double denom =
        std::sqrt(gsi.std_error * gsi.std_error + sigma_bound * sigma_bound);
    r.n_sigma = num == 0.0 ? 0.0 : num / denom;
    return r;
}

std::string record_to_json(const CountingRecord& rec, const PairSourceModel& src,
                           const DetectorModel& det_s, const DetectorModel& det_i) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(rec.mode);
    j["seed"] = rec.seed;
    j["pulses"] = rec.pulses;
    j["tallies"] = {{"singles_s", rec.singles_s},
                    {"singles_i", rec.singles_i},
                    {"coincidences", rec.coincidences},
                    {"split_coincidences", rec.split_coincidences}};
    j["source"] = {{"mean_pairs_per_pulse", src.mean_pairs_per_pulse},
                   {"schmidt_modes", src.schmidt_modes},
                   {"rep_rate_hz", src.rep_rate_hz},
                   {"transmission_signal", src.transmission_signal},
                   {"transmission_idler", src.transmission_idler},
                   {"idler_mode_count", src.idler_mode_count},
                   {"idler_bandwidth_ratio", src.idler_bandwidth_ratio}};
    auto det_json = [](const DetectorModel& d) {
        return nlohmann::ordered_json{{"label", d.label},
                                      {"efficiency", d.efficiency},
                                      {"dead_time_s", d.dead_time_s},
                                      {"dark_rate_hz", d.dark_rate_hz}};
    };
    j["detector_signal"] = det_json(det_s);
    j["detector_idler"] = det_json(det_i);
    return j.dump(2);
}

}  // namespace sfwm::quantumstats
