// Synthetic scenario generator: class-conditional GNSS parameter streams
// with pseudorange geometry, and corridor-layout trajectory walks with a
// ground-truth floor map. The desk-scale oracle for the whole pipeline.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "androcon/common.hpp"
#include "androcon/floormap.hpp"
#include "androcon/gnss_model.hpp"
#include "androcon/log_ingest.hpp"

namespace androcon {

// ---------------------------------------------------------------------------
// Pseudorange geometry
// ---------------------------------------------------------------------------

struct SatelliteGeometry {
    Eigen::Vector3d sat_pos = Eigen::Vector3d::Zero();
    Eigen::Vector3d rx_pos = Eigen::Vector3d::Zero();
    double clock_skew = 0.0;  // receiver clock skew, seconds
    static constexpr double kSpeedOfLight = 299792458.0;  // m/s
};

struct PseudorangeResult {
    double timing_m = 0.0;     // (t_s - t_r + skew) * c
    double euclidean_m = 0.0;  // straight-line satellite-receiver distance
};

/// Compute the pseudorange two ways: from send/receive timing plus clock
/// skew, and as the Euclidean distance. Both agree when the skew is
/// consistent with the geometry; generated scenarios cross-check that.
inline PseudorangeResult pseudorange(const SatelliteGeometry& g, double t_s, double t_r) {
    if (t_r < t_s - 1.0)
        throw Error(ErrorCode::InvalidArgument, "receive time precedes send time by > 1 s");
    PseudorangeResult out;
    out.timing_m = (t_s - t_r + g.clock_skew) * SatelliteGeometry::kSpeedOfLight;
    out.euclidean_m = (g.sat_pos - g.rx_pos).norm();
    if (out.timing_m < 0.0)
        throw Error(ErrorCode::NonPhysical, "negative pseudorange " + format_g9(out.timing_m));
    return out;
}

/// Clock skew that makes the timing pseudorange equal the geometric one.
inline double consistent_clock_skew(const SatelliteGeometry& g, double t_s, double t_r) {
    return (g.sat_pos - g.rx_pos).norm() / SatelliteGeometry::kSpeedOfLight + (t_r - t_s);
}

// ---------------------------------------------------------------------------
// Class-conditional measurement scenarios
// ---------------------------------------------------------------------------

struct Dist {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Per-class parameter distributions. All numeric defaults are invented
/// desk-scale stand-ins that encode the qualitative contrasts between
/// environments (open sky: strong stable signal, low uncertainty; enclosed
/// or crowded: weak fluctuating signal, multipath flags).
struct ClassProfile {
    std::string name;
    Dist doppler_hz;              // pr = -k_pr * doppler
    Dist carrier_phase_cycles;    // adrng = -k_adr * carrier phase
    Dist pru;
    Dist rec_sv_tu;
    Dist adrng_u;
    Dist cn0;
    Dist rss;                     // agc = a * rss + b
    double cn0_bbcn0_corr = 0.98;
    double bbcn0_offset = -1.0;   // baseband C/N0 sits slightly below antenna C/N0
    double multipath_ambiguity_prob = 0.1;
    bool adrng_absent = false;    // chipsets that never report ADRng
    double pr_sign_flip_prob = 0.0;  // per-epoch heading flips (flight)
    double drift_scale = 0.0;     // AR(1) drift sigma as a fraction of each feature sigma
    double drift_rho = 0.995;
    double burst_prob = 0.0;      // multipath burst: one epoch kicked by burst_sigmas
    double burst_sigmas = 4.0;
};

struct ScenarioSpec {
    std::string description;
    std::vector<ClassProfile> classes;
    int satellites = 16;
    int epochs_per_class = 1000;
    int64_t epoch_interval_ms = 1000;
    int64_t base_utc_ms = 1700000000000;
    double k_pr = -0.19;   // L1-wavelength-scale constant, overridable
    double k_adr = -0.19;
    double agc_slope = 1.0;    // agc = slope * rss + intercept
    double agc_intercept = 0.0;
    uint64_t seed = 0;

    void validate() const {
        if (classes.size() < 2)
            throw Error(ErrorCode::InvalidSpec, "scenario needs at least 2 classes");
        if (satellites < 1 || epochs_per_class < 1 || epoch_interval_ms < 1)
            throw Error(ErrorCode::InvalidSpec, "counts must be positive");
        if (!(k_pr < 0.0) || !(k_adr < 0.0))
            throw Error(ErrorCode::InvalidSpec, "gain constants k must be negative");
        for (const auto& c : classes) {
            for (const Dist* d : {&c.doppler_hz, &c.carrier_phase_cycles, &c.pru,
                                  &c.rec_sv_tu, &c.adrng_u, &c.cn0, &c.rss})
                if (d->sigma < 0.0)
                    throw Error(ErrorCode::InvalidSpec, "sigma must be >= 0 in " + c.name);
            for (double p : {c.multipath_ambiguity_prob, c.pr_sign_flip_prob, c.burst_prob})
                if (p < 0.0 || p > 1.0)
                    throw Error(ErrorCode::InvalidSpec, "probability out of [0,1] in " + c.name);
            if (!(std::abs(c.cn0_bbcn0_corr) <= 1.0))
                throw Error(ErrorCode::InvalidSpec, "cn0/bb_cn0 correlation out of [-1,1]");
        }
    }

    /// Five-environment default profile. The contrasts (not the numbers)
    /// come from how each setting distorts the signal: flight shows large
    /// alternating Doppler, the metro chipset hides ADRng entirely, enclosed
    /// spaces raise every uncertainty and the multipath flag rate.
    static ScenarioSpec default_profile();
};

inline ScenarioSpec ScenarioSpec::default_profile() {
    ScenarioSpec spec;
    spec.description =
        "Default five-environment scenario; class distributions are invented "
        "desk-scale values that encode qualitative contrasts only.";

    ClassProfile flight;
    flight.name = "flight";
    flight.doppler_hz = {2800, 320};
    flight.carrier_phase_cycles = {300, 55};
    flight.pru = {0.65, 0.2};
    flight.rec_sv_tu = {28, 8};
    flight.adrng_u = {0.15, 0.05};
    flight.cn0 = {42, 2.6};
    flight.rss = {42, 2.4};
    flight.multipath_ambiguity_prob = 0.08;
    flight.pr_sign_flip_prob = 0.5;
    flight.drift_scale = 0.4;

    ClassProfile indoor;
    indoor.name = "indoor";
    indoor.doppler_hz = {380, 210};
    indoor.carrier_phase_cycles = {44, 26};
    indoor.pru = {1.7, 0.45};
    indoor.rec_sv_tu = {75, 24};
    indoor.adrng_u = {0.55, 0.2};
    indoor.cn0 = {28, 4.0};
    indoor.rss = {37, 2.8};
    indoor.multipath_ambiguity_prob = 0.52;
    indoor.drift_scale = 0.4;

    ClassProfile metro;
    metro.name = "metro";
    metro.doppler_hz = {350, 270};
    metro.carrier_phase_cycles = {40, 35};  // unused: chipset hides ADRng
    metro.pru = {2.5, 0.7};
    metro.rec_sv_tu = {120, 40};
    metro.adrng_u = {0.8, 0.3};
    metro.cn0 = {22, 4.5};
    metro.rss = {28, 3.0};
    metro.multipath_ambiguity_prob = 0.78;
    metro.adrng_absent = true;
    metro.drift_scale = 0.4;

    ClassProfile open_ground;
    open_ground.name = "open_ground";
    open_ground.doppler_hz = {400, 120};
    open_ground.carrier_phase_cycles = {50, 12};
    open_ground.pru = {0.25, 0.08};
    open_ground.rec_sv_tu = {12, 4};
    open_ground.adrng_u = {0.05, 0.02};
    open_ground.cn0 = {46, 2.4};
    open_ground.rss = {46, 2.0};
    open_ground.multipath_ambiguity_prob = 0.03;
    open_ground.drift_scale = 0.4;

    ClassProfile crowd;
    crowd.name = "outdoor_crowd";
    crowd.doppler_hz = {390, 175};
    crowd.carrier_phase_cycles = {48, 20};
    crowd.pru = {0.95, 0.3};
    crowd.rec_sv_tu = {44, 14};
    crowd.adrng_u = {0.3, 0.1};
    crowd.cn0 = {37, 3.4};
    crowd.rss = {32, 2.6};
    crowd.multipath_ambiguity_prob = 0.22;
    crowd.drift_scale = 0.35;

    spec.classes = {flight, indoor, metro, open_ground, crowd};
    return spec;
}

inline void to_json(nlohmann::json& j, const Dist& d) {
    j = {{"mean", d.mean}, {"sigma", d.sigma}};
}
inline void from_json(const nlohmann::json& j, Dist& d) {
    d.mean = j.at("mean").get<double>();
    d.sigma = j.at("sigma").get<double>();
}

inline void to_json(nlohmann::json& j, const ClassProfile& c) {
    j = {{"name", c.name},
         {"doppler_hz", c.doppler_hz},
         {"carrier_phase_cycles", c.carrier_phase_cycles},
         {"pru", c.pru},
         {"rec_sv_tu", c.rec_sv_tu},
         {"adrng_u", c.adrng_u},
         {"cn0", c.cn0},
         {"rss", c.rss},
         {"cn0_bbcn0_corr", c.cn0_bbcn0_corr},
         {"bbcn0_offset", c.bbcn0_offset},
         {"multipath_ambiguity_prob", c.multipath_ambiguity_prob},
         {"adrng_absent", c.adrng_absent},
         {"pr_sign_flip_prob", c.pr_sign_flip_prob},
         {"drift_scale", c.drift_scale},
         {"drift_rho", c.drift_rho},
         {"burst_prob", c.burst_prob},
         {"burst_sigmas", c.burst_sigmas}};
}
inline void from_json(const nlohmann::json& j, ClassProfile& c) {
    c.name = j.at("name").get<std::string>();
    c.doppler_hz = j.at("doppler_hz").get<Dist>();
    c.carrier_phase_cycles = j.value("carrier_phase_cycles", c.carrier_phase_cycles);
    c.pru = j.at("pru").get<Dist>();
    c.rec_sv_tu = j.at("rec_sv_tu").get<Dist>();
    c.adrng_u = j.value("adrng_u", c.adrng_u);
    c.cn0 = j.at("cn0").get<Dist>();
    c.rss = j.at("rss").get<Dist>();
    c.cn0_bbcn0_corr = j.value("cn0_bbcn0_corr", c.cn0_bbcn0_corr);
    c.bbcn0_offset = j.value("bbcn0_offset", c.bbcn0_offset);
    c.multipath_ambiguity_prob = j.value("multipath_ambiguity_prob", c.multipath_ambiguity_prob);
    c.adrng_absent = j.value("adrng_absent", c.adrng_absent);
    c.pr_sign_flip_prob = j.value("pr_sign_flip_prob", c.pr_sign_flip_prob);
    c.drift_scale = j.value("drift_scale", c.drift_scale);
    c.drift_rho = j.value("drift_rho", c.drift_rho);
    c.burst_prob = j.value("burst_prob", c.burst_prob);
    c.burst_sigmas = j.value("burst_sigmas", c.burst_sigmas);
}

inline void to_json(nlohmann::json& j, const ScenarioSpec& s) {
    j = {{"type", "scenario"},
         {"description", s.description},
         {"classes", s.classes},
         {"satellites", s.satellites},
         {"epochs_per_class", s.epochs_per_class},
         {"epoch_interval_ms", s.epoch_interval_ms},
         {"base_utc_ms", s.base_utc_ms},
         {"k_pr", s.k_pr},
         {"k_adr", s.k_adr},
         {"agc_slope", s.agc_slope},
         {"agc_intercept", s.agc_intercept},
         {"seed", s.seed}};
}
inline void from_json(const nlohmann::json& j, ScenarioSpec& s) {
    s.description = j.value("description", "");
    s.classes = j.at("classes").get<std::vector<ClassProfile>>();
    s.satellites = j.value("satellites", s.satellites);
    s.epochs_per_class = j.value("epochs_per_class", s.epochs_per_class);
    s.epoch_interval_ms = j.value("epoch_interval_ms", s.epoch_interval_ms);
    s.base_utc_ms = j.value("base_utc_ms", s.base_utc_ms);
    s.k_pr = j.value("k_pr", s.k_pr);
    s.k_adr = j.value("k_adr", s.k_adr);
    s.agc_slope = j.value("agc_slope", s.agc_slope);
    s.agc_intercept = j.value("agc_intercept", s.agc_intercept);
    s.seed = j.value("seed", s.seed);
}

struct SynthDataset {
    LabeledDataset dataset;  // 9 features (bb_cn0 included), label per epoch
    std::string raw_log;     // GnssLogger-dialect text
    std::vector<Measurement> measurements;
    std::vector<SatelliteGeometry> geometries;  // one per satellite, skew-consistent
};

/// Generate a class-labeled measurement stream. Per epoch and satellite,
/// features are drawn from the class profile (with an AR(1) drift component
/// and the correlated cn0/bb_cn0 pair), the MSEC_AMBIGUOUS flag is set with
/// the class multipath probability, and both the GnssLogger raw text and the
/// per-epoch feature dataset are emitted. Deterministic per seed.
inline SynthDataset generate_labeled_dataset(const ScenarioSpec& spec) {
    spec.validate();
    SynthDataset out;

    // Static ring constellation at medium-earth-orbit altitude; the clock
    // skews are chosen consistent so both pseudorange routes agree.
    const double orbit_altitude = 2.0e7;
    const Eigen::Vector3d rx(1.0e6, 2.0e6, 6.0e6);
    for (int s = 0; s < spec.satellites; ++s) {
        SatelliteGeometry g;
        g.rx_pos = rx;
        double az = 2.0 * std::numbers::pi * s / spec.satellites;
        g.sat_pos = rx + orbit_altitude * Eigen::Vector3d(0.5 * std::cos(az),
                                                          0.5 * std::sin(az),
                                                          std::sqrt(0.75));
        const double t_s = 0.0, t_r = 0.07;
        g.clock_skew = consistent_clock_skew(g, t_s, t_r);
        out.geometries.push_back(g);
    }

    std::string raw = "# GnssLogger-style raw log (synthetic)\n";
    raw +=
        "# Raw,utcTimeMillis,TimeNanos,Svid,ConstellationType,Cn0DbHz,"
        "PseudorangeRateMetersPerSecond,PseudorangeRateUncertaintyMetersPerSecond,"
        "ReceivedSvTimeUncertaintyNanos,AgcDb,State,AccumulatedDeltaRangeMeters,"
        "AccumulatedDeltaRangeUncertaintyMeters,BasebandCn0DbHz\n";

    std::vector<int> epoch_labels;
    std::vector<std::string> class_names;
    int64_t global_epoch = 0;

    for (size_t c = 0; c < spec.classes.size(); ++c) {
        const ClassProfile& prof = spec.classes[c];
        class_names.push_back(prof.name);
        Rng rng(derive_seed(spec.seed, "scenario_class", c));

        // AR(1) drift state per drifting feature, clamped at two stationary
        // sigmas so environment variation stays bounded.
        double drift_cn0 = 0, drift_rss = 0, drift_pru = 0, drift_rec = 0, drift_dop = 0;
        auto advance_drift = [&](double& d, double sigma) {
            const double stationary = prof.drift_scale * sigma;
            d = prof.drift_rho * d +
                stationary * std::sqrt(1.0 - prof.drift_rho * prof.drift_rho) * rng.gaussian();
            d = std::clamp(d, -2.0 * stationary, 2.0 * stationary);
        };

        for (int e = 0; e < spec.epochs_per_class; ++e, ++global_epoch) {
            const int64_t utc = spec.base_utc_ms + global_epoch * spec.epoch_interval_ms;
            advance_drift(drift_cn0, prof.cn0.sigma);
            advance_drift(drift_rss, prof.rss.sigma);
            advance_drift(drift_pru, prof.pru.sigma);
            advance_drift(drift_rec, prof.rec_sv_tu.sigma);
            advance_drift(drift_dop, prof.doppler_hz.sigma);
            const double heading = rng.bernoulli(prof.pr_sign_flip_prob) ? -1.0 : 1.0;
            const double burst = rng.bernoulli(prof.burst_prob) ? prof.burst_sigmas : 0.0;

            for (int s = 0; s < spec.satellites; ++s) {
                Measurement m;
                m.utc_time_ms = utc;
                m.time_nanos = utc * 1000000;
                m.sv_id = s + 1;
                m.constellation = Constellation::Gps;

                double z1 = rng.gaussian();
                double z2 = rng.gaussian();
                double rho = prof.cn0_bbcn0_corr;
                double cn0_dev = prof.cn0.sigma * z1 + drift_cn0 + burst * prof.cn0.sigma *
                                                                       (rng.bernoulli(0.5) ? -1 : 1);
                m.cn0 = std::clamp(prof.cn0.mean + cn0_dev, 0.0, 63.0);
                double bb_dev = prof.cn0.sigma * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2) +
                                drift_cn0;
                m.bb_cn0 = std::clamp(prof.cn0.mean + prof.bbcn0_offset + bb_dev, 0.0, 63.0);

                double doppler = heading * (prof.doppler_hz.mean + drift_dop +
                                            prof.doppler_hz.sigma * rng.gaussian());
                m.pr = -spec.k_pr * doppler;
                m.pru = std::max(0.0, prof.pru.mean + drift_pru +
                                          prof.pru.sigma * rng.gaussian() +
                                          burst * prof.pru.sigma);
                m.rec_sv_tu = std::max(0.0, prof.rec_sv_tu.mean + drift_rec +
                                                prof.rec_sv_tu.sigma * rng.gaussian() +
                                                burst * prof.rec_sv_tu.sigma);
                if (!prof.adrng_absent) {
                    double phase = prof.carrier_phase_cycles.mean +
                                   prof.carrier_phase_cycles.sigma * rng.gaussian();
                    m.adrng = -spec.k_adr * phase;
                    m.adrng_u = std::max(0.0, prof.adrng_u.mean +
                                                  prof.adrng_u.sigma * rng.gaussian());
                }
                double rss = prof.rss.mean + drift_rss + prof.rss.sigma * rng.gaussian() -
                             burst * prof.rss.sigma;
                m.agc = spec.agc_slope * rss + spec.agc_intercept;
                m.state = StateFlag::kCodeLock | StateFlag::kBitSync |
                          StateFlag::kSubframeSync | StateFlag::kTowDecoded;
                if (rng.bernoulli(prof.multipath_ambiguity_prob))
                    m.state |= StateFlag::kMsecAmbiguous;

                raw += "Raw," + std::to_string(m.utc_time_ms) + "," +
                       std::to_string(m.time_nanos) + "," + std::to_string(m.sv_id) + ",1," +
                       format_g9(m.cn0) + "," + format_g9(m.pr) + "," + format_g9(m.pru) +
                       "," + format_g9(m.rec_sv_tu) + "," + format_g9(m.agc) + "," +
                       std::to_string(m.state) + ",";
                if (m.adrng) raw += format_g9(*m.adrng);
                raw += ",";
                if (m.adrng_u) raw += format_g9(*m.adrng_u);
                raw += "," + format_g9(*m.bb_cn0) + "\n";

                out.measurements.push_back(std::move(m));
            }
            epoch_labels.push_back(static_cast<int>(c));
        }
    }

    out.raw_log = std::move(raw);
    BuildOptions opts;
    opts.include_bb_cn0 = true;
    opts.policy = ImputationPolicy::DatasetMean;
    out.dataset = build_dataset(group_into_epochs(out.measurements), epoch_labels,
                                class_names, opts);
    return out;
}

// ---------------------------------------------------------------------------
// Floor-layout trajectory generation
// ---------------------------------------------------------------------------

struct LayoutSpec {
    std::vector<std::vector<Eigen::Vector2d>> corridors;  // walk circuits
    std::vector<FloorMap::Landmark> landmarks;
    int trajectory_count = 10;
    double noise_sigma = 1.0;    // per-axis Gaussian position noise, meters
    double step_m = 1.0;         // walk sampling interval along the corridor
    double sample_period_s = 1.0;
    int dwell_samples = 3;       // samples emitted while visiting a landmark
    double landmark_radius = 1.5;
    double min_walk_fraction = 0.9;  // walk length as a fraction of circuit length
    double max_walk_fraction = 1.3;
    bool frame_jitter = false;   // random per-trajectory rotation+translation
    double jitter_translation = 15.0;
    uint64_t seed = 0;

    void validate() const {
        if (corridors.empty() || corridors[0].size() < 2)
            throw Error(ErrorCode::InvalidSpec, "layout needs a corridor polyline");
        if (landmarks.empty())
            throw Error(ErrorCode::InvalidSpec, "layout needs landmarks");
        if (trajectory_count < 1)
            throw Error(ErrorCode::InvalidSpec, "trajectory_count must be positive");
        if (noise_sigma < 0 || step_m <= 0 || sample_period_s <= 0 || landmark_radius <= 0)
            throw Error(ErrorCode::InvalidSpec, "invalid layout geometry parameters");
        // Landmarks must sit on (or within a visit radius of) some corridor.
        for (const auto& lm : landmarks) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& corridor : corridors) {
                for (size_t i = 0; i + 1 < corridor.size(); ++i) {
                    Eigen::Vector2d a = corridor[i], b = corridor[i + 1];
                    Eigen::Vector2d ab = b - a;
                    double t = ab.squaredNorm() > 0
                                   ? std::clamp((lm.xy - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0)
                                   : 0.0;
                    best = std::min(best, (lm.xy - (a + t * ab)).norm());
                }
            }
            if (best > landmark_radius)
                throw Error(ErrorCode::InvalidSpec,
                            "landmark off-corridor by " + format_g9(best) + " m");
        }
    }

    /// Rectangular corridor loop (32 m x 24 m, mirroring a dormitory-scale
    /// floor) with lifts, stairs, rooms and corners along it.
    static LayoutSpec default_layout();
};

inline LayoutSpec LayoutSpec::default_layout() {
    LayoutSpec spec;
    spec.corridors = {{{0, 0}, {32, 0}, {32, 24}, {0, 24}, {0, 0}}};
    spec.landmarks = {
        {LandmarkClass::Corner, {0, 0}},
        {LandmarkClass::Lift, {12, 0}},
        {LandmarkClass::Room, {24, 0}},
        {LandmarkClass::Corner, {32, 0}},
        {LandmarkClass::Stairs, {32, 12}},
        {LandmarkClass::Corner, {32, 24}},
        {LandmarkClass::Room, {16, 24}},
        {LandmarkClass::Corner, {0, 24}},
        {LandmarkClass::Lift, {0, 12}},
    };
    return spec;
}

inline void to_json(nlohmann::json& j, const LayoutSpec& s) {
    nlohmann::json corridors = nlohmann::json::array();
    for (const auto& poly : s.corridors) {
        nlohmann::json p = nlohmann::json::array();
        for (const auto& v : poly) p.push_back({{"x", v.x()}, {"y", v.y()}});
        corridors.push_back(p);
    }
    nlohmann::json lms = nlohmann::json::array();
    for (const auto& lm : s.landmarks)
        lms.push_back({{"class", landmark_class_name(lm.cls)}, {"x", lm.xy.x()}, {"y", lm.xy.y()}});
    j = {{"type", "layout"},
         {"corridors", corridors},
         {"landmarks", lms},
         {"trajectory_count", s.trajectory_count},
         {"noise_sigma", s.noise_sigma},
         {"step_m", s.step_m},
         {"sample_period_s", s.sample_period_s},
         {"dwell_samples", s.dwell_samples},
         {"landmark_radius", s.landmark_radius},
         {"min_walk_fraction", s.min_walk_fraction},
         {"max_walk_fraction", s.max_walk_fraction},
         {"frame_jitter", s.frame_jitter},
         {"jitter_translation", s.jitter_translation},
         {"seed", s.seed}};
}
inline void from_json(const nlohmann::json& j, LayoutSpec& s) {
    s.corridors.clear();
    for (const auto& pj : j.at("corridors")) {
        std::vector<Eigen::Vector2d> poly;
        for (const auto& v : pj) poly.emplace_back(v.at("x").get<double>(), v.at("y").get<double>());
        s.corridors.push_back(std::move(poly));
    }
    s.landmarks.clear();
    for (const auto& lj : j.at("landmarks")) {
        std::string cls = lj.at("class").get<std::string>();
        std::optional<LandmarkClass> parsed;
        for (LandmarkClass c : {LandmarkClass::Lift, LandmarkClass::Stairs, LandmarkClass::Room,
                                LandmarkClass::Corner})
            if (cls == landmark_class_name(c)) parsed = c;
        if (!parsed) throw Error(ErrorCode::InvalidSpec, "unknown landmark class " + cls);
        s.landmarks.push_back(
            {*parsed, Eigen::Vector2d(lj.at("x").get<double>(), lj.at("y").get<double>())});
    }
    s.trajectory_count = j.value("trajectory_count", s.trajectory_count);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.step_m = j.value("step_m", s.step_m);
    s.sample_period_s = j.value("sample_period_s", s.sample_period_s);
    s.dwell_samples = j.value("dwell_samples", s.dwell_samples);
    s.landmark_radius = j.value("landmark_radius", s.landmark_radius);
    s.min_walk_fraction = j.value("min_walk_fraction", s.min_walk_fraction);
    s.max_walk_fraction = j.value("max_walk_fraction", s.max_walk_fraction);
    s.frame_jitter = j.value("frame_jitter", s.frame_jitter);
    s.jitter_translation = j.value("jitter_translation", s.jitter_translation);
    s.seed = j.value("seed", s.seed);
}

struct SynthTrajectories {
    std::vector<Trajectory> trajectories;
    FloorMap truth;
    std::vector<RigidTransform> applied_jitter;  // truth frame -> trajectory frame
};

namespace detail {

/// Arc-length parametrization of a polyline; closed loops wrap, open ones
/// ping-pong.
class CorridorWalk {
public:
    explicit CorridorWalk(const std::vector<Eigen::Vector2d>& poly) : poly_(poly) {
        lengths_.push_back(0.0);
        for (size_t i = 0; i + 1 < poly.size(); ++i)
            lengths_.push_back(lengths_.back() + (poly[i + 1] - poly[i]).norm());
        closed_ = (poly.front() - poly.back()).norm() < 1e-9;
    }

    double length() const { return lengths_.back(); }

    Eigen::Vector2d at(double s) const {
        const double total = length();
        if (closed_) {
            s = std::fmod(s, total);
            if (s < 0) s += total;
        } else {
            // Reflect: walk back and forth along the open polyline.
            double period = 2.0 * total;
            s = std::fmod(s, period);
            if (s < 0) s += period;
            if (s > total) s = period - s;
        }
        auto it = std::upper_bound(lengths_.begin(), lengths_.end(), s);
        size_t seg = std::min(poly_.size() - 2,
                              static_cast<size_t>(std::distance(lengths_.begin(), it)) - 1);
        double t = (s - lengths_[seg]) / std::max(lengths_[seg + 1] - lengths_[seg], 1e-12);
        return poly_[seg] + t * (poly_[seg + 1] - poly_[seg]);
    }

private:
    std::vector<Eigen::Vector2d> poly_;
    std::vector<double> lengths_;
    bool closed_ = false;
};

}  // namespace detail

/// Random walks along the corridor circuit with Gaussian position noise.
/// Ground-truth landmarks inject ALC activity labels when the walker passes
/// within the visit radius. Returns the truth map for GDM/SDM scoring.
inline SynthTrajectories generate_trajectories(const LayoutSpec& spec) {
    spec.validate();
    SynthTrajectories out;
    out.truth.landmarks = spec.landmarks;
    out.truth.paths = spec.corridors;
    out.truth.frame = "truth";

    for (int k = 0; k < spec.trajectory_count; ++k) {
        Rng rng(derive_seed(spec.seed, "trajectory", static_cast<uint64_t>(k)));
        const auto& corridor =
            spec.corridors[spec.corridors.size() == 1
                               ? 0
                               : static_cast<size_t>(rng.uniform_int(spec.corridors.size()))];
        detail::CorridorWalk walk(corridor);

        RigidTransform jitter;  // identity unless enabled
        if (spec.frame_jitter) {
            double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            Eigen::Vector2d t(rng.uniform(-spec.jitter_translation, spec.jitter_translation),
                              rng.uniform(-spec.jitter_translation, spec.jitter_translation));
            jitter = RigidTransform::rotation(angle, t);
        }

        const double start = rng.uniform(0.0, walk.length());
        const double direction = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double walk_len =
            rng.uniform(spec.min_walk_fraction, spec.max_walk_fraction) * walk.length();

        std::vector<TimedPosition> positions;
        std::vector<TimedActivity> activities;
        double t = 0.0;
        int last_landmark = -1;  // suppress repeat visits until the walker leaves
        for (double s = 0.0; s <= walk_len; s += spec.step_m, t += spec.sample_period_s) {
            Eigen::Vector2d true_pos = walk.at(start + direction * s);

            int visiting = -1;
            for (size_t lm = 0; lm < spec.landmarks.size(); ++lm) {
                if ((spec.landmarks[lm].xy - true_pos).norm() <= spec.landmark_radius) {
                    visiting = static_cast<int>(lm);
                    break;
                }
            }
            if (visiting >= 0 && visiting != last_landmark) {
                // Dwell at the landmark: a short burst of labeled samples.
                const auto& lm = spec.landmarks[static_cast<size_t>(visiting)];
                for (int d = 0; d < spec.dwell_samples; ++d, t += spec.sample_period_s) {
                    Eigen::Vector2d noisy =
                        lm.xy + spec.noise_sigma * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
                    positions.push_back({t, jitter.apply(noisy)});
                    activities.push_back({t, activity_from_landmark_class(lm.cls)});
                }
            }
            last_landmark = visiting;

            Eigen::Vector2d noisy =
                true_pos + spec.noise_sigma * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
            positions.push_back({t, jitter.apply(noisy)});
            activities.push_back({t, "walk"});
        }

        out.trajectories.push_back(landmark_trajectory(
            positions, activities, "traj" + std::to_string(k), LandmarkingOptions{}));
        out.applied_jitter.push_back(jitter);
    }
    return out;
}

}  // namespace androcon
