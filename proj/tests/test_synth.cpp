#include "androcon/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "androcon/common.hpp"
#include "oracles.hpp"

using namespace androcon;

TEST(Pseudorange, ConsistentSkewMakesMethodsAgree) {
    SatelliteGeometry g;
    g.rx_pos = {1.0e6, 2.0e6, 6.0e6};
    g.sat_pos = g.rx_pos + Eigen::Vector3d(0.6e7, 0.3e7, 1.8e7);
    const double t_s = 0.0, t_r = 0.07;
    g.clock_skew = consistent_clock_skew(g, t_s, t_r);
    auto pr = pseudorange(g, t_s, t_r);
    EXPECT_LT(std::abs(pr.timing_m - pr.euclidean_m), 1e-6);
}

TEST(Pseudorange, ReceiverAtSatelliteIsZero) {
    SatelliteGeometry g;
    g.rx_pos = {1, 2, 3};
    g.sat_pos = {1, 2, 3};
    const double t_s = 5.0, t_r = 5.4;
    g.clock_skew = t_r - t_s;
    auto pr = pseudorange(g, t_s, t_r);
    EXPECT_DOUBLE_EQ(pr.timing_m, 0.0);
    EXPECT_DOUBLE_EQ(pr.euclidean_m, 0.0);
}

TEST(Pseudorange, MediumEarthOrbitScale) {
    SatelliteGeometry g;
    g.rx_pos = {0, 0, 6.371e6};
    g.sat_pos = {0, 0, 6.371e6 + 2.0e7};  // 20,000 km overhead
    g.clock_skew = consistent_clock_skew(g, 0.0, 0.07);
    auto pr = pseudorange(g, 0.0, 0.07);
    EXPECT_NEAR(pr.euclidean_m, 2.0e7, 1.0);
    EXPECT_NEAR(pr.timing_m, 2.0e7, 1.0);
}

TEST(Pseudorange, NegativeRangeRejected) {
    SatelliteGeometry g;
    g.rx_pos = {0, 0, 0};
    g.sat_pos = {1e7, 0, 0};
    g.clock_skew = 0.0;  // inconsistent: timing formula goes negative
    try {
        pseudorange(g, 0.0, 0.5);
        FAIL() << "expected NonPhysical";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPhysical);
    }
}

TEST(GenerateLabeledDataset, RowCountsExact) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 100;
    spec.seed = 7;
    auto synth = generate_labeled_dataset(spec);
    EXPECT_EQ(synth.dataset.rows(), 500);
    std::vector<int> counts(5, 0);
    for (int l : synth.dataset.labels) counts[static_cast<size_t>(l)]++;
    for (int c : counts) EXPECT_EQ(c, 100);
    EXPECT_EQ(synth.dataset.dims(), 9);  // bb_cn0 included
    EXPECT_EQ(synth.measurements.size(),
              500u * static_cast<size_t>(spec.satellites));
}

TEST(GenerateLabeledDataset, Cn0BbCn0CorrelationOnTarget) {
    // Generator-controlled check: two identical classes, no drift, so the
    // pooled correlation equals the within-class target.
    ScenarioSpec spec;
    ClassProfile a;
    a.name = "a";
    a.doppler_hz = {400, 100};
    a.carrier_phase_cycles = {50, 10};
    a.pru = {0.5, 0.1};
    a.rec_sv_tu = {20, 5};
    a.adrng_u = {0.1, 0.03};
    a.cn0 = {40, 4};
    a.rss = {40, 3};
    a.cn0_bbcn0_corr = 0.98;
    ClassProfile b = a;
    b.name = "b";
    spec.classes = {a, b};
    spec.epochs_per_class = 3000;
    spec.seed = 11;

    auto synth = generate_labeled_dataset(spec);
    std::vector<double> cn0, bb;
    int cn0_col = 5, bb_col = 6;
    EXPECT_EQ(synth.dataset.feature_names[static_cast<size_t>(cn0_col)], "cn0");
    EXPECT_EQ(synth.dataset.feature_names[static_cast<size_t>(bb_col)], "bb_cn0");
    for (Eigen::Index i = 0; i < synth.dataset.rows(); ++i) {
        cn0.push_back(synth.dataset.x(i, cn0_col));
        bb.push_back(synth.dataset.x(i, bb_col));
    }
    EXPECT_NEAR(oracle::pearson(cn0, bb), 0.98, 0.02);
}

TEST(GenerateLabeledDataset, AmbiguityFlagFractionsMatchSpec) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 500;
    spec.seed = 3;
    auto synth = generate_labeled_dataset(spec);
    const int frac_col = 8;  // msec_ambiguous_fraction
    for (size_t c = 0; c < spec.classes.size(); ++c) {
        double mean = 0.0;
        int n = 0;
        for (Eigen::Index i = 0; i < synth.dataset.rows(); ++i) {
            if (synth.dataset.labels[static_cast<size_t>(i)] != static_cast<int>(c)) continue;
            mean += synth.dataset.x(i, frac_col);
            ++n;
        }
        mean /= n;
        EXPECT_NEAR(mean, spec.classes[c].multipath_ambiguity_prob, 0.05)
            << spec.classes[c].name;
    }
}

TEST(GenerateLabeledDataset, MetroAdrngAbsentInRaw) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 5;
    spec.seed = 1;
    auto synth = generate_labeled_dataset(spec);
    int metro_label = -1;
    for (size_t c = 0; c < spec.classes.size(); ++c)
        if (spec.classes[c].name == "metro") metro_label = static_cast<int>(c);
    ASSERT_GE(metro_label, 0);
    bool saw_metro = false;
    size_t idx = 0;
    for (const auto& m : synth.measurements) {
        int label = static_cast<int>(idx++ / (5 * static_cast<size_t>(spec.satellites)));
        if (label == metro_label) {
            EXPECT_FALSE(m.adrng.has_value());
            saw_metro = true;
        }
    }
    EXPECT_TRUE(saw_metro);
}

// Sample means converge to spec means at the sigma/sqrt(n) rate (3-sigma bound).
TEST(GenerateLabeledDataset, MeansConvergeToProfile) {
    ScenarioSpec spec;
    ClassProfile a;
    a.name = "a";
    a.doppler_hz = {400, 100};
    a.carrier_phase_cycles = {50, 10};
    a.pru = {0.5, 0.1};
    a.rec_sv_tu = {20, 5};
    a.adrng_u = {0.1, 0.03};
    a.cn0 = {40, 4};
    a.rss = {40, 3};
    ClassProfile b = a;
    b.name = "b";
    b.cn0 = {30, 4};
    spec.classes = {a, b};
    spec.epochs_per_class = 2000;
    spec.satellites = 8;
    spec.seed = 21;

    auto synth = generate_labeled_dataset(spec);
    // cn0 column, class a: mean over n epochs of 8-satellite means.
    double mean = 0.0;
    int n = 0;
    for (Eigen::Index i = 0; i < synth.dataset.rows(); ++i) {
        if (synth.dataset.labels[static_cast<size_t>(i)] != 0) continue;
        mean += synth.dataset.x(i, 5);
        ++n;
    }
    mean /= n;
    const double se = 4.0 / std::sqrt(8.0 * n);  // satellite draws are iid
    EXPECT_NEAR(mean, 40.0, 3.0 * se);
}

TEST(GenerateLabeledDataset, DeterministicPerSeed) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 50;
    spec.seed = 99;
    auto a = generate_labeled_dataset(spec);
    auto b = generate_labeled_dataset(spec);
    EXPECT_EQ(a.raw_log, b.raw_log);
    EXPECT_EQ((a.dataset.x - b.dataset.x).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GenerateLabeledDataset, RawRoundTripReproducesFeatures) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 80;
    spec.seed = 13;
    auto synth = generate_labeled_dataset(spec);

    std::istringstream in(synth.raw_log);
    auto parsed = parse_gnss_log(in);
    EXPECT_EQ(parsed.diagnostics.skipped, 0u);
    EXPECT_EQ(parsed.measurements.size(), synth.measurements.size());

    BuildOptions opts;
    opts.include_bb_cn0 = true;
    auto epochs = group_into_epochs(parsed.measurements);
    auto rebuilt = build_dataset(epochs, synth.dataset.labels, synth.dataset.class_names, opts);

    ASSERT_EQ(rebuilt.rows(), synth.dataset.rows());
    for (Eigen::Index i = 0; i < rebuilt.rows(); ++i) {
        for (Eigen::Index j = 0; j < rebuilt.dims(); ++j) {
            double a = synth.dataset.x(i, j);
            double b = rebuilt.x(i, j);
            EXPECT_LE(std::abs(a - b), 1e-6 * std::max(1.0, std::abs(a))) << i << "," << j;
        }
    }
}

TEST(GenerateLabeledDataset, GeometriesConsistent) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.epochs_per_class = 2;
    spec.seed = 5;
    auto synth = generate_labeled_dataset(spec);
    ASSERT_EQ(synth.geometries.size(), static_cast<size_t>(spec.satellites));
    for (const auto& g : synth.geometries) {
        auto pr = pseudorange(g, 0.0, 0.07);
        EXPECT_LT(std::abs(pr.timing_m - pr.euclidean_m), 1e-6);
        EXPECT_NEAR(pr.euclidean_m, 2.0e7, 1.0e5);  // orbit-shell scale
    }
}

TEST(GenerateLabeledDataset, InvalidSpecRejected) {
    ScenarioSpec spec = ScenarioSpec::default_profile();
    spec.k_pr = 0.19;  // must be negative
    EXPECT_THROW(generate_labeled_dataset(spec), Error);

    spec = ScenarioSpec::default_profile();
    spec.classes[0].multipath_ambiguity_prob = 1.5;
    EXPECT_THROW(generate_labeled_dataset(spec), Error);

    spec = ScenarioSpec::default_profile();
    spec.classes.resize(1);
    EXPECT_THROW(generate_labeled_dataset(spec), Error);
}

TEST(GenerateTrajectories, NoiselessWalksLieOnCorridors) {
    LayoutSpec spec = LayoutSpec::default_layout();
    spec.noise_sigma = 0.0;
    spec.trajectory_count = 3;
    spec.seed = 4;
    auto synth = generate_trajectories(spec);
    ASSERT_EQ(synth.trajectories.size(), 3u);

    auto dist_to_layout = [&](const Eigen::Vector2d& p) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& corridor : spec.corridors) {
            for (size_t i = 0; i + 1 < corridor.size(); ++i) {
                Eigen::Vector2d a = corridor[i], b = corridor[i + 1], ab = b - a;
                double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
                best = std::min(best, (p - (a + t * ab)).norm());
            }
        }
        return best;
    };

    for (const auto& traj : synth.trajectories) {
        for (const auto& p : traj.points) {
            EXPECT_LT(dist_to_layout(p.xy), 1e-9);
            if (p.kind == PointKind::Alc) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& lm : spec.landmarks)
                    if (lm.cls == *p.landmark_class) best = std::min(best, (lm.xy - p.xy).norm());
                EXPECT_LT(best, 1e-9);  // exactly at a true landmark
            }
        }
    }
}

TEST(GenerateTrajectories, SharedLandmarksSatisfyAlignmentPrecondition) {
    LayoutSpec spec = LayoutSpec::default_layout();
    spec.noise_sigma = 1.0;
    spec.trajectory_count = 10;
    spec.seed = 7;
    auto synth = generate_trajectories(spec);
    // Every trajectory observes at least 2 landmark classes more than once.
    for (const auto& traj : synth.trajectories) {
        std::set<std::string> classes;
        for (const auto& p : traj.points)
            if (p.kind == PointKind::Alc) classes.insert(landmark_class_name(*p.landmark_class));
        EXPECT_GE(classes.size(), 2u) << traj.source_id;
    }
}

TEST(GenerateTrajectories, DeterministicPerSeed) {
    LayoutSpec spec = LayoutSpec::default_layout();
    spec.trajectory_count = 4;
    spec.seed = 31;
    spec.frame_jitter = true;
    auto a = generate_trajectories(spec);
    auto b = generate_trajectories(spec);
    EXPECT_EQ(trajectories_to_csv(a.trajectories), trajectories_to_csv(b.trajectories));
}

TEST(LayoutSpec, OffCorridorLandmarkRejected) {
    LayoutSpec spec = LayoutSpec::default_layout();
    spec.landmarks.push_back({LandmarkClass::Room, {50, 50}});
    EXPECT_THROW(spec.validate(), Error);
}
