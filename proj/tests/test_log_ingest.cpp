#include "androcon/log_ingest.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "androcon/common.hpp"
#include "oracles.hpp"

using namespace androcon;

namespace {

const char* kHeader =
    "# Raw,utcTimeMillis,TimeNanos,Svid,ConstellationType,Cn0DbHz,"
    "PseudorangeRateMetersPerSecond,PseudorangeRateUncertaintyMetersPerSecond,"
    "ReceivedSvTimeUncertaintyNanos,AgcDb,State,AccumulatedDeltaRangeMeters,"
    "AccumulatedDeltaRangeUncertaintyMeters,BasebandCn0DbHz\n";

std::string raw_line(int64_t t, int sv, double cn0, const std::string& adrng = "12.5") {
    std::ostringstream os;
    os << "Raw," << t << ",100," << sv << ",1," << cn0
       << ",55.2,0.4,25,41.5,15," << adrng << "," << (adrng.empty() ? "" : "0.1")
       << "," << (cn0 - 1.0) << "\n";
    return os.str();
}

}  // namespace

TEST(ParseGnssLog, ValidLinesPlusComment) {
    std::string text = kHeader;
    text += "# some comment\n";
    text += raw_line(1000, 1, 45.0);
    text += raw_line(1000, 2, 44.0);
    text += raw_line(2000, 1, 43.0);
    std::istringstream in(text);
    auto result = parse_gnss_log(in);
    EXPECT_EQ(result.measurements.size(), 3u);
    EXPECT_EQ(result.diagnostics.skipped, 0u);
    EXPECT_EQ(result.diagnostics.raw_lines, 3u);
    EXPECT_TRUE(result.measurements[0].adrng.has_value());
    EXPECT_NEAR(*result.measurements[0].bb_cn0, 44.0, 1e-12);
}

TEST(ParseGnssLog, OutOfRangeCn0SkippedWithDiagnostic) {
    std::string text = kHeader + raw_line(1000, 1, 70.0) + raw_line(1000, 2, 45.0);
    std::istringstream in(text);
    auto result = parse_gnss_log(in);
    EXPECT_EQ(result.measurements.size(), 1u);
    ASSERT_EQ(result.diagnostics.skipped_lines.size(), 1u);
    EXPECT_EQ(result.diagnostics.skipped_lines[0].line_number, 2u);
    EXPECT_NE(result.diagnostics.skipped_lines[0].reason.find("OutOfRange"),
              std::string::npos);
}

TEST(ParseGnssLog, EmptyAdrngColumnBecomesAbsent) {
    std::string text = kHeader + raw_line(1000, 1, 45.0, "");
    std::istringstream in(text);
    auto result = parse_gnss_log(in);
    ASSERT_EQ(result.measurements.size(), 1u);
    EXPECT_FALSE(result.measurements[0].adrng.has_value());
}

TEST(ParseGnssLog, RawBeforeHeaderIsHeaderMissing) {
    std::istringstream in(raw_line(1000, 1, 45.0));
    try {
        parse_gnss_log(in);
        FAIL() << "expected HeaderMissing";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HeaderMissing);
    }
}

// Fuzz: arbitrary bytes never crash, and skipped+accepted accounts for every
// Raw line.
TEST(ParseGnssLog, FuzzArbitraryLines) {
    Rng rng(1234);
    std::string text = kHeader;
    size_t deliberate_raw = 0;
    for (int i = 0; i < 5000; ++i) {
        std::string line;
        if (rng.bernoulli(0.2)) {
            line = "Raw,";
            ++deliberate_raw;
        }
        size_t len = rng.uniform_int(60);
        for (size_t j = 0; j < len; ++j)
            line.push_back(static_cast<char>(rng.uniform_int(256)));
        // Keep injected newlines out so line accounting stays exact.
        for (auto& c : line)
            if (c == '\n' || c == '\r') c = ' ';
        text += line + "\n";
    }
    std::istringstream in(text);
    auto result = parse_gnss_log(in);
    EXPECT_EQ(result.diagnostics.accepted + result.diagnostics.skipped,
              result.diagnostics.raw_lines);
    EXPECT_GE(result.diagnostics.raw_lines, deliberate_raw);
}

TEST(EpochFeatures, MeanAcrossSatellites) {
    std::string text = kHeader + raw_line(1000, 1, 40.0) + raw_line(1000, 2, 44.0);
    std::istringstream in(text);
    auto epochs = group_into_epochs(parse_gnss_log(in).measurements);
    FeatureVector fv = epoch_features(epochs[0]);
    EXPECT_NEAR(fv.values[5], 42.0, 1e-12);  // cn0
}

TEST(EpochFeatures, MsecAmbiguousFraction) {
    std::vector<Measurement> ms;
    for (int sv = 1; sv <= 4; ++sv) {
        auto raw = FieldMap{{"utc_time_ms", 1000}, {"sv_id", double(sv)},
                            {"cn0", 40}, {"pr", 1}, {"pru", 0.1},
                            {"rec_sv_tu", 10}, {"agc", 40},
                            {"state", sv == 1 ? 16.0 : 0.0}};
        ms.push_back(validate_measurement(raw));
    }
    FeatureVector fv = epoch_features(group_into_epochs(ms)[0]);
    EXPECT_NEAR(fv.values[7], 0.25, 1e-12);
}

TEST(EpochFeatures, ZeroImputeWhenAllAbsent) {
    std::string text = kHeader + raw_line(1000, 1, 45.0, "") + raw_line(1000, 2, 44.0, "");
    std::istringstream in(text);
    auto epochs = group_into_epochs(parse_gnss_log(in).measurements);
    FeatureVector fv = epoch_features(epochs[0], ImputationPolicy::Zero);
    EXPECT_DOUBLE_EQ(fv.values[3], 0.0);
    EXPECT_TRUE(fv.imputed[3]);
    EXPECT_THROW(epoch_features(epochs[0], ImputationPolicy::Reject), Error);
}

// Permutation invariance: measurement order inside the epoch is irrelevant.
TEST(EpochFeatures, PermutationInvariant) {
    Rng rng(5);
    std::vector<Measurement> ms;
    for (int sv = 1; sv <= 8; ++sv) {
        FieldMap raw{{"utc_time_ms", 1000}, {"sv_id", double(sv)},
                     {"cn0", rng.uniform(20, 50)}, {"pr", rng.uniform(-200, 200)},
                     {"pru", rng.uniform(0, 2)}, {"rec_sv_tu", rng.uniform(5, 100)},
                     {"agc", rng.uniform(30, 50)}, {"state", rng.bernoulli(0.5) ? 16.0 : 0.0},
                     {"adrng", rng.uniform(-5, 5)}, {"adrng_u", rng.uniform(0, 1)}};
        ms.push_back(validate_measurement(raw));
    }
    Epoch e{1000, ms, 8};
    FeatureVector base = epoch_features(e);
    for (int trial = 0; trial < 10; ++trial) {
        rng.shuffle(e.measurements);
        FeatureVector shuffled = epoch_features(e);
        for (int j = 0; j < kFeatureCount; ++j)
            EXPECT_NEAR(shuffled.values[j], base.values[j], 1e-12) << j;
    }
}

TEST(CorrelationMatrix, DuplicatedFeatureFullyCorrelated) {
    LabeledDataset ds;
    ds.x.resize(50, 2);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        double v = rng.gaussian();
        ds.x(i, 0) = v;
        ds.x(i, 1) = v;
    }
    ds.labels.assign(50, 0);
    ds.class_names = {"a"};
    ds.feature_names = {"f0", "f1"};
    auto corr = correlation_matrix(ds);
    EXPECT_NEAR(corr.m(0, 1), 1.0, 1e-12);
}

TEST(CorrelationMatrix, IndependentColumnsNearZero) {
    LabeledDataset ds;
    const int n = 10000;
    ds.x.resize(n, 2);
    Rng rng(17);
    for (int i = 0; i < n; ++i) {
        ds.x(i, 0) = rng.gaussian();
        ds.x(i, 1) = rng.gaussian();
    }
    ds.labels.assign(n, 0);
    ds.class_names = {"a"};
    ds.feature_names = {"f0", "f1"};
    auto corr = correlation_matrix(ds);
    EXPECT_LT(std::abs(corr.m(0, 1)), 0.05);
}

TEST(CorrelationMatrix, MatchesBruteForceOracle) {
    Rng rng(11);
    const int n = 37, d = 5;
    LabeledDataset ds;
    ds.x.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) ds.x(i, j) = rng.uniform(-3, 3);
    ds.labels.assign(n, 0);
    ds.class_names = {"a"};
    auto corr = correlation_matrix(ds);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            std::vector<double> a, b;
            for (int r = 0; r < n; ++r) {
                a.push_back(ds.x(r, i));
                b.push_back(ds.x(r, j));
            }
            double expected = i == j ? 1.0 : oracle::pearson(a, b);
            EXPECT_NEAR(corr.m(i, j), expected, 1e-10);
        }
    }
    // Symmetry and range.
    EXPECT_LT((corr.m - corr.m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(corr.m.maxCoeff(), 1.0);
    EXPECT_GE(corr.m.minCoeff(), -1.0);
}

TEST(CorrelationMatrix, TooFewRows) {
    LabeledDataset ds;
    ds.x.resize(1, 3);
    ds.x.setZero();
    ds.labels = {0};
    ds.class_names = {"a"};
    EXPECT_THROW(correlation_matrix(ds), Error);
}

namespace {

LabeledDataset correlated_pair_dataset(double rho, int n, uint64_t seed) {
    LabeledDataset ds;
    ds.x.resize(n, 3);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        double z1 = rng.gaussian();
        double z2 = rng.gaussian();
        ds.x(i, 0) = z1;                                          // cn0-like
        ds.x(i, 1) = rho * z1 + std::sqrt(1 - rho * rho) * z2;    // bb_cn0-like
        ds.x(i, 2) = rng.gaussian();                              // unrelated
    }
    ds.labels.assign(n, 0);
    ds.class_names = {"a"};
    ds.feature_names = {"cn0", "bb_cn0", "agc"};
    return ds;
}

}  // namespace

TEST(DropCorrelated, DropsLaterMemberOfCorrelatedPair) {
    auto ds = correlated_pair_dataset(0.98, 5000, 21);
    auto corr = correlation_matrix(ds);
    EXPECT_NEAR(corr.m(0, 1), 0.98, 0.02);

    auto result = drop_correlated(ds, 0.95);
    ASSERT_EQ(result.dropped.size(), 1u);
    EXPECT_EQ(result.dropped[0], "bb_cn0");
    EXPECT_EQ(result.reduced.dims(), 2);
    EXPECT_EQ(result.reduced.feature_names[0], "cn0");
}

TEST(DropCorrelated, ThresholdOneKeepsNonDuplicates) {
    auto ds = correlated_pair_dataset(0.98, 1000, 22);
    auto result = drop_correlated(ds, 1.0);
    EXPECT_TRUE(result.dropped.empty());
}

TEST(DropCorrelated, ExactDuplicateDropped) {
    LabeledDataset ds;
    ds.x.resize(100, 2);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        ds.x(i, 0) = rng.gaussian();
        ds.x(i, 1) = ds.x(i, 0);
    }
    ds.labels.assign(100, 0);
    ds.class_names = {"a"};
    ds.feature_names = {"f0", "f1"};
    auto result = drop_correlated(ds, 1.0);
    ASSERT_EQ(result.dropped.size(), 1u);
    EXPECT_EQ(result.dropped[0], "f1");
}

TEST(DatasetCsv, RoundTrip) {
    auto ds = correlated_pair_dataset(0.5, 20, 4);
    ds.labels.assign(20, 0);
    for (int i = 10; i < 20; ++i) ds.labels[i] = 1;
    ds.class_names = {"open", "indoor"};
    std::string csv = dataset_to_csv(ds);
    std::istringstream in(csv);
    auto back = dataset_from_csv(in);
    ASSERT_EQ(back.rows(), ds.rows());
    ASSERT_EQ(back.dims(), ds.dims());
    EXPECT_EQ(back.class_names, ds.class_names);
    EXPECT_EQ(back.labels, ds.labels);
    EXPECT_LT((back.x - ds.x).cwiseAbs().maxCoeff(), 1e-7);  // 9 significant digits
    // A second serialization is byte-identical.
    EXPECT_EQ(dataset_to_csv(back), csv);
}
