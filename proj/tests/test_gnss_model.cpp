#include "androcon/gnss_model.hpp"

#include <gtest/gtest.h>

#include "androcon/common.hpp"

using namespace androcon;

namespace {

FieldMap minimal_raw() {
    return {
        {"utc_time_ms", 1700000000000.0}, {"sv_id", 12}, {"constellation", 1},
        {"cn0", 45.0},  {"pr", 120.5},    {"pru", 0.4},
        {"rec_sv_tu", 25.0}, {"agc", 41.0}, {"state", 15},
    };
}

}  // namespace

TEST(ValidateMeasurement, AcceptsMidRangeValues) {
    Measurement m = validate_measurement(minimal_raw());
    EXPECT_EQ(m.sv_id, 12);
    EXPECT_DOUBLE_EQ(m.cn0, 45.0);
    EXPECT_FALSE(m.adrng.has_value());
    EXPECT_FALSE(m.bb_cn0.has_value());
}

TEST(ValidateMeasurement, RejectsCn0AboveRange) {
    auto raw = minimal_raw();
    raw["cn0"] = 64.0;
    try {
        validate_measurement(raw);
        FAIL() << "expected OutOfRange";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
        EXPECT_NE(std::string(e.what()).find("cn0"), std::string::npos);
    }
}

TEST(ValidateMeasurement, AcceptsAbsentAdrng) {
    // Snapdragon-style log: ADRng not retrievable.
    Measurement m = validate_measurement(minimal_raw());
    EXPECT_FALSE(m.adrng.has_value());
    EXPECT_FALSE(m.adrng_u.has_value());
}

TEST(ValidateMeasurement, MissingRequiredField) {
    auto raw = minimal_raw();
    raw.erase("pru");
    try {
        validate_measurement(raw);
        FAIL() << "expected MissingField";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingField);
    }
}

TEST(ValidateMeasurement, RejectsNegativeUncertainties) {
    for (const char* field : {"pru", "rec_sv_tu", "adrng_u"}) {
        auto raw = minimal_raw();
        raw[field] = -1.0;
        EXPECT_THROW(validate_measurement(raw), Error) << field;
    }
}

// Totality: every field map yields either a Measurement or a typed Error.
TEST(ValidateMeasurement, TotalOverRandomFieldMaps) {
    Rng rng(99);
    const std::vector<std::string> keys = {"utc_time_ms", "sv_id", "constellation",
                                           "cn0",  "pr",    "pru",  "rec_sv_tu",
                                           "adrng", "adrng_u", "bb_cn0", "agc", "state"};
    for (int trial = 0; trial < 2000; ++trial) {
        FieldMap raw;
        for (const auto& k : keys)
            if (rng.bernoulli(0.8)) raw[k] = rng.uniform(-100.0, 2e12);
        try {
            (void)validate_measurement(raw);
        } catch (const Error&) {
            // typed rejection is the other legal outcome
        }
    }
}

TEST(StateFlags, MsecAmbiguousBit) {
    EXPECT_TRUE(state_has_flag(16, StateFlag::kMsecAmbiguous));
    EXPECT_FALSE(state_has_flag(0, StateFlag::kMsecAmbiguous));
    EXPECT_TRUE(state_has_flag(17, StateFlag::kMsecAmbiguous));
}

TEST(StateFlags, FlagsAreDistinctPowersOfTwo) {
    const uint32_t flags[] = {StateFlag::kCodeLock,     StateFlag::kBitSync,
                              StateFlag::kSubframeSync, StateFlag::kTowDecoded,
                              StateFlag::kMsecAmbiguous, StateFlag::kSymbolSync};
    uint32_t seen = 0;
    for (uint32_t f : flags) {
        EXPECT_EQ(f & (f - 1), 0u) << f;  // power of two
        EXPECT_EQ(seen & f, 0u) << f;     // distinct
        seen |= f;
    }
}

// state_has_flag(s, f) implies state_has_flag(s | f, f) for all s.
TEST(StateFlags, SettingABitMakesItVisible) {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        uint32_t s = static_cast<uint32_t>(rng.next_u64());
        EXPECT_TRUE(state_has_flag(s | StateFlag::kMsecAmbiguous, StateFlag::kMsecAmbiguous));
    }
}

namespace {

Measurement make_measurement(int64_t t, int sv) {
    auto raw = minimal_raw();
    raw["utc_time_ms"] = static_cast<double>(t);
    raw["sv_id"] = sv;
    return validate_measurement(raw);
}

}  // namespace

TEST(GroupIntoEpochs, PartitionsByTimestamp) {
    std::vector<Measurement> ms;
    for (int sv = 1; sv <= 3; ++sv) ms.push_back(make_measurement(1000, sv));
    for (int sv = 1; sv <= 3; ++sv) ms.push_back(make_measurement(2000, sv));
    auto epochs = group_into_epochs(ms);
    ASSERT_EQ(epochs.size(), 2u);
    EXPECT_EQ(epochs[0].measurements.size(), 3u);
    EXPECT_EQ(epochs[1].measurements.size(), 3u);
    EXPECT_EQ(epochs[0].unique_sv_count, 3);
}

TEST(GroupIntoEpochs, SingleMeasurement) {
    auto epochs = group_into_epochs({make_measurement(1000, 5)});
    ASSERT_EQ(epochs.size(), 1u);
    EXPECT_EQ(epochs[0].unique_sv_count, 1);
}

TEST(GroupIntoEpochs, EmptyInputRejected) {
    EXPECT_THROW(group_into_epochs({}), Error);
}

// Unsorted input produces the same epochs as a sort-then-group oracle.
TEST(GroupIntoEpochs, UnsortedMatchesSortedOracle) {
    Rng rng(31);
    std::vector<Measurement> ms;
    for (int i = 0; i < 200; ++i) {
        int64_t t = 1000 + 1000 * static_cast<int64_t>(rng.uniform_int(20));
        ms.push_back(make_measurement(t, 1 + static_cast<int>(rng.uniform_int(28))));
    }
    std::vector<Measurement> sorted = ms;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Measurement& a, const Measurement& b) {
                         return a.utc_time_ms < b.utc_time_ms;
                     });

    auto got = group_into_epochs(ms);
    auto expected = group_into_epochs(sorted);
    ASSERT_EQ(got.size(), expected.size());
    size_t total = 0;
    for (size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].utc_time_ms, expected[i].utc_time_ms);
        EXPECT_EQ(got[i].measurements.size(), expected[i].measurements.size());
        EXPECT_EQ(got[i].unique_sv_count, expected[i].unique_sv_count);
        total += got[i].measurements.size();
    }
    EXPECT_EQ(total, ms.size());  // partition conserves counts
}
