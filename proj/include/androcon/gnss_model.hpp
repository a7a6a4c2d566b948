// Domain model for semi-processed GNSS measurements: the per-satellite
// observation record, sync-state flags and epoch grouping.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "androcon/common.hpp"

namespace androcon {

/// Android GnssMeasurement constellation codes.
enum class Constellation : int {
    Unknown = 0,
    Gps = 1,
    Sbas = 2,
    Glonass = 3,
    Qzss = 4,
    Beidou = 5,
    Galileo = 6,
    Irnss = 7,
};

/// Sync-state bits of the GnssMeasurement State field. Each flag is a
/// distinct power of two; MSEC_AMBIGUOUS (16) marks millisecond ambiguity
/// caused by multipath.
struct StateFlag {
    static constexpr uint32_t kCodeLock = 1;
    static constexpr uint32_t kBitSync = 2;
    static constexpr uint32_t kSubframeSync = 4;
    static constexpr uint32_t kTowDecoded = 8;
    static constexpr uint32_t kMsecAmbiguous = 16;
    static constexpr uint32_t kSymbolSync = 32;
};

inline bool state_has_flag(uint32_t state, uint32_t flag) {
    return (state & flag) != 0;
}

/// One satellite observation at one epoch. Fields mirror the nine
/// semi-processed parameters exposed by the GnssMeasurement API;
/// adrng/adrng_u/bb_cn0 are absent on some chipsets and stay nullopt
/// rather than being zero-filled.
struct Measurement {
    int64_t utc_time_ms = 0;
    int64_t time_nanos = 0;  // receiver clock, opaque passthrough
    int sv_id = 0;
    Constellation constellation = Constellation::Unknown;
    double pr = 0.0;          // pseudorange rate, m/s
    double pru = 0.0;         // pseudorange-rate uncertainty (1-sigma), m/s
    double rec_sv_tu = 0.0;   // received SV time uncertainty (1-sigma), ns
    std::optional<double> adrng;    // accumulated delta range, m
    std::optional<double> adrng_u;  // its 1-sigma uncertainty, m
    double cn0 = 0.0;         // carrier-to-noise density, dB-Hz, in [0, 63]
    std::optional<double> bb_cn0;   // baseband C/N0, dB-Hz
    double agc = 0.0;         // AGC level, dB
    uint32_t state = 0;       // sync-state bitfield

    bool msec_ambiguous() const { return state_has_flag(state, StateFlag::kMsecAmbiguous); }
};

/// Pseudorange rates beyond this magnitude are physically implausible for any
/// terrestrial or airborne receiver; parsing keeps the value but flags it.
inline constexpr double kImplausiblePrThreshold = 10000.0;  // m/s

inline bool physically_implausible_pr(const Measurement& m) {
    return std::abs(m.pr) > kImplausiblePrThreshold;
}

/// Raw field map as resolved from one log line; absent optional fields are
/// simply missing keys.
using FieldMap = std::map<std::string, double>;

namespace detail {

inline double require_field(const FieldMap& raw, const std::string& name) {
    auto it = raw.find(name);
    if (it == raw.end()) throw Error(ErrorCode::MissingField, name);
    return it->second;
}

inline std::optional<double> optional_field(const FieldMap& raw, const std::string& name) {
    auto it = raw.find(name);
    if (it == raw.end()) return std::nullopt;
    return it->second;
}

}  // namespace detail

/// Build a validated Measurement from a raw field map, or throw a typed
/// rejection (MissingField / OutOfRange). Total: every field map yields
/// exactly one of the two outcomes.
inline Measurement validate_measurement(const FieldMap& raw) {
    Measurement m;

    const double utc = detail::require_field(raw, "utc_time_ms");
    if (!(utc > 0))
        throw Error(ErrorCode::OutOfRange, "utc_time_ms=" + format_g9(utc));
    m.utc_time_ms = static_cast<int64_t>(utc);

    const double sv = detail::require_field(raw, "sv_id");
    if (!(sv >= 1))
        throw Error(ErrorCode::OutOfRange, "sv_id=" + format_g9(sv));
    m.sv_id = static_cast<int>(sv);

    if (auto c = detail::optional_field(raw, "constellation")) {
        if (*c < 0 || *c > 7)
            throw Error(ErrorCode::OutOfRange, "constellation=" + format_g9(*c));
        m.constellation = static_cast<Constellation>(static_cast<int>(*c));
    }

    m.cn0 = detail::require_field(raw, "cn0");
    if (!(m.cn0 >= 0.0 && m.cn0 <= 63.0))
        throw Error(ErrorCode::OutOfRange, "cn0=" + format_g9(m.cn0));

    m.pr = detail::require_field(raw, "pr");

    m.pru = detail::require_field(raw, "pru");
    if (!(m.pru >= 0))
        throw Error(ErrorCode::OutOfRange, "pru=" + format_g9(m.pru));

    m.rec_sv_tu = detail::require_field(raw, "rec_sv_tu");
    if (!(m.rec_sv_tu >= 0))
        throw Error(ErrorCode::OutOfRange, "rec_sv_tu=" + format_g9(m.rec_sv_tu));

    m.agc = detail::require_field(raw, "agc");

    const double state = detail::require_field(raw, "state");
    if (!(state >= 0) || state != std::floor(state))
        throw Error(ErrorCode::OutOfRange, "state=" + format_g9(state));
    m.state = static_cast<uint32_t>(state);

    m.adrng = detail::optional_field(raw, "adrng");
    m.adrng_u = detail::optional_field(raw, "adrng_u");
    if (m.adrng_u && !(*m.adrng_u >= 0))
        throw Error(ErrorCode::OutOfRange, "adrng_u=" + format_g9(*m.adrng_u));
    m.bb_cn0 = detail::optional_field(raw, "bb_cn0");

    if (auto tn = detail::optional_field(raw, "time_nanos"))
        m.time_nanos = static_cast<int64_t>(*tn);

    return m;
}

/// All measurements sharing one receiver timestamp.
struct Epoch {
    int64_t utc_time_ms = 0;
    std::vector<Measurement> measurements;
    int unique_sv_count = 0;
};

/// Partition measurements into epochs keyed by utc_time_ms. Input is sorted
/// internally (stable, so within-epoch order is preserved); one epoch per
/// distinct timestamp.
inline std::vector<Epoch> group_into_epochs(std::vector<Measurement> ms) {
    if (ms.empty()) throw Error(ErrorCode::EmptyInput, "no measurements to group");

    std::stable_sort(ms.begin(), ms.end(), [](const Measurement& a, const Measurement& b) {
        return a.utc_time_ms < b.utc_time_ms;
    });

    std::vector<Epoch> epochs;
    for (auto& m : ms) {
        if (epochs.empty() || epochs.back().utc_time_ms != m.utc_time_ms) {
            epochs.push_back(Epoch{m.utc_time_ms, {}, 0});
        }
        epochs.back().measurements.push_back(std::move(m));
    }
    for (auto& e : epochs) {
        std::set<std::pair<int, int>> svs;
        for (const auto& m : e.measurements)
            svs.emplace(m.sv_id, static_cast<int>(m.constellation));
        e.unique_sv_count = static_cast<int>(svs.size());
    }
    return epochs;
}

}  // namespace androcon
