// GnssLogger CSV ingestion: streaming Raw-line parser, per-epoch feature
// aggregation, correlation analysis and correlation-based feature dropping.
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "androcon/common.hpp"
#include "androcon/gnss_model.hpp"

namespace androcon {

// ---------------------------------------------------------------------------
// Feature vectors and datasets
// ---------------------------------------------------------------------------

inline constexpr int kFeatureCount = 8;

/// Canonical per-epoch feature order. bb_cn0 is not part of the canonical
/// eight (it is dropped by feature selection) but slots in after cn0 when a
/// nine-feature dataset is requested for the correlation study.
inline const std::vector<std::string>& canonical_feature_names() {
    static const std::vector<std::string> names = {
        "pr", "pru", "rec_sv_tu", "adrng", "adrng_u",
        "cn0", "agc", "msec_ambiguous_fraction"};
    return names;
}

inline const std::vector<std::string>& extended_feature_names() {
    static const std::vector<std::string> names = {
        "pr", "pru", "rec_sv_tu", "adrng", "adrng_u",
        "cn0", "bb_cn0", "agc", "msec_ambiguous_fraction"};
    return names;
}

/// One epoch collapsed to the canonical feature tuple.
struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    int64_t epoch_time_ms = 0;
    std::string provenance;
    std::array<bool, kFeatureCount> imputed{};  // true where the value was filled in
};

/// Rows-by-features matrix with integer class labels. Feature count is not
/// fixed at eight: LDA output and the nine-feature correlation study reuse
/// the same container.
struct LabeledDataset {
    Eigen::MatrixXd x;  // rows x features
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::vector<int64_t> epoch_time_ms;  // optional, same length as rows when present

    Eigen::Index rows() const { return x.rows(); }
    Eigen::Index dims() const { return x.cols(); }

    void validate() const {
        if (static_cast<Eigen::Index>(labels.size()) != x.rows())
            throw Error(ErrorCode::LengthMismatch, "labels/rows size mismatch");
        if (!feature_names.empty() &&
            static_cast<Eigen::Index>(feature_names.size()) != x.cols())
            throw Error(ErrorCode::LengthMismatch, "feature_names/cols size mismatch");
        for (int l : labels)
            if (l < 0 || l >= static_cast<int>(class_names.size()))
                throw Error(ErrorCode::OutOfRange, "label id " + std::to_string(l));
    }
};

// ---------------------------------------------------------------------------
// GnssLogger parser
// ---------------------------------------------------------------------------

struct SkippedLine {
    size_t line_number = 0;
    std::string reason;
};

struct ParseDiagnostics {
    size_t total_lines = 0;
    size_t raw_lines = 0;
    size_t accepted = 0;
    size_t skipped = 0;
    std::vector<SkippedLine> skipped_lines;
    std::vector<std::string> warnings;
};

struct ParseResult {
    std::vector<Measurement> measurements;
    ParseDiagnostics diagnostics;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(const std::string& field) {
    std::string t = trim(field);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

/// GnssLogger column name -> canonical field key.
inline const std::map<std::string, std::string>& gnss_column_map() {
    static const std::map<std::string, std::string> m = {
        {"utcTimeMillis", "utc_time_ms"},
        {"TimeNanos", "time_nanos"},
        {"Svid", "sv_id"},
        {"ConstellationType", "constellation"},
        {"Cn0DbHz", "cn0"},
        {"PseudorangeRateMetersPerSecond", "pr"},
        {"PseudorangeRateUncertaintyMetersPerSecond", "pru"},
        {"ReceivedSvTimeUncertaintyNanos", "rec_sv_tu"},
        {"AgcDb", "agc"},
        {"State", "state"},
        {"AccumulatedDeltaRangeMeters", "adrng"},
        {"AccumulatedDeltaRangeUncertaintyMeters", "adrng_u"},
        {"BasebandCn0DbHz", "bb_cn0"},
    };
    return m;
}

}  // namespace detail

/// Parse a GnssLogger-style stream. `# Raw,...` establishes the column map;
/// `Raw,...` lines carry measurements. Malformed lines are skipped and
/// reported with line numbers, never fatal. Throws only when the stream is
/// unreadable up front or a Raw data line arrives before any header.
inline ParseResult parse_gnss_log(std::istream& in) {
    if (!in.good()) throw Error(ErrorCode::UnreadableStream, "input stream not readable");

    ParseResult result;
    ParseDiagnostics& diag = result.diagnostics;

    std::vector<std::string> columns;  // canonical key per column, "" = ignored
    std::string line;
    size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        ++diag.total_lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        if (line.rfind("# Raw,", 0) == 0 || line.rfind("#Raw,", 0) == 0) {
            auto fields = detail::split_csv(line.substr(line.find("Raw,")));
            columns.clear();
            for (size_t i = 1; i < fields.size(); ++i) {
                auto it = detail::gnss_column_map().find(detail::trim(fields[i]));
                columns.push_back(it == detail::gnss_column_map().end() ? "" : it->second);
            }
            continue;
        }
        if (!line.empty() && line[0] == '#') continue;  // comment/header
        if (line.rfind("Raw,", 0) != 0) continue;       // Fix/Nav/other records

        ++diag.raw_lines;
        if (columns.empty())
            throw Error(ErrorCode::HeaderMissing, "Raw data line before any # Raw header");

        auto fields = detail::split_csv(line);
        FieldMap raw;
        bool malformed = false;
        std::string malformed_field;
        for (size_t i = 1; i < fields.size() && i - 1 < columns.size(); ++i) {
            const std::string& key = columns[i - 1];
            if (key.empty()) continue;
            std::string t = detail::trim(fields[i]);
            if (t.empty()) continue;  // absent optional value
            auto v = detail::parse_double(fields[i]);
            if (!v) {
                malformed = true;
                malformed_field = key;
                break;
            }
            raw[key] = *v;
        }
        if (malformed) {
            ++diag.skipped;
            diag.skipped_lines.push_back(
                {line_no, "Malformed(" + malformed_field + ")"});
            continue;
        }
        try {
            Measurement m = validate_measurement(raw);
            if (physically_implausible_pr(m)) {
                diag.warnings.push_back("line " + std::to_string(line_no) +
                                        ": implausible pr=" + format_g9(m.pr));
            }
            result.measurements.push_back(std::move(m));
            ++diag.accepted;
        } catch (const Error& e) {
            ++diag.skipped;
            diag.skipped_lines.push_back({line_no, e.what()});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Per-epoch features
// ---------------------------------------------------------------------------

enum class ImputationPolicy {
    Zero,         // absent optional feature -> 0.0, flagged
    DatasetMean,  // absent -> NaN here, replaced by the column mean at build
    Reject,       // throw AllAbsent
};

namespace detail {

struct MeanAcc {
    double sum = 0.0;
    int n = 0;
    void add(double v) { sum += v; ++n; }
    bool empty() const { return n == 0; }
    double mean() const { return sum / n; }
};

}  // namespace detail

/// Collapse one epoch to the canonical feature tuple: per-parameter mean
/// across satellites plus the fraction of measurements with MSEC_AMBIGUOUS
/// set. Order of measurements inside the epoch does not matter.
inline FeatureVector epoch_features(const Epoch& e,
                                    ImputationPolicy policy = ImputationPolicy::DatasetMean) {
    if (e.measurements.empty()) throw Error(ErrorCode::EmptyInput, "empty epoch");

    detail::MeanAcc pr, pru, rec, adrng, adrng_u, cn0, agc;
    int ambiguous = 0;
    for (const auto& m : e.measurements) {
        pr.add(m.pr);
        pru.add(m.pru);
        rec.add(m.rec_sv_tu);
        cn0.add(m.cn0);
        agc.add(m.agc);
        if (m.adrng) adrng.add(*m.adrng);
        if (m.adrng_u) adrng_u.add(*m.adrng_u);
        if (m.msec_ambiguous()) ++ambiguous;
    }

    FeatureVector fv;
    fv.epoch_time_ms = e.utc_time_ms;
    auto fill_optional = [&](const detail::MeanAcc& acc, int idx, const char* name) {
        if (!acc.empty()) {
            fv.values[idx] = acc.mean();
            return;
        }
        switch (policy) {
            case ImputationPolicy::Zero:
                fv.values[idx] = 0.0;
                fv.imputed[idx] = true;
                break;
            case ImputationPolicy::DatasetMean:
                fv.values[idx] = std::numeric_limits<double>::quiet_NaN();
                fv.imputed[idx] = true;
                break;
            case ImputationPolicy::Reject:
                throw Error(ErrorCode::AllAbsent, name);
        }
    };

    fv.values[0] = pr.mean();
    fv.values[1] = pru.mean();
    fv.values[2] = rec.mean();
    fill_optional(adrng, 3, "adrng");
    fill_optional(adrng_u, 4, "adrng_u");
    fv.values[5] = cn0.mean();
    fv.values[6] = agc.mean();
    fv.values[7] = static_cast<double>(ambiguous) / e.measurements.size();
    return fv;
}

/// Mean bb_cn0 of an epoch, NaN when no satellite supplies it.
inline double epoch_bb_cn0(const Epoch& e) {
    detail::MeanAcc acc;
    for (const auto& m : e.measurements)
        if (m.bb_cn0) acc.add(*m.bb_cn0);
    return acc.empty() ? std::numeric_limits<double>::quiet_NaN() : acc.mean();
}

struct BuildOptions {
    ImputationPolicy policy = ImputationPolicy::DatasetMean;
    bool include_bb_cn0 = false;
    std::string label = "unlabeled";
};

/// Assemble a dataset from epochs with per-epoch labels. With the
/// DatasetMean policy, NaN slots left by epoch_features are replaced by the
/// column mean over finite rows (0.0 with a warning when a column is absent
/// everywhere).
inline LabeledDataset build_dataset(const std::vector<Epoch>& epochs,
                                    const std::vector<int>& labels,
                                    const std::vector<std::string>& class_names,
                                    const BuildOptions& opts = {},
                                    std::vector<std::string>* warnings = nullptr) {
    if (epochs.empty()) throw Error(ErrorCode::EmptyInput, "no epochs");
    if (labels.size() != epochs.size())
        throw Error(ErrorCode::LengthMismatch, "one label per epoch required");

    const bool ext = opts.include_bb_cn0;
    const auto& names = ext ? extended_feature_names() : canonical_feature_names();
    const int d = static_cast<int>(names.size());

    LabeledDataset ds;
    ds.feature_names = names;
    ds.class_names = class_names;
    ds.x.resize(static_cast<Eigen::Index>(epochs.size()), d);
    ds.labels = labels;
    ds.epoch_time_ms.reserve(epochs.size());

    for (size_t i = 0; i < epochs.size(); ++i) {
        FeatureVector fv = epoch_features(epochs[i], opts.policy);
        ds.epoch_time_ms.push_back(fv.epoch_time_ms);
        int col = 0;
        for (int j = 0; j < kFeatureCount; ++j) {
            ds.x(static_cast<Eigen::Index>(i), col++) = fv.values[j];
            if (ext && j == 5) {  // bb_cn0 sits right after cn0
                double bb = epoch_bb_cn0(epochs[i]);
                if (std::isnan(bb) && opts.policy == ImputationPolicy::Zero) bb = 0.0;
                if (std::isnan(bb) && opts.policy == ImputationPolicy::Reject)
                    throw Error(ErrorCode::AllAbsent, "bb_cn0");
                ds.x(static_cast<Eigen::Index>(i), col++) = bb;
            }
        }
    }

    // Dataset-mean imputation pass.
    for (int j = 0; j < d; ++j) {
        auto col = ds.x.col(j);
        double sum = 0.0;
        Eigen::Index n = 0;
        for (Eigen::Index i = 0; i < col.size(); ++i)
            if (!std::isnan(col(i))) { sum += col(i); ++n; }
        if (n == col.size()) continue;
        double fill = n > 0 ? sum / static_cast<double>(n) : 0.0;
        if (n == 0 && warnings)
            warnings->push_back("feature " + names[j] + " absent everywhere; imputed 0");
        for (Eigen::Index i = 0; i < col.size(); ++i)
            if (std::isnan(col(i))) col(i) = fill;
    }
    ds.validate();
    return ds;
}

/// Single-label convenience overload.
inline LabeledDataset build_dataset(const std::vector<Epoch>& epochs,
                                    const BuildOptions& opts = {},
                                    std::vector<std::string>* warnings = nullptr) {
    return build_dataset(epochs, std::vector<int>(epochs.size(), 0), {opts.label}, opts,
                         warnings);
}

// ---------------------------------------------------------------------------
// Correlation analysis and feature dropping
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    Eigen::MatrixXd m;  // symmetric, unit diagonal
    std::vector<std::string> feature_names;
};

/// Pearson correlation of every feature pair. A zero-variance feature gets a
/// zero row/column with a unit diagonal entry.
inline CorrelationMatrix correlation_matrix(const LabeledDataset& ds) {
    const Eigen::Index n = ds.rows();
    const Eigen::Index d = ds.dims();
    if (n < 2) throw Error(ErrorCode::TooFewRows, "need >= 2 rows for correlation");

    Eigen::RowVectorXd mean = ds.x.colwise().mean();
    Eigen::MatrixXd centered = ds.x.rowwise() - mean;
    Eigen::VectorXd norm = centered.colwise().norm();

    CorrelationMatrix out;
    out.feature_names = ds.feature_names;
    out.m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out.m(i, i) = 1.0;
        if (norm(i) == 0.0) continue;
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (norm(j) == 0.0) continue;
            double r = centered.col(i).dot(centered.col(j)) / (norm(i) * norm(j));
            r = std::clamp(r, -1.0, 1.0);
            out.m(i, j) = r;
            out.m(j, i) = r;
        }
    }
    return out;
}

struct DropResult {
    LabeledDataset reduced;
    std::vector<std::string> dropped;
};

/// Greedy correlation-based feature selection: scan features in canonical
/// (column) order and drop the later member of any pair with |corr| >=
/// threshold against an already-kept feature.
inline DropResult drop_correlated(const LabeledDataset& ds, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "threshold must be in (0,1]");

    CorrelationMatrix corr = correlation_matrix(ds);
    const Eigen::Index d = ds.dims();
    std::vector<Eigen::Index> kept;
    std::vector<std::string> dropped;
    for (Eigen::Index j = 0; j < d; ++j) {
        bool redundant = false;
        for (Eigen::Index i : kept) {
            if (std::abs(corr.m(i, j)) >= threshold) {
                redundant = true;
                break;
            }
        }
        if (redundant)
            dropped.push_back(ds.feature_names.empty() ? "feature_" + std::to_string(j)
                                                       : ds.feature_names[j]);
        else
            kept.push_back(j);
    }

    DropResult out;
    out.dropped = std::move(dropped);
    out.reduced.labels = ds.labels;
    out.reduced.class_names = ds.class_names;
    out.reduced.epoch_time_ms = ds.epoch_time_ms;
    out.reduced.x.resize(ds.rows(), static_cast<Eigen::Index>(kept.size()));
    for (size_t k = 0; k < kept.size(); ++k) {
        out.reduced.x.col(static_cast<Eigen::Index>(k)) = ds.x.col(kept[k]);
        if (!ds.feature_names.empty())
            out.reduced.feature_names.push_back(ds.feature_names[kept[k]]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset CSV (feature columns + label column, UTF-8, LF)
// ---------------------------------------------------------------------------

inline std::string dataset_to_csv(const LabeledDataset& ds) {
    ds.validate();
    std::string out;
    for (const auto& name : ds.feature_names) {
        out += name;
        out += ',';
    }
    out += "label\n";
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.dims(); ++j) {
            out += format_g9(ds.x(i, j));
            out += ',';
        }
        out += ds.class_names[ds.labels[static_cast<size_t>(i)]];
        out += '\n';
    }
    return out;
}

inline LabeledDataset dataset_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "empty dataset file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_csv(line);
    if (header.empty() || detail::trim(header.back()) != "label")
        throw Error(ErrorCode::HeaderMissing, "dataset CSV must end with a label column");

    LabeledDataset ds;
    for (size_t i = 0; i + 1 < header.size(); ++i)
        ds.feature_names.push_back(detail::trim(header[i]));
    const size_t d = ds.feature_names.size();

    std::vector<std::vector<double>> rows;
    std::map<std::string, int> class_ids;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv(line);
        if (fields.size() != d + 1)
            throw Error(ErrorCode::LengthMismatch,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(d + 1) + " fields");
        std::vector<double> row(d);
        for (size_t j = 0; j < d; ++j) {
            auto v = detail::parse_double(fields[j]);
            if (!v)
                throw Error(ErrorCode::OutOfRange,
                            "line " + std::to_string(line_no) + ": bad value '" + fields[j] + "'");
            row[j] = *v;
        }
        std::string cls = detail::trim(fields[d]);
        auto [it, inserted] = class_ids.emplace(cls, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(cls);
        ds.labels.push_back(it->second);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "dataset has no rows");

    ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < d; ++j)
            ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return ds;
}

}  // namespace androcon
