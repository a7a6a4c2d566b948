// Pipeline orchestration: feature selection, UKF denoising over label
// blocks, satellite-density filtering, pipeline model training and the
// versioned JSON evaluation reports.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "androcon/classify.hpp"
#include "androcon/common.hpp"
#include "androcon/evaluate.hpp"
#include "androcon/features.hpp"
#include "androcon/gnss_model.hpp"
#include "androcon/log_ingest.hpp"
#include "androcon/ukf.hpp"

namespace androcon {

inline constexpr const char* kReportSchema = "androcon-report/1";

// ---------------------------------------------------------------------------
// Dataset-level UKF denoising
// ---------------------------------------------------------------------------

/// Run the per-channel UKF over every feature column, independently within
/// each contiguous same-label block (one block per recording session; the
/// filter must not smear across class boundaries).
inline LabeledDataset apply_ukf_to_dataset(const LabeledDataset& ds) {
    ds.validate();
    LabeledDataset out = ds;
    Eigen::Index start = 0;
    while (start < ds.rows()) {
        Eigen::Index end = start;
        while (end < ds.rows() &&
               ds.labels[static_cast<size_t>(end)] == ds.labels[static_cast<size_t>(start)])
            ++end;
        const Eigen::Index len = end - start;
        if (len >= 2) {
            for (Eigen::Index j = 0; j < ds.dims(); ++j) {
                std::vector<double> series(static_cast<size_t>(len));
                for (Eigen::Index i = 0; i < len; ++i)
                    series[static_cast<size_t>(i)] = ds.x(start + i, j);
                auto filtered = filter_channel(series);
                for (Eigen::Index i = 0; i < len; ++i)
                    out.x(start + i, j) = filtered[static_cast<size_t>(i)];
            }
        }
        start = end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Satellite-density filtering
// ---------------------------------------------------------------------------

/// Keep a random fraction of the unique (sv_id, constellation) pairs and
/// drop all measurements from the other satellites. Reproduces the
/// SvID-density robustness experiment.
inline std::vector<Measurement> filter_svid_subset(const std::vector<Measurement>& ms,
                                                   double fraction, uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "svid fraction must be in (0,1]");
    if (fraction == 1.0) return ms;

    std::set<std::pair<int, int>> sv_set;
    for (const auto& m : ms) sv_set.emplace(m.sv_id, static_cast<int>(m.constellation));
    std::vector<std::pair<int, int>> svs(sv_set.begin(), sv_set.end());
    Rng rng(derive_seed(seed, "svid_subset"));
    rng.shuffle(svs);
    size_t keep_count = static_cast<size_t>(
        std::max(1.0, std::ceil(fraction * static_cast<double>(svs.size()))));
    std::set<std::pair<int, int>> keep(svs.begin(),
                                       svs.begin() + static_cast<long>(keep_count));

    std::vector<Measurement> out;
    for (const auto& m : ms)
        if (keep.count({m.sv_id, static_cast<int>(m.constellation)})) out.push_back(m);
    if (out.empty()) throw Error(ErrorCode::EmptyInput, "svid filter removed everything");
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline model: feature selection + UKF + scaler + LDA + classifier
// ---------------------------------------------------------------------------

struct PipelineOptions {
    bool use_ukf = true;
    bool use_lda = true;
    double drop_threshold = 0.95;  // correlation-based feature selection
};

/// Prepare a raw (possibly 9-feature) dataset for training: drop correlated
/// features, then denoise each channel with the UKF.
struct PreparedDataset {
    LabeledDataset dataset;
    std::vector<std::string> dropped_features;
};

inline PreparedDataset prepare_dataset(const LabeledDataset& ds, const PipelineOptions& opts) {
    PreparedDataset out;
    auto drop = drop_correlated(ds, opts.drop_threshold);
    out.dropped_features = drop.dropped;
    out.dataset = opts.use_ukf ? apply_ukf_to_dataset(drop.reduced) : std::move(drop.reduced);
    return out;
}

/// A trained end-to-end classifier: standardizer + optional LDA + model,
/// predicting from raw feature rows.
struct PipelineModel {
    FittedProjection projection;
    TrainedModel model;
    std::vector<std::string> feature_names;  // raw features expected at predict time

    Prediction predict(const Eigen::RowVectorXd& raw) const {
        Eigen::VectorXd z = projection.transform(Eigen::VectorXd(raw.transpose()));
        return model.predict(z.transpose());
    }
};

inline PipelineModel train_pipeline(ModelKind kind, const LabeledDataset& prepared,
                                    const Hyperparams& hp, uint64_t seed,
                                    const PipelineOptions& opts = {}) {
    PipelineModel pm;
    pm.projection = fit_projection(prepared, opts.use_lda);
    pm.feature_names = prepared.feature_names;
    LabeledDataset transformed = prepared;
    transformed.x = pm.projection.transform(prepared.x);
    transformed.feature_names.clear();
    pm.model = train(kind, transformed, hp, derive_seed(seed, "train"));
    return pm;
}

inline nlohmann::json pipeline_model_to_json(const PipelineModel& pm) {
    nlohmann::json j;
    j["format"] = "androcon-pipeline-model/1";
    j["projection"] = projection_to_json(pm.projection);
    j["model"] = model_to_json(pm.model);
    j["feature_names"] = pm.feature_names;
    return j;
}

inline PipelineModel pipeline_model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "androcon-pipeline-model/1")
        throw Error(ErrorCode::InvalidSpec, "unsupported pipeline model format");
    PipelineModel pm;
    pm.projection = projection_from_json(j.at("projection"));
    pm.model = model_from_json(j.at("model"));
    pm.feature_names = j.value("feature_names", std::vector<std::string>{});
    return pm;
}

// ---------------------------------------------------------------------------
// Report serialization (androcon-report/1)
// ---------------------------------------------------------------------------

inline nlohmann::json eval_report_to_json(const EvalReport& r,
                                          const std::vector<std::string>& class_names) {
    nlohmann::json j;
    j["overall_accuracy"] = r.overall_accuracy;
    nlohmann::json confusion = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < r.confusion.cols(); ++k) row.push_back(r.confusion(i, k));
        confusion.push_back(row);
    }
    j["confusion"] = confusion;
    nlohmann::json per_class;
    for (size_t c = 0; c < class_names.size(); ++c) {
        per_class[class_names[c]] = {{"acc", r.acc[c]},
                                     {"sen", r.sen[c]},
                                     {"spe", r.spe[c]},
                                     {"f_score", r.f_score[c]}};
    }
    j["per_class"] = per_class;
    return j;
}

inline std::string confusion_to_csv(const EvalReport& r,
                                    const std::vector<std::string>& class_names) {
    std::string out = "true\\pred";
    for (const auto& name : class_names) out += "," + name;
    out += "\n";
    for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
        out += class_names[static_cast<size_t>(i)];
        for (Eigen::Index j = 0; j < r.confusion.cols(); ++j)
            out += "," + std::to_string(r.confusion(i, j));
        out += "\n";
    }
    return out;
}

/// Render a report table the way the published metric tables are laid out.
inline std::string eval_report_to_table(const EvalReport& r,
                                        const std::vector<std::string>& class_names,
                                        const std::string& title) {
    char buf[128];
    std::string out = title + "\n";
    out += "  class            acc     sen     spe     f\n";
    for (size_t c = 0; c < class_names.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "  %-14s %6.1f  %6.1f  %6.1f  %6.1f\n",
                      class_names[c].c_str(), r.acc[c], r.sen[c], r.spe[c], r.f_score[c]);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "  overall accuracy: %.2f%%\n", r.overall_accuracy);
    out += buf;
    return out;
}

struct CvRunResult {
    CvResult cv;
    nlohmann::json report;
};

/// Cross-validated evaluation of one model kind on a prepared dataset,
/// bundled into the versioned report document.
inline CvRunResult run_cv_eval(ModelKind kind, const LabeledDataset& prepared,
                               const Hyperparams& hp, int k, uint64_t seed,
                               const PipelineOptions& opts) {
    CvRunResult out;
    out.cv = cross_validate(kind, prepared, hp, k, seed, opts.use_lda);

    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["command"] = "eval";
    j["model"] = model_kind_name(kind);
    j["seed"] = seed;
    j["subseeds"] = {{"cv_shuffle", derive_seed(seed, "cv_shuffle")},
                     {"fold_train_0", derive_seed(seed, "cv_fold_train", 0)}};
    j["params"] = {{"cv_folds", k},
                   {"use_ukf", opts.use_ukf},
                   {"use_lda", opts.use_lda},
                   {"hyperparams", hp}};
    j["mean"] = eval_report_to_json(out.cv.mean, prepared.class_names);
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fold : out.cv.folds)
        folds.push_back(eval_report_to_json(fold, prepared.class_names));
    j["folds"] = folds;
    out.report = std::move(j);
    return out;
}

struct SplitRunResult {
    EvalReport report;
    nlohmann::json json;
};

/// Single stratified train/test split evaluation through the full pipeline
/// (projection refit on the train side only).
inline SplitRunResult run_split_eval(ModelKind kind, const LabeledDataset& prepared,
                                     const Hyperparams& hp, double ratio, uint64_t seed,
                                     const PipelineOptions& opts) {
    auto split = split_train_test(prepared, ratio, seed);
    PipelineModel pm = train_pipeline(kind, split.train, hp, seed, opts);
    std::vector<int> preds;
    preds.reserve(static_cast<size_t>(split.test.rows()));
    for (Eigen::Index i = 0; i < split.test.rows(); ++i)
        preds.push_back(pm.predict(split.test.x.row(i)).label);

    SplitRunResult out;
    out.report =
        eval_metrics(preds, split.test.labels, static_cast<int>(prepared.class_names.size()));
    out.json["schema"] = kReportSchema;
    out.json["command"] = "eval";
    out.json["model"] = model_kind_name(kind);
    out.json["seed"] = seed;
    out.json["subseeds"] = {{"split", derive_seed(seed, "split")},
                            {"train", derive_seed(seed, "train")}};
    out.json["params"] = {{"split_ratio", ratio},
                          {"use_ukf", opts.use_ukf},
                          {"use_lda", opts.use_lda},
                          {"hyperparams", hp}};
    out.json["result"] = eval_report_to_json(out.report, prepared.class_names);
    return out;
}

}  // namespace androcon
