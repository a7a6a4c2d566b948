// Model evaluation: stratified splits, ten-fold cross-validation with
// per-fold feature refitting, confusion-matrix metrics and permutation
// feature importance.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "androcon/classify.hpp"
#include "androcon/common.hpp"
#include "androcon/features.hpp"
#include "androcon/log_ingest.hpp"

namespace androcon {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Per-class one-vs-rest metrics in percent. Per-class accuracy follows the
/// recall convention (Acc = Sen), matching how the published tables pair the
/// two columns.
struct EvalReport {
    Eigen::MatrixXi confusion;  // row = true class, col = predicted
    std::vector<double> acc;
    std::vector<double> sen;
    std::vector<double> spe;
    std::vector<double> f_score;
    double overall_accuracy = 0.0;
};

inline EvalReport eval_metrics(const std::vector<int>& preds, const std::vector<int>& truth,
                               int num_classes) {
    if (preds.size() != truth.size())
        throw Error(ErrorCode::LengthMismatch, "preds/truth size mismatch");
    if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");

    EvalReport r;
    r.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (size_t i = 0; i < preds.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= num_classes || preds[i] < 0 || preds[i] >= num_classes)
            throw Error(ErrorCode::OutOfRange, "label outside [0, C)");
        r.confusion(truth[i], preds[i]) += 1;
    }

    const double total = static_cast<double>(preds.size());
    double diag = 0.0;
    for (int c = 0; c < num_classes; ++c) diag += r.confusion(c, c);
    r.overall_accuracy = 100.0 * diag / total;

    for (int c = 0; c < num_classes; ++c) {
        double tp = r.confusion(c, c);
        double fn = r.confusion.row(c).sum() - tp;
        double fp = r.confusion.col(c).sum() - tp;
        double tn = total - tp - fn - fp;
        double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        double specificity = tn + fp > 0 ? tn / (tn + fp) : 0.0;
        double f = precision + recall > 0
                       ? 2.0 * precision * recall / (precision + recall)
                       : 0.0;
        r.acc.push_back(100.0 * recall);
        r.sen.push_back(100.0 * recall);
        r.spe.push_back(100.0 * specificity);
        r.f_score.push_back(100.0 * f);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

namespace detail {

inline std::map<int, std::vector<int>> indices_by_class(const LabeledDataset& ds) {
    std::map<int, std::vector<int>> by_class;
    for (Eigen::Index i = 0; i < ds.rows(); ++i)
        by_class[ds.labels[static_cast<size_t>(i)]].push_back(static_cast<int>(i));
    return by_class;
}

inline LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<int>& rows) {
    LabeledDataset out;
    out.class_names = ds.class_names;
    out.feature_names = ds.feature_names;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), ds.dims());
    out.labels.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = ds.x.row(rows[i]);
        out.labels.push_back(ds.labels[static_cast<size_t>(rows[i])]);
        if (!ds.epoch_time_ms.empty())
            out.epoch_time_ms.push_back(ds.epoch_time_ms[static_cast<size_t>(rows[i])]);
    }
    return out;
}

}  // namespace detail

struct TrainTestSplit {
    LabeledDataset train;
    LabeledDataset test;
};

/// Stratified random split: per class, round(ratio * n) rows go to train
/// (clamped so both sides keep at least one row).
inline TrainTestSplit split_train_test(const LabeledDataset& ds, double ratio, uint64_t seed) {
    ds.validate();
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(ErrorCode::InvalidArgument, "split ratio must be in (0,1)");

    Rng rng(derive_seed(seed, "split"));
    std::vector<int> train_rows, test_rows;
    for (auto& [cls, idx] : detail::indices_by_class(ds)) {
        if (idx.size() < 2)
            throw Error(ErrorCode::ClassTooSmall,
                        "class " + ds.class_names[static_cast<size_t>(cls)] +
                            " has fewer than 2 rows");
        std::vector<int> shuffled = idx;
        rng.shuffle(shuffled);
        int n_train = static_cast<int>(std::lround(ratio * static_cast<double>(idx.size())));
        n_train = std::clamp(n_train, 1, static_cast<int>(idx.size()) - 1);
        for (size_t i = 0; i < shuffled.size(); ++i)
            (static_cast<int>(i) < n_train ? train_rows : test_rows).push_back(shuffled[i]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {detail::take_rows(ds, train_rows), detail::take_rows(ds, test_rows)};
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct CvResult {
    EvalReport mean;                 // metrics averaged over folds, confusion summed
    std::vector<EvalReport> folds;
    double mean_accuracy = 0.0;
};

/// Stratified k-fold cross-validation. The standardizer and LDA projection
/// are refit inside each fold on the train split only, so no information
/// leaks from the held-out fold.
inline CvResult cross_validate(ModelKind kind, const LabeledDataset& ds, const Hyperparams& hp,
                               int k, uint64_t seed, bool use_lda = true) {
    ds.validate();
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");

    // Assign rows to folds, stratified per class.
    std::vector<int> fold_of(static_cast<size_t>(ds.rows()), -1);
    Rng rng(derive_seed(seed, "cv_shuffle"));
    for (auto& [cls, idx] : detail::indices_by_class(ds)) {
        if (static_cast<int>(idx.size()) < k)
            throw Error(ErrorCode::ClassTooSmall,
                        "class " + ds.class_names[static_cast<size_t>(cls)] + " has " +
                            std::to_string(idx.size()) + " rows < k=" + std::to_string(k));
        std::vector<int> shuffled = idx;
        rng.shuffle(shuffled);
        for (size_t i = 0; i < shuffled.size(); ++i)
            fold_of[static_cast<size_t>(shuffled[i])] = static_cast<int>(i % static_cast<size_t>(k));
    }

    const int num_classes = static_cast<int>(ds.class_names.size());
    CvResult result;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<int> train_rows, test_rows;
        for (Eigen::Index i = 0; i < ds.rows(); ++i)
            (fold_of[static_cast<size_t>(i)] == fold ? test_rows : train_rows)
                .push_back(static_cast<int>(i));

        LabeledDataset train_ds = detail::take_rows(ds, train_rows);
        LabeledDataset test_ds = detail::take_rows(ds, test_rows);

        FittedProjection fp = fit_projection(train_ds, use_lda);
        LabeledDataset train_p = train_ds;
        train_p.x = fp.transform(train_ds.x);
        train_p.feature_names.clear();

        TrainedModel model = train(
            kind, train_p, hp, derive_seed(seed, "cv_fold_train", static_cast<uint64_t>(fold)));

        Eigen::MatrixXd test_x = fp.transform(test_ds.x);
        std::vector<int> preds;
        preds.reserve(test_rows.size());
        for (Eigen::Index i = 0; i < test_x.rows(); ++i)
            preds.push_back(model.predict(test_x.row(i)).label);

        result.folds.push_back(eval_metrics(preds, test_ds.labels, num_classes));
    }

    // Aggregate: mean of metrics, sum of confusion counts.
    EvalReport mean;
    mean.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
    mean.acc.assign(static_cast<size_t>(num_classes), 0.0);
    mean.sen.assign(static_cast<size_t>(num_classes), 0.0);
    mean.spe.assign(static_cast<size_t>(num_classes), 0.0);
    mean.f_score.assign(static_cast<size_t>(num_classes), 0.0);
    for (const auto& f : result.folds) {
        mean.confusion += f.confusion;
        mean.overall_accuracy += f.overall_accuracy;
        for (int c = 0; c < num_classes; ++c) {
            mean.acc[static_cast<size_t>(c)] += f.acc[static_cast<size_t>(c)];
            mean.sen[static_cast<size_t>(c)] += f.sen[static_cast<size_t>(c)];
            mean.spe[static_cast<size_t>(c)] += f.spe[static_cast<size_t>(c)];
            mean.f_score[static_cast<size_t>(c)] += f.f_score[static_cast<size_t>(c)];
        }
    }
    const double nk = static_cast<double>(k);
    mean.overall_accuracy /= nk;
    for (int c = 0; c < num_classes; ++c) {
        mean.acc[static_cast<size_t>(c)] /= nk;
        mean.sen[static_cast<size_t>(c)] /= nk;
        mean.spe[static_cast<size_t>(c)] /= nk;
        mean.f_score[static_cast<size_t>(c)] /= nk;
    }
    result.mean = std::move(mean);
    result.mean_accuracy = result.mean.overall_accuracy;
    return result;
}

// ---------------------------------------------------------------------------
// Permutation feature importance
// ---------------------------------------------------------------------------

/// Importance of column j = mean over repeats of (error with column j
/// shuffled) - (baseline error), in error-fraction units. The predictor is a
/// black box so the whole pipeline (scaler + LDA + classifier) can sit
/// behind it and raw features stay the unit of attribution.
inline Eigen::VectorXd permutation_importance(
    const std::function<int(const Eigen::RowVectorXd&)>& predict, const Eigen::MatrixXd& x,
    const std::vector<int>& labels, int n_repeats, uint64_t seed) {
    if (static_cast<Eigen::Index>(labels.size()) != x.rows())
        throw Error(ErrorCode::LengthMismatch, "labels/rows size mismatch");
    if (n_repeats < 1) throw Error(ErrorCode::InvalidArgument, "n_repeats must be >= 1");

    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();

    auto error_rate = [&](const Eigen::MatrixXd& m) {
        int wrong = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (predict(m.row(i)) != labels[static_cast<size_t>(i)]) ++wrong;
        return static_cast<double>(wrong) / static_cast<double>(n);
    };

    const double baseline = error_rate(x);
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int rep = 0; rep < n_repeats; ++rep) {
            Rng rng(derive_seed(seed, "perm_importance",
                                static_cast<uint64_t>(j) * 1000003ULL + static_cast<uint64_t>(rep)));
            std::vector<int> perm(static_cast<size_t>(n));
            for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
            rng.shuffle(perm);
            Eigen::MatrixXd shuffled = x;
            for (Eigen::Index i = 0; i < n; ++i)
                shuffled(i, j) = x(perm[static_cast<size_t>(i)], j);
            acc += error_rate(shuffled) - baseline;
        }
        scores(j) = acc / static_cast<double>(n_repeats);
    }
    return scores;
}

}  // namespace androcon
