#include "androcon/evaluate.hpp"

#include <gtest/gtest.h>

#include <set>

#include "androcon/common.hpp"

using namespace androcon;

namespace {

LabeledDataset blob_dataset(int num_classes, int rows_per_class, int dims, double sep,
                            uint64_t seed) {
    LabeledDataset ds;
    Rng rng(seed);
    ds.x.resize(num_classes * rows_per_class, dims);
    int row = 0;
    for (int c = 0; c < num_classes; ++c) {
        Eigen::VectorXd center(dims);
        for (int j = 0; j < dims; ++j) center(j) = ((c + j) % num_classes) * sep;
        for (int i = 0; i < rows_per_class; ++i, ++row) {
            for (int j = 0; j < dims; ++j) ds.x(row, j) = center(j) + rng.gaussian();
            ds.labels.push_back(c);
        }
        ds.class_names.push_back("c" + std::to_string(c));
    }
    for (int j = 0; j < dims; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    return ds;
}

}  // namespace

TEST(EvalMetrics, PerfectPredictions) {
    std::vector<int> truth = {0, 1, 2, 0, 1, 2};
    auto r = eval_metrics(truth, truth, 3);
    EXPECT_DOUBLE_EQ(r.overall_accuracy, 100.0);
    for (int c = 0; c < 3; ++c) {
        EXPECT_DOUBLE_EQ(r.acc[c], 100.0);
        EXPECT_DOUBLE_EQ(r.sen[c], 100.0);
        EXPECT_DOUBLE_EQ(r.spe[c], 100.0);
        EXPECT_DOUBLE_EQ(r.f_score[c], 100.0);
    }
    EXPECT_EQ(r.confusion(0, 0), 2);
    EXPECT_EQ(r.confusion(0, 1), 0);
}

// Hand-built 3x3 confusion matrix, metrics frozen from manual arithmetic.
//
//            pred0 pred1 pred2
//   true0      8     1     1      (10 rows)
//   true1      2     6     2      (10 rows)
//   true2      0     3     7      (10 rows)
TEST(EvalMetrics, MatchesHandComputedConfusion) {
    std::vector<int> truth, preds;
    auto add = [&](int t, int p, int count) {
        for (int i = 0; i < count; ++i) {
            truth.push_back(t);
            preds.push_back(p);
        }
    };
    add(0, 0, 8); add(0, 1, 1); add(0, 2, 1);
    add(1, 0, 2); add(1, 1, 6); add(1, 2, 2);
    add(2, 1, 3); add(2, 2, 7);

    auto r = eval_metrics(preds, truth, 3);
    EXPECT_NEAR(r.overall_accuracy, 100.0 * 21.0 / 30.0, 1e-9);

    // Class 0: TP=8 FN=2 FP=2 TN=18.
    EXPECT_NEAR(r.acc[0], 80.0, 1e-9);
    EXPECT_NEAR(r.sen[0], 80.0, 1e-9);
    EXPECT_NEAR(r.spe[0], 90.0, 1e-9);
    EXPECT_NEAR(r.f_score[0], 80.0, 1e-9);  // P=0.8, R=0.8

    // Class 1: TP=6 FN=4 FP=4 TN=16.
    EXPECT_NEAR(r.acc[1], 60.0, 1e-9);
    EXPECT_NEAR(r.spe[1], 80.0, 1e-9);
    EXPECT_NEAR(r.f_score[1], 60.0, 1e-9);  // P=0.6, R=0.6

    // Class 2: TP=7 FN=3 FP=3 TN=17.
    EXPECT_NEAR(r.acc[2], 70.0, 1e-9);
    EXPECT_NEAR(r.spe[2], 85.0, 1e-9);
    EXPECT_NEAR(r.f_score[2], 70.0, 1e-9);  // P=0.7, R=0.7

    // Confusion row sums equal per-class test counts.
    for (int c = 0; c < 3; ++c) EXPECT_EQ(r.confusion.row(c).sum(), 10);
    // Micro-averaged recall equals overall accuracy.
    double micro = 0.0;
    for (int c = 0; c < 3; ++c) micro += r.confusion(c, c);
    micro = 100.0 * micro / 30.0;
    EXPECT_NEAR(micro, r.overall_accuracy, 1e-12);
}

TEST(EvalMetrics, LengthMismatchRejected) {
    EXPECT_THROW(eval_metrics({0, 1}, {0}, 2), Error);
}

TEST(SplitTrainTest, EightyTwentyPerClass) {
    auto ds = blob_dataset(3, 100, 2, 5.0, 1);
    auto split = split_train_test(ds, 0.8, 7);
    EXPECT_EQ(split.train.rows(), 240);
    EXPECT_EQ(split.test.rows(), 60);
    for (int c = 0; c < 3; ++c) {
        int train_c = 0, test_c = 0;
        for (int l : split.train.labels) train_c += l == c;
        for (int l : split.test.labels) test_c += l == c;
        EXPECT_EQ(train_c, 80);
        EXPECT_EQ(test_c, 20);
    }
}

TEST(SplitTrainTest, FiftyFifty) {
    auto ds = blob_dataset(2, 50, 2, 5.0, 2);
    auto split = split_train_test(ds, 0.5, 7);
    EXPECT_EQ(split.train.rows(), 50);
    EXPECT_EQ(split.test.rows(), 50);
}

TEST(SplitTrainTest, UnionIsInputIntersectionEmpty) {
    auto ds = blob_dataset(2, 31, 3, 4.0, 3);
    auto split = split_train_test(ds, 0.7, 9);
    EXPECT_EQ(split.train.rows() + split.test.rows(), ds.rows());

    // Rows are unique vectors here, so set comparison works.
    auto row_key = [](const Eigen::MatrixXd& x, Eigen::Index i) {
        std::string k;
        for (Eigen::Index j = 0; j < x.cols(); ++j) k += format_g9(x(i, j)) + ",";
        return k;
    };
    std::set<std::string> train_rows, test_rows, all_rows;
    for (Eigen::Index i = 0; i < split.train.rows(); ++i)
        train_rows.insert(row_key(split.train.x, i));
    for (Eigen::Index i = 0; i < split.test.rows(); ++i)
        test_rows.insert(row_key(split.test.x, i));
    for (Eigen::Index i = 0; i < ds.rows(); ++i) all_rows.insert(row_key(ds.x, i));

    std::set<std::string> unioned = train_rows;
    unioned.insert(test_rows.begin(), test_rows.end());
    EXPECT_EQ(unioned, all_rows);
    for (const auto& k : test_rows) EXPECT_EQ(train_rows.count(k), 0u);
}

TEST(SplitTrainTest, ClassTooSmallRejected) {
    LabeledDataset ds;
    ds.x = Eigen::MatrixXd::Random(3, 2);
    ds.labels = {0, 0, 1};
    ds.class_names = {"a", "b"};
    try {
        split_train_test(ds, 0.8, 1);
        FAIL() << "expected ClassTooSmall";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ClassTooSmall);
    }
}

TEST(CrossValidate, TenFoldsOfEqualSize) {
    auto ds = blob_dataset(2, 500, 3, 5.0, 4);
    auto cv = cross_validate(ModelKind::Dt, ds, Hyperparams{}, 10, 7);
    ASSERT_EQ(cv.folds.size(), 10u);
    for (const auto& fold : cv.folds) EXPECT_EQ(fold.confusion.sum(), 100);
    EXPECT_GT(cv.mean_accuracy, 95.0);  // well separated blobs
}

// A dataset with zero-information features: accuracy collapses to the
// majority-class prior.
TEST(CrossValidate, ConstantFeaturesGivePriorRate) {
    LabeledDataset ds;
    const int n0 = 300, n1 = 100;
    ds.x = Eigen::MatrixXd::Ones(n0 + n1, 3);
    ds.labels.assign(n0, 0);
    ds.labels.insert(ds.labels.end(), n1, 1);
    ds.class_names = {"major", "minor"};

    auto cv = cross_validate(ModelKind::Dt, ds, Hyperparams{}, 10, 7, /*use_lda=*/false);
    const double prior = 100.0 * n0 / (n0 + n1);
    EXPECT_NEAR(cv.mean_accuracy, prior, 5.0);
}

TEST(CrossValidate, ClassTooSmallForK) {
    auto ds = blob_dataset(2, 5, 2, 5.0, 5);
    EXPECT_THROW(cross_validate(ModelKind::Dt, ds, Hyperparams{}, 10, 7), Error);
}

TEST(PermutationImportance, PlantedDeterministicFeatureRanksFirst) {
    // Feature 0 fully determines the label; features 1-2 are noise.
    LabeledDataset ds;
    Rng rng(6);
    const int n = 600;
    ds.x.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        int label = i % 3;
        ds.x(i, 0) = label * 2.0 + rng.gaussian(0, 0.05);
        ds.x(i, 1) = rng.gaussian();
        ds.x(i, 2) = rng.gaussian();
        ds.labels.push_back(label);
    }
    ds.class_names = {"a", "b", "c"};

    auto model = train(ModelKind::Dt, ds, Hyperparams{}, 7);
    auto heldout = ds;  // same generator; adequate for the ranking property
    auto scores = permutation_importance(
        [&](const Eigen::RowVectorXd& row) { return model.predict(row).label; },
        heldout.x, heldout.labels, 20, 7);

    EXPECT_GT(scores(0), scores(1));
    EXPECT_GT(scores(0), scores(2));
    EXPECT_GT(scores(0), 0.5);             // shuffling the real feature is catastrophic
    EXPECT_LT(std::abs(scores(1)), 0.02);  // noise feature
    EXPECT_LT(std::abs(scores(2)), 0.02);
}

TEST(PermutationImportance, SingleRowIsZero) {
    LabeledDataset ds;
    ds.x = Eigen::MatrixXd::Ones(1, 2);
    ds.labels = {0};
    ds.class_names = {"a"};
    auto scores = permutation_importance(
        [](const Eigen::RowVectorXd&) { return 0; }, ds.x, ds.labels, 5, 7);
    EXPECT_DOUBLE_EQ(scores(0), 0.0);
    EXPECT_DOUBLE_EQ(scores(1), 0.0);
}
