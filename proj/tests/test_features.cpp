#include "androcon/features.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "androcon/common.hpp"

using namespace androcon;

namespace {

LabeledDataset gaussian_blobs(int num_classes, int rows_per_class, int dims,
                              double separation, uint64_t seed) {
    LabeledDataset ds;
    Rng rng(seed);
    const int n = num_classes * rows_per_class;
    ds.x.resize(n, dims);
    ds.labels.reserve(n);
    for (int c = 0; c < num_classes; ++c) {
        Eigen::VectorXd center(dims);
        for (int j = 0; j < dims; ++j) center(j) = rng.gaussian(0, separation);
        for (int i = 0; i < rows_per_class; ++i) {
            int row = c * rows_per_class + i;
            for (int j = 0; j < dims; ++j) ds.x(row, j) = center(j) + rng.gaussian();
            ds.labels.push_back(c);
        }
    }
    for (int c = 0; c < num_classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (int j = 0; j < dims; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    return ds;
}

}  // namespace

TEST(Standardizer, TwoPointColumn) {
    LabeledDataset ds;
    ds.x.resize(2, 1);
    ds.x << 2.0, 4.0;
    ds.labels = {0, 0};
    ds.class_names = {"a"};
    auto st = fit_standardizer(ds);
    Eigen::MatrixXd z = apply_standardizer(st, ds.x);
    EXPECT_DOUBLE_EQ(z(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(z(1, 0), 1.0);
}

TEST(Standardizer, ConstantColumnFlagged) {
    LabeledDataset ds;
    ds.x.resize(3, 2);
    ds.x << 1, 5, 1, 6, 1, 7;
    ds.labels = {0, 0, 0};
    ds.class_names = {"a"};
    auto st = fit_standardizer(ds);
    EXPECT_TRUE(st.zero_variance[0]);
    EXPECT_FALSE(st.zero_variance[1]);
    Eigen::MatrixXd z = apply_standardizer(st, ds.x);
    EXPECT_DOUBLE_EQ(z(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(z(2, 0), 0.0);
}

// Refitting on already-standardized data is the identity transform.
TEST(Standardizer, IdempotentOnTransformedData) {
    auto ds = gaussian_blobs(2, 100, 4, 3.0, 10);
    auto st = fit_standardizer(ds);
    LabeledDataset z = ds;
    z.x = apply_standardizer(st, ds.x);
    auto st2 = fit_standardizer(z);
    EXPECT_LT(st2.means.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((st2.stds.array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(Standardizer, TooFewRows) {
    LabeledDataset ds;
    ds.x.resize(1, 2);
    ds.x.setZero();
    ds.labels = {0};
    ds.class_names = {"a"};
    EXPECT_THROW(fit_standardizer(ds), Error);
}

TEST(FitLda, FiveClassesEightDims) {
    auto ds = gaussian_blobs(5, 60, 8, 4.0, 20);
    auto proj = fit_lda(ds);
    EXPECT_EQ(proj.w.rows(), 8);
    EXPECT_EQ(proj.w.cols(), 4);  // C-1
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(proj.w.col(j).norm(), 1.0, 1e-9);
    for (int j = 1; j < 4; ++j) EXPECT_LE(proj.eigenvalues(j), proj.eigenvalues(j - 1));
}

TEST(FitLda, SeparatesWellSeparatedClasses) {
    // Two tight 2-D Gaussians far apart: projected class means differ by
    // more than 5 pooled stds.
    LabeledDataset ds;
    Rng rng(30);
    const int n = 200;
    ds.x.resize(2 * n, 2);
    for (int i = 0; i < n; ++i) {
        ds.x(i, 0) = rng.gaussian(0, 1);
        ds.x(i, 1) = rng.gaussian(0, 1);
        ds.x(n + i, 0) = rng.gaussian(12, 1);
        ds.x(n + i, 1) = rng.gaussian(-9, 1);
        ds.labels.push_back(0);
    }
    for (int i = 0; i < n; ++i) ds.labels.push_back(1);
    ds.class_names = {"a", "b"};
    auto proj = fit_lda(ds);

    std::vector<double> p0, p1;
    for (int i = 0; i < 2 * n; ++i) {
        double v = project(proj, Eigen::VectorXd(ds.x.row(i).transpose()))(0);
        (i < n ? p0 : p1).push_back(v);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / v.size();
    };
    auto var = [&](const std::vector<double>& v, double m) {
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s / v.size();
    };
    double m0 = mean(p0), m1 = mean(p1);
    double pooled = std::sqrt(0.5 * (var(p0, m0) + var(p1, m1)));
    EXPECT_GT(std::abs(m0 - m1), 5.0 * pooled);
}

TEST(FitLda, IdenticalClassesDegenerateWarning) {
    LabeledDataset ds;
    Rng rng(31);
    ds.x.resize(200, 3);
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 3; ++j) ds.x(i, j) = rng.gaussian();
    // Same distribution, label split at random: no separability.
    for (int i = 0; i < 200; ++i) ds.labels.push_back(i % 2);
    ds.class_names = {"a", "b"};
    auto proj = fit_lda(ds);
    EXPECT_LT(proj.eigenvalues(0), 0.1);  // near-zero separation
}

TEST(FitLda, ClassWithOneRowRejected) {
    LabeledDataset ds;
    ds.x.resize(3, 2);
    ds.x << 0, 0, 1, 1, 2, 2;
    ds.labels = {0, 0, 1};
    ds.class_names = {"a", "b"};
    try {
        fit_lda(ds);
        FAIL() << "expected DegenerateClasses";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateClasses);
    }
}

TEST(Project, Linearity) {
    auto ds = gaussian_blobs(3, 50, 5, 3.0, 40);
    auto proj = fit_lda(ds);

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
    EXPECT_LT(project(proj, zero).cwiseAbs().maxCoeff(), 1e-15);

    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd a(5), b(5);
        for (int j = 0; j < 5; ++j) {
            a(j) = rng.gaussian();
            b(j) = rng.gaussian();
        }
        Eigen::VectorXd lhs = project(proj, Eigen::VectorXd(a + b));
        Eigen::VectorXd rhs = project(proj, a) + project(proj, b);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Project, DimMismatchRejected) {
    auto ds = gaussian_blobs(2, 50, 4, 3.0, 42);
    auto proj = fit_lda(ds);
    Eigen::VectorXd wrong_dim = Eigen::VectorXd::Zero(3);
    EXPECT_THROW(project(proj, wrong_dim), Error);
}

// The fitted projection maximizes the Fisher criterion: no random projection
// of the same shape beats it.
TEST(FitLda, BeatsRandomProjections) {
    auto ds = gaussian_blobs(5, 80, 8, 2.0, 50);
    auto st = fit_standardizer(ds);
    LabeledDataset z = ds;
    z.x = apply_standardizer(st, ds.x);
    auto proj = fit_lda(z);

    const int num_classes = 5;
    double fitted = fisher_criterion(z.x, z.labels, num_classes, proj.w);
    Rng rng(51);
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXd w(8, 4);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 4; ++j) w(i, j) = rng.gaussian();
        for (int j = 0; j < 4; ++j) w.col(j).normalize();
        double random_score = fisher_criterion(z.x, z.labels, num_classes, w);
        EXPECT_GE(fitted + 1e-9, random_score) << "random projection " << t;
    }
}

// Deterministic up to column sign; sign fixing makes it exactly reproducible.
TEST(FitLda, DeterministicFit) {
    auto ds = gaussian_blobs(4, 70, 6, 2.5, 60);
    auto p1 = fit_lda(ds);
    auto p2 = fit_lda(ds);
    EXPECT_EQ((p1.w - p2.w).cwiseAbs().maxCoeff(), 0.0);
}

// Subspace comparison via principal angles: fitting the same data after a
// row permutation spans the same space.
TEST(FitLda, SubspaceStableUnderRowPermutation) {
    auto ds = gaussian_blobs(3, 100, 6, 3.0, 70);
    auto p1 = fit_lda(ds);

    // Permute rows.
    Rng rng(71);
    std::vector<int> perm(static_cast<size_t>(ds.rows()));
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    rng.shuffle(perm);
    LabeledDataset shuffled = ds;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        shuffled.x.row(i) = ds.x.row(perm[static_cast<size_t>(i)]);
        shuffled.labels[static_cast<size_t>(i)] = ds.labels[static_cast<size_t>(perm[static_cast<size_t>(i)])];
    }
    auto p2 = fit_lda(shuffled);

    // Principal angles between the two column spaces are ~0.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd1(p1.w, Eigen::ComputeThinU);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(p2.w, Eigen::ComputeThinU);
    Eigen::MatrixXd cross = svd1.matrixU().transpose() * svd2.matrixU();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd3(cross);
    double min_sv = svd3.singularValues().minCoeff();
    EXPECT_GT(min_sv, 1.0 - 1e-6);  // cos(principal angle) ~ 1
}

TEST(FittedProjection, JsonRoundTripPreservesTransform) {
    auto ds = gaussian_blobs(4, 60, 5, 3.0, 80);
    auto fp = fit_projection(ds);
    auto j = projection_to_json(fp);
    auto back = projection_from_json(j);

    Rng rng(81);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v(5);
        for (int i = 0; i < 5; ++i) v(i) = rng.gaussian();
        Eigen::VectorXd a = fp.transform(v);
        Eigen::VectorXd b = back.transform(v);
        EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);  // bit-exact
    }
}
