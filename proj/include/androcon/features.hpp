// Feature conditioning: z-score standardization and Linear Discriminant
// Analysis projection to C-1 dimensions.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "androcon/common.hpp"
#include "androcon/log_ingest.hpp"

namespace androcon {

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;  // population std; zero-variance columns get 1 and a flag
    std::vector<bool> zero_variance;
};

inline Standardizer fit_standardizer(const LabeledDataset& ds) {
    if (ds.rows() < 2) throw Error(ErrorCode::TooFewRows, "standardizer needs >= 2 rows");
    const Eigen::Index d = ds.dims();

    Standardizer st;
    st.means = ds.x.colwise().mean();
    st.stds.resize(d);
    st.zero_variance.assign(static_cast<size_t>(d), false);
    for (Eigen::Index j = 0; j < d; ++j) {
        double var = (ds.x.col(j).array() - st.means(j)).square().mean();
        double sd = std::sqrt(var);
        if (sd > 0.0) {
            st.stds(j) = sd;
        } else {
            st.stds(j) = 1.0;
            st.zero_variance[static_cast<size_t>(j)] = true;
        }
    }
    return st;
}

inline Eigen::VectorXd apply_standardizer(const Standardizer& st, const Eigen::VectorXd& fv) {
    if (fv.size() != st.means.size())
        throw Error(ErrorCode::DimMismatch, "feature vector does not match standardizer");
    return (fv - st.means).cwiseQuotient(st.stds);
}

inline Eigen::MatrixXd apply_standardizer(const Standardizer& st, const Eigen::MatrixXd& x) {
    if (x.cols() != st.means.size())
        throw Error(ErrorCode::DimMismatch, "matrix does not match standardizer");
    return (x.rowwise() - st.means.transpose()).array().rowwise() /
           st.stds.transpose().array();
}

// ---------------------------------------------------------------------------
// Linear Discriminant Analysis
// ---------------------------------------------------------------------------

struct LdaProjection {
    Eigen::MatrixXd w;            // d x (C-1), unit-norm columns
    Eigen::MatrixXd class_means;  // C x d, in the fitted (input) space
    int fitted_classes = 0;
    Eigen::VectorXd eigenvalues;  // non-increasing generalized eigenvalues
    bool degenerate_warning = false;  // classes indistinguishable (eigenvalues ~ 0)
};

namespace detail {

/// Within- and between-class scatter of a labeled matrix.
inline void scatter_matrices(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                             int num_classes, Eigen::MatrixXd& sw, Eigen::MatrixXd& sb,
                             Eigen::MatrixXd& class_means) {
    const Eigen::Index d = x.cols();
    Eigen::VectorXd grand = x.colwise().mean();
    class_means = Eigen::MatrixXd::Zero(num_classes, d);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(num_classes);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        class_means.row(labels[static_cast<size_t>(i)]) += x.row(i);
        counts(labels[static_cast<size_t>(i)]) += 1;
    }
    for (int c = 0; c < num_classes; ++c) {
        if (counts(c) < 2)
            throw Error(ErrorCode::DegenerateClasses,
                        "class " + std::to_string(c) + " has fewer than 2 rows");
        class_means.row(c) /= counts(c);
    }

    sw = Eigen::MatrixXd::Zero(d, d);
    sb = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::VectorXd dev = x.row(i).transpose() -
                              class_means.row(labels[static_cast<size_t>(i)]).transpose();
        sw += dev * dev.transpose();
    }
    for (int c = 0; c < num_classes; ++c) {
        Eigen::VectorXd dev = class_means.row(c).transpose() - grand;
        sb += counts(c) * dev * dev.transpose();
    }
}

/// Fix column signs so the largest-magnitude entry is positive.
inline void fix_column_signs(Eigen::MatrixXd& w) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        Eigen::Index imax = 0;
        w.col(j).cwiseAbs().maxCoeff(&imax);
        if (w(imax, j) < 0) w.col(j) = -w.col(j);
    }
}

}  // namespace detail

/// Fit the LDA projection: top C-1 eigenvectors of Sw^-1 Sb, solved as a
/// generalized symmetric eigenproblem through Cholesky whitening of Sw.
/// Sw is ridge-regularized with eps = 1e-6 trace(Sw)/d.
inline LdaProjection fit_lda(const LabeledDataset& ds) {
    ds.validate();
    const int num_classes = static_cast<int>(ds.class_names.size());
    const Eigen::Index d = ds.dims();
    if (num_classes < 2)
        throw Error(ErrorCode::DegenerateClasses, "LDA needs at least 2 classes");
    if (d < num_classes - 1)
        throw Error(ErrorCode::DegenerateClasses,
                    "need d >= C-1 (" + std::to_string(d) + " < " +
                        std::to_string(num_classes - 1) + ")");

    Eigen::MatrixXd sw, sb, class_means;
    detail::scatter_matrices(ds.x, ds.labels, num_classes, sw, sb, class_means);

    const double eps = 1e-6 * sw.trace() / static_cast<double>(d);
    sw += std::max(eps, 1e-12) * Eigen::MatrixXd::Identity(d, d);

    Eigen::LLT<Eigen::MatrixXd> llt(sw);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularScatter, "within-class scatter not factorizable");

    // Whiten: M = L^-1 Sb L^-T is symmetric with the same eigenvalues as Sw^-1 Sb.
    Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd m = l.triangularView<Eigen::Lower>().solve(sb);
    m = l.triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
    m = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorCode::SingularScatter, "eigen decomposition failed");

    LdaProjection proj;
    proj.fitted_classes = num_classes;
    proj.class_means = class_means;
    const int k = num_classes - 1;
    proj.w.resize(d, k);
    proj.eigenvalues.resize(k);
    // SelfAdjointEigenSolver sorts ascending; take the top k in descending order.
    for (int j = 0; j < k; ++j) {
        Eigen::Index src = d - 1 - j;
        proj.eigenvalues(j) = eig.eigenvalues()(src);
        Eigen::VectorXd u = eig.eigenvectors().col(src);
        Eigen::VectorXd w = l.transpose().triangularView<Eigen::Upper>().solve(u);
        double norm = w.norm();
        if (!(norm > 0.0) || !w.allFinite())
            throw Error(ErrorCode::SingularScatter, "non-finite projection column");
        proj.w.col(j) = w / norm;
    }
    detail::fix_column_signs(proj.w);

    if (proj.eigenvalues(0) < 1e-9) proj.degenerate_warning = true;
    return proj;
}

/// Project a feature vector to the C-1 dimensional discriminant space.
inline Eigen::VectorXd project(const LdaProjection& p, const Eigen::VectorXd& fv) {
    if (fv.size() != p.w.rows())
        throw Error(ErrorCode::DimMismatch, "feature vector does not match projection");
    return p.w.transpose() * fv;
}

inline Eigen::MatrixXd project(const LdaProjection& p, const Eigen::MatrixXd& x) {
    if (x.cols() != p.w.rows())
        throw Error(ErrorCode::DimMismatch, "matrix does not match projection");
    return x * p.w;
}

/// Fisher criterion trace(Sw^-1 Sb) of labeled data under a projection.
/// Used for the optimality check against random projections.
inline double fisher_criterion(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                               int num_classes, const Eigen::MatrixXd& w) {
    Eigen::MatrixXd projected = x * w;
    Eigen::MatrixXd sw, sb, means;
    detail::scatter_matrices(projected, labels, num_classes, sw, sb, means);
    const double eps = 1e-9 * std::max(sw.trace(), 1e-30) / static_cast<double>(w.cols());
    sw += eps * Eigen::MatrixXd::Identity(w.cols(), w.cols());
    return (sw.ldlt().solve(sb)).trace();
}

// ---------------------------------------------------------------------------
// Fitted pipeline stage (standardizer + LDA) with JSON persistence
// ---------------------------------------------------------------------------

struct FittedProjection {
    Standardizer standardizer;
    LdaProjection lda;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    bool use_lda = true;

    Eigen::VectorXd transform(const Eigen::VectorXd& fv) const {
        Eigen::VectorXd z = apply_standardizer(standardizer, fv);
        return use_lda ? project(lda, z) : z;
    }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd z = apply_standardizer(standardizer, x);
        return use_lda ? project(lda, z) : z;
    }
};

/// Fit standardizer then LDA on the standardized data (pipeline order:
/// scaling before LDA).
inline FittedProjection fit_projection(const LabeledDataset& ds, bool use_lda = true) {
    FittedProjection fp;
    fp.standardizer = fit_standardizer(ds);
    fp.class_names = ds.class_names;
    fp.feature_names = ds.feature_names;
    fp.use_lda = use_lda;
    if (use_lda) {
        LabeledDataset z = ds;
        z.x = apply_standardizer(fp.standardizer, ds.x);
        fp.lda = fit_lda(z);
    }
    return fp;
}

inline nlohmann::json projection_to_json(const FittedProjection& fp) {
    nlohmann::json j;
    j["means"] = std::vector<double>(fp.standardizer.means.data(),
                                     fp.standardizer.means.data() + fp.standardizer.means.size());
    j["stds"] = std::vector<double>(fp.standardizer.stds.data(),
                                    fp.standardizer.stds.data() + fp.standardizer.stds.size());
    j["class_names"] = fp.class_names;
    j["feature_names"] = fp.feature_names;
    j["use_lda"] = fp.use_lda;
    if (fp.use_lda) {
        std::vector<double> w_rowmajor;
        for (Eigen::Index i = 0; i < fp.lda.w.rows(); ++i)
            for (Eigen::Index jj = 0; jj < fp.lda.w.cols(); ++jj)
                w_rowmajor.push_back(fp.lda.w(i, jj));
        j["W"] = w_rowmajor;
        j["W_rows"] = fp.lda.w.rows();
        j["W_cols"] = fp.lda.w.cols();
    }
    return j;
}

inline FittedProjection projection_from_json(const nlohmann::json& j) {
    FittedProjection fp;
    auto means = j.at("means").get<std::vector<double>>();
    auto stds = j.at("stds").get<std::vector<double>>();
    fp.standardizer.means =
        Eigen::Map<const Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
    fp.standardizer.stds =
        Eigen::Map<const Eigen::VectorXd>(stds.data(), static_cast<Eigen::Index>(stds.size()));
    fp.standardizer.zero_variance.assign(means.size(), false);
    fp.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (j.contains("feature_names"))
        fp.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    fp.use_lda = j.value("use_lda", true);
    if (fp.use_lda) {
        auto w = j.at("W").get<std::vector<double>>();
        const Eigen::Index rows = j.at("W_rows").get<Eigen::Index>();
        const Eigen::Index cols = j.at("W_cols").get<Eigen::Index>();
        if (rows * cols != static_cast<Eigen::Index>(w.size()))
            throw Error(ErrorCode::DimMismatch, "projection W shape mismatch");
        fp.lda.w.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index jj = 0; jj < cols; ++jj)
                fp.lda.w(i, jj) = w[static_cast<size_t>(i * cols + jj)];
        fp.lda.fitted_classes = static_cast<int>(fp.class_names.size());
    }
    return fp;
}

}  // namespace androcon
