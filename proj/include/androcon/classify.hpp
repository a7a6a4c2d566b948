// Event classifiers: decision tree, random forest, gradient boosting,
// k-nearest-neighbour and Gaussian naive Bayes, with versioned JSON
// model serialization.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "androcon/common.hpp"
#include "androcon/log_ingest.hpp"
#include "androcon/tree.hpp"

namespace androcon {

enum class ModelKind { Dt, Rf, Gb, Knn, Nb };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Dt: return "dt";
        case ModelKind::Rf: return "rf";
        case ModelKind::Gb: return "gb";
        case ModelKind::Knn: return "knn";
        case ModelKind::Nb: return "nb";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& name) {
    if (name == "dt") return ModelKind::Dt;
    if (name == "rf") return ModelKind::Rf;
    if (name == "gb") return ModelKind::Gb;
    if (name == "knn") return ModelKind::Knn;
    if (name == "nb") return ModelKind::Nb;
    throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + name + "'");
}

/// Per-model hyperparameters. Defaults are the tuned values used throughout.
struct Hyperparams {
    struct Rf {
        int n_estimators = 100;
        int max_depth = 10;
        int min_samples_split = 10;
        int min_samples_leaf = 4;
        bool bootstrap = true;
    } rf;
    struct Gb {
        int n_estimators = 100;
        double learning_rate = 0.01;
        int max_depth = 10;
        int min_samples_split = 10;
        int min_samples_leaf = 4;
    } gb;
    struct Knn {
        int n_neighbors = 10;
        std::string weights = "distance";
    } knn;
    struct Dt {
        int max_depth = 20;
        int min_samples_split = 20;
        int min_samples_leaf = 1;
    } dt;
    struct Nb {
        double var_smoothing = 1e-9;
    } nb;

    void validate() const {
        if (rf.n_estimators < 1 || gb.n_estimators < 1 || knn.n_neighbors < 1)
            throw Error(ErrorCode::InvalidArgument, "estimator/neighbor counts must be positive");
        if (rf.max_depth < 1 || gb.max_depth < 1 || dt.max_depth < 1)
            throw Error(ErrorCode::InvalidArgument, "max_depth must be positive");
        if (rf.min_samples_split < 2 || gb.min_samples_split < 2 || dt.min_samples_split < 2)
            throw Error(ErrorCode::InvalidArgument, "min_samples_split must be >= 2");
        if (rf.min_samples_leaf < 1 || gb.min_samples_leaf < 1 || dt.min_samples_leaf < 1)
            throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be >= 1");
        if (!(gb.learning_rate > 0.0 && gb.learning_rate <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "learning_rate must be in (0,1]");
        if (!(nb.var_smoothing > 0.0))
            throw Error(ErrorCode::InvalidArgument, "var_smoothing must be positive");
    }
};

inline void to_json(nlohmann::json& j, const Hyperparams& hp) {
    j = {{"rf",
          {{"n_estimators", hp.rf.n_estimators},
           {"max_depth", hp.rf.max_depth},
           {"min_samples_split", hp.rf.min_samples_split},
           {"min_samples_leaf", hp.rf.min_samples_leaf},
           {"bootstrap", hp.rf.bootstrap}}},
         {"gb",
          {{"n_estimators", hp.gb.n_estimators},
           {"learning_rate", hp.gb.learning_rate},
           {"max_depth", hp.gb.max_depth},
           {"min_samples_split", hp.gb.min_samples_split},
           {"min_samples_leaf", hp.gb.min_samples_leaf}}},
         {"knn", {{"n_neighbors", hp.knn.n_neighbors}, {"weights", hp.knn.weights}}},
         {"dt",
          {{"max_depth", hp.dt.max_depth},
           {"min_samples_split", hp.dt.min_samples_split},
           {"min_samples_leaf", hp.dt.min_samples_leaf}}},
         {"nb", {{"var_smoothing", hp.nb.var_smoothing}}}};
}

inline void from_json(const nlohmann::json& j, Hyperparams& hp) {
    if (j.contains("rf")) {
        const auto& r = j.at("rf");
        hp.rf.n_estimators = r.value("n_estimators", hp.rf.n_estimators);
        hp.rf.max_depth = r.value("max_depth", hp.rf.max_depth);
        hp.rf.min_samples_split = r.value("min_samples_split", hp.rf.min_samples_split);
        hp.rf.min_samples_leaf = r.value("min_samples_leaf", hp.rf.min_samples_leaf);
        hp.rf.bootstrap = r.value("bootstrap", hp.rf.bootstrap);
    }
    if (j.contains("gb")) {
        const auto& g = j.at("gb");
        hp.gb.n_estimators = g.value("n_estimators", hp.gb.n_estimators);
        hp.gb.learning_rate = g.value("learning_rate", hp.gb.learning_rate);
        hp.gb.max_depth = g.value("max_depth", hp.gb.max_depth);
        hp.gb.min_samples_split = g.value("min_samples_split", hp.gb.min_samples_split);
        hp.gb.min_samples_leaf = g.value("min_samples_leaf", hp.gb.min_samples_leaf);
    }
    if (j.contains("knn")) {
        hp.knn.n_neighbors = j.at("knn").value("n_neighbors", hp.knn.n_neighbors);
        hp.knn.weights = j.at("knn").value("weights", hp.knn.weights);
    }
    if (j.contains("dt")) {
        const auto& d = j.at("dt");
        hp.dt.max_depth = d.value("max_depth", hp.dt.max_depth);
        hp.dt.min_samples_split = d.value("min_samples_split", hp.dt.min_samples_split);
        hp.dt.min_samples_leaf = d.value("min_samples_leaf", hp.dt.min_samples_leaf);
    }
    if (j.contains("nb")) hp.nb.var_smoothing = j.at("nb").value("var_smoothing", hp.nb.var_smoothing);
}

// ---------------------------------------------------------------------------
// Model payloads
// ---------------------------------------------------------------------------

struct GradientBoosting {
    int num_classes = 0;
    double learning_rate = 0.01;
    Eigen::VectorXd init_scores;                    // per-class prior log-odds
    std::vector<std::vector<DecisionTree>> stages;  // [stage][class]

    /// One-vs-rest raw scores after the first `upto` stages (-1 = all).
    Eigen::VectorXd decision_function(const Eigen::RowVectorXd& row, int upto = -1) const {
        Eigen::VectorXd f = init_scores;
        const int n = upto < 0 ? static_cast<int>(stages.size())
                               : std::min<int>(upto, static_cast<int>(stages.size()));
        for (int m = 0; m < n; ++m)
            for (int c = 0; c < num_classes; ++c)
                f(c) += learning_rate * stages[static_cast<size_t>(m)][static_cast<size_t>(c)]
                                            .predict_value(row)(0);
        return f;
    }
};

struct KnnStore {
    Eigen::MatrixXd points;
    std::vector<int> labels;
    int k = 10;
};

struct NbStats {
    Eigen::MatrixXd means;  // C x d
    Eigen::MatrixXd vars;   // C x d, smoothing already added
    Eigen::VectorXd log_priors;
};

struct Prediction {
    int label = 0;
    Eigen::VectorXd scores;  // probabilities or vote fractions, sum to 1
};

struct TrainedModel {
    ModelKind kind = ModelKind::Dt;
    Hyperparams hp;
    std::vector<std::string> class_names;
    uint64_t train_seed = 0;
    int input_dim = 0;

    DecisionTree dt;
    std::vector<DecisionTree> forest;
    GradientBoosting gb;
    KnnStore knn;
    NbStats nb;

    int num_classes() const { return static_cast<int>(class_names.size()); }
    Prediction predict(const Eigen::RowVectorXd& row) const;
};

namespace detail {

inline int argmax_lowest_id(const Eigen::VectorXd& scores) {
    int best = 0;
    for (int c = 1; c < scores.size(); ++c)
        if (scores(c) > scores(best)) best = c;
    return best;
}

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<DecisionTree> fit_forest(const Eigen::MatrixXd& x,
                                            const std::vector<int>& y, int num_classes,
                                            const Hyperparams::Rf& p, uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    TreeGrowth growth{p.max_depth, p.min_samples_split, p.min_samples_leaf,
                      std::max(1, static_cast<int>(std::floor(std::sqrt(
                                      static_cast<double>(x.cols())))))};
    std::vector<DecisionTree> forest;
    forest.reserve(static_cast<size_t>(p.n_estimators));
    for (int t = 0; t < p.n_estimators; ++t) {
        Rng rng(derive_seed(seed, "rf_tree", static_cast<uint64_t>(t)));
        Eigen::MatrixXd xt;
        std::vector<int> yt;
        if (p.bootstrap) {
            xt.resize(n, x.cols());
            yt.resize(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                int s = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n)));
                xt.row(i) = x.row(s);
                yt[static_cast<size_t>(i)] = y[static_cast<size_t>(s)];
            }
            forest.push_back(DecisionTree::fit_classifier(xt, yt, num_classes, growth, &rng));
        } else {
            forest.push_back(DecisionTree::fit_classifier(x, y, num_classes, growth, &rng));
        }
    }
    return forest;
}

inline GradientBoosting fit_gradient_boosting(const Eigen::MatrixXd& x,
                                              const std::vector<int>& y, int num_classes,
                                              const Hyperparams::Gb& p) {
    const int n = static_cast<int>(x.rows());
    GradientBoosting gb;
    gb.num_classes = num_classes;
    gb.learning_rate = p.learning_rate;

    // Prior log-odds per class, clipped away from the singularities.
    gb.init_scores.resize(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        double prior = 0.0;
        for (int i = 0; i < n; ++i) prior += y[static_cast<size_t>(i)] == c ? 1.0 : 0.0;
        prior = std::clamp(prior / n, 1e-6, 1.0 - 1e-6);
        gb.init_scores(c) = std::log(prior / (1.0 - prior));
    }

    TreeGrowth growth{p.max_depth, p.min_samples_split, p.min_samples_leaf, 0};
    Eigen::MatrixXd f(n, num_classes);
    for (int i = 0; i < n; ++i) f.row(i) = gb.init_scores.transpose();

    for (int m = 0; m < p.n_estimators; ++m) {
        std::vector<DecisionTree> stage;
        stage.reserve(static_cast<size_t>(num_classes));
        for (int c = 0; c < num_classes; ++c) {
            // Log-loss gradient of the one-vs-rest logistic objective.
            Eigen::VectorXd residual(n);
            Eigen::VectorXd prob(n);
            for (int i = 0; i < n; ++i) {
                prob(i) = sigmoid(f(i, c));
                double target = y[static_cast<size_t>(i)] == c ? 1.0 : 0.0;
                residual(i) = target - prob(i);
            }
            DecisionTree tree = DecisionTree::fit_regressor(x, residual, growth);

            // Replace leaf means with one Newton step on the leaf samples.
            std::vector<double> numer(tree.nodes().size(), 0.0);
            std::vector<double> denom(tree.nodes().size(), 0.0);
            for (int i = 0; i < n; ++i) {
                int leaf = tree.leaf_index(x.row(i));
                numer[static_cast<size_t>(leaf)] += residual(i);
                denom[static_cast<size_t>(leaf)] += prob(i) * (1.0 - prob(i));
            }
            for (size_t k = 0; k < tree.nodes().size(); ++k) {
                if (tree.nodes()[k].feature >= 0) continue;
                double step = denom[k] > 1e-12 ? numer[k] / denom[k] : 0.0;
                tree.nodes()[k].value = Eigen::VectorXd::Constant(1, step);
            }
            for (int i = 0; i < n; ++i)
                f(i, c) += p.learning_rate * tree.predict_value(x.row(i))(0);
            stage.push_back(std::move(tree));
        }
        gb.stages.push_back(std::move(stage));
    }
    return gb;
}

inline NbStats fit_naive_bayes(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               int num_classes, const Hyperparams::Nb& p) {
    const Eigen::Index d = x.cols();
    const int n = static_cast<int>(x.rows());
    NbStats nb;
    nb.means = Eigen::MatrixXd::Zero(num_classes, d);
    nb.vars = Eigen::MatrixXd::Zero(num_classes, d);
    nb.log_priors.resize(num_classes);

    Eigen::VectorXi counts = Eigen::VectorXi::Zero(num_classes);
    for (int i = 0; i < n; ++i) {
        nb.means.row(y[static_cast<size_t>(i)]) += x.row(i);
        counts(y[static_cast<size_t>(i)]) += 1;
    }
    for (int c = 0; c < num_classes; ++c) {
        if (counts(c) == 0)
            throw Error(ErrorCode::DegenerateDataset, "class without training rows");
        nb.means.row(c) /= counts(c);
        nb.log_priors(c) = std::log(static_cast<double>(counts(c)) / n);
    }
    for (int i = 0; i < n; ++i) {
        int c = y[static_cast<size_t>(i)];
        nb.vars.row(c) += (x.row(i) - nb.means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < num_classes; ++c) nb.vars.row(c) /= counts(c);

    // Smoothing proportional to the largest overall feature variance.
    Eigen::RowVectorXd grand_mean = x.colwise().mean();
    double max_var = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        double v = (x.col(j).array() - grand_mean(j)).square().mean();
        max_var = std::max(max_var, v);
    }
    nb.vars.array() += p.var_smoothing * std::max(max_var, 1e-300);
    return nb;
}

}  // namespace detail

/// Train a model of the requested kind. Deterministic given the seed: all
/// resampling is index-keyed off the seed, so reordering training rows with
/// the same seed may change the fit, but rerunning never does.
inline TrainedModel train(ModelKind kind, const LabeledDataset& ds, const Hyperparams& hp,
                          uint64_t seed) {
    ds.validate();
    hp.validate();
    const int num_classes = static_cast<int>(ds.class_names.size());
    if (num_classes < 2)
        throw Error(ErrorCode::DegenerateDataset, "training needs at least 2 classes");
    bool multiple = false;
    for (int l : ds.labels)
        if (l != ds.labels[0]) { multiple = true; break; }
    if (!multiple)
        throw Error(ErrorCode::DegenerateDataset, "all rows share one label");

    TrainedModel model;
    model.kind = kind;
    model.hp = hp;
    model.class_names = ds.class_names;
    model.train_seed = seed;
    model.input_dim = static_cast<int>(ds.dims());

    switch (kind) {
        case ModelKind::Dt: {
            TreeGrowth growth{hp.dt.max_depth, hp.dt.min_samples_split,
                              hp.dt.min_samples_leaf, 0};
            model.dt = DecisionTree::fit_classifier(ds.x, ds.labels, num_classes, growth);
            break;
        }
        case ModelKind::Rf:
            model.forest = detail::fit_forest(ds.x, ds.labels, num_classes, hp.rf, seed);
            break;
        case ModelKind::Gb:
            model.gb = detail::fit_gradient_boosting(ds.x, ds.labels, num_classes, hp.gb);
            break;
        case ModelKind::Knn:
            model.knn.points = ds.x;
            model.knn.labels = ds.labels;
            model.knn.k = hp.knn.n_neighbors;
            break;
        case ModelKind::Nb:
            model.nb = detail::fit_naive_bayes(ds.x, ds.labels, num_classes, hp.nb);
            break;
    }
    return model;
}

inline Prediction TrainedModel::predict(const Eigen::RowVectorXd& row) const {
    if (row.size() != input_dim)
        throw Error(ErrorCode::DimMismatch,
                    "expected " + std::to_string(input_dim) + " features, got " +
                        std::to_string(row.size()));
    const int c = num_classes();
    Prediction out;
    out.scores = Eigen::VectorXd::Zero(c);

    switch (kind) {
        case ModelKind::Dt:
            out.scores = dt.predict_value(row);
            break;
        case ModelKind::Rf: {
            for (const auto& tree : forest) out.scores(tree.predict_class(row)) += 1.0;
            out.scores /= static_cast<double>(forest.size());
            break;
        }
        case ModelKind::Gb: {
            Eigen::VectorXd f = gb.decision_function(row);
            for (int k = 0; k < c; ++k) out.scores(k) = detail::sigmoid(f(k));
            double total = out.scores.sum();
            if (total > 0) out.scores /= total;
            break;
        }
        case ModelKind::Knn: {
            const int n = static_cast<int>(knn.points.rows());
            const int k = std::min(knn.k, n);
            std::vector<std::pair<double, int>> dist(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                dist[static_cast<size_t>(i)] = {(knn.points.row(i) - row).squaredNorm(), i};
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            for (int i = 0; i < k; ++i) {
                double w = 1.0 / (std::sqrt(dist[static_cast<size_t>(i)].first) + 1e-12);
                out.scores(knn.labels[static_cast<size_t>(dist[static_cast<size_t>(i)].second)]) += w;
            }
            out.scores /= out.scores.sum();
            break;
        }
        case ModelKind::Nb: {
            Eigen::VectorXd logp(c);
            for (int cls = 0; cls < c; ++cls) {
                double lp = nb.log_priors(cls);
                for (int j = 0; j < input_dim; ++j) {
                    double var = nb.vars(cls, j);
                    double dev = row(j) - nb.means(cls, j);
                    lp += -0.5 * std::log(2.0 * std::numbers::pi * var) -
                          dev * dev / (2.0 * var);
                }
                logp(cls) = lp;
            }
            // Normalize in log space for numeric stability.
            double lmax = logp.maxCoeff();
            out.scores = (logp.array() - lmax).exp();
            out.scores /= out.scores.sum();
            break;
        }
    }
    out.label = detail::argmax_lowest_id(out.scores);
    return out;
}

// ---------------------------------------------------------------------------
// Model serialization (androcon-model/1)
// ---------------------------------------------------------------------------

inline nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json j;
    j["format"] = "androcon-model/1";
    j["kind"] = model_kind_name(m.kind);
    j["hyperparams"] = m.hp;
    j["class_names"] = m.class_names;
    j["train_seed"] = m.train_seed;
    j["input_dim"] = m.input_dim;
    switch (m.kind) {
        case ModelKind::Dt:
            j["tree"] = m.dt.to_json();
            break;
        case ModelKind::Rf: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& t : m.forest) arr.push_back(t.to_json());
            j["forest"] = arr;
            break;
        }
        case ModelKind::Gb: {
            j["gb"]["num_classes"] = m.gb.num_classes;
            j["gb"]["learning_rate"] = m.gb.learning_rate;
            j["gb"]["init_scores"] = std::vector<double>(
                m.gb.init_scores.data(), m.gb.init_scores.data() + m.gb.init_scores.size());
            nlohmann::json stages = nlohmann::json::array();
            for (const auto& stage : m.gb.stages) {
                nlohmann::json s = nlohmann::json::array();
                for (const auto& t : stage) s.push_back(t.to_json());
                stages.push_back(s);
            }
            j["gb"]["stages"] = stages;
            break;
        }
        case ModelKind::Knn: {
            j["knn"]["k"] = m.knn.k;
            j["knn"]["labels"] = m.knn.labels;
            std::vector<double> pts;
            for (Eigen::Index i = 0; i < m.knn.points.rows(); ++i)
                for (Eigen::Index jj = 0; jj < m.knn.points.cols(); ++jj)
                    pts.push_back(m.knn.points(i, jj));
            j["knn"]["points"] = pts;
            j["knn"]["rows"] = m.knn.points.rows();
            j["knn"]["cols"] = m.knn.points.cols();
            break;
        }
        case ModelKind::Nb: {
            auto mat_to_vec = [](const Eigen::MatrixXd& mat) {
                std::vector<double> v;
                for (Eigen::Index i = 0; i < mat.rows(); ++i)
                    for (Eigen::Index jj = 0; jj < mat.cols(); ++jj) v.push_back(mat(i, jj));
                return v;
            };
            j["nb"]["means"] = mat_to_vec(m.nb.means);
            j["nb"]["vars"] = mat_to_vec(m.nb.vars);
            j["nb"]["log_priors"] = std::vector<double>(
                m.nb.log_priors.data(), m.nb.log_priors.data() + m.nb.log_priors.size());
            j["nb"]["rows"] = m.nb.means.rows();
            j["nb"]["cols"] = m.nb.means.cols();
            break;
        }
    }
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "androcon-model/1")
        throw Error(ErrorCode::InvalidSpec, "unsupported model format");
    TrainedModel m;
    m.kind = model_kind_from_name(j.at("kind").get<std::string>());
    m.hp = j.at("hyperparams").get<Hyperparams>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.train_seed = j.at("train_seed").get<uint64_t>();
    m.input_dim = j.at("input_dim").get<int>();

    auto vec_to_mat = [](const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
        if (rows * cols != static_cast<Eigen::Index>(v.size()))
            throw Error(ErrorCode::DimMismatch, "matrix payload shape mismatch");
        Eigen::MatrixXd mat(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index jj = 0; jj < cols; ++jj)
                mat(i, jj) = v[static_cast<size_t>(i * cols + jj)];
        return mat;
    };

    switch (m.kind) {
        case ModelKind::Dt:
            m.dt = DecisionTree::from_json(j.at("tree"));
            break;
        case ModelKind::Rf:
            for (const auto& tj : j.at("forest")) m.forest.push_back(DecisionTree::from_json(tj));
            break;
        case ModelKind::Gb: {
            const auto& g = j.at("gb");
            m.gb.num_classes = g.at("num_classes").get<int>();
            m.gb.learning_rate = g.at("learning_rate").get<double>();
            auto init = g.at("init_scores").get<std::vector<double>>();
            m.gb.init_scores =
                Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
            for (const auto& sj : g.at("stages")) {
                std::vector<DecisionTree> stage;
                for (const auto& tj : sj) stage.push_back(DecisionTree::from_json(tj));
                m.gb.stages.push_back(std::move(stage));
            }
            break;
        }
        case ModelKind::Knn: {
            const auto& k = j.at("knn");
            m.knn.k = k.at("k").get<int>();
            m.knn.labels = k.at("labels").get<std::vector<int>>();
            m.knn.points = vec_to_mat(k.at("points").get<std::vector<double>>(),
                                      k.at("rows").get<Eigen::Index>(),
                                      k.at("cols").get<Eigen::Index>());
            break;
        }
        case ModelKind::Nb: {
            const auto& nbj = j.at("nb");
            Eigen::Index rows = nbj.at("rows").get<Eigen::Index>();
            Eigen::Index cols = nbj.at("cols").get<Eigen::Index>();
            m.nb.means = vec_to_mat(nbj.at("means").get<std::vector<double>>(), rows, cols);
            m.nb.vars = vec_to_mat(nbj.at("vars").get<std::vector<double>>(), rows, cols);
            auto lp = nbj.at("log_priors").get<std::vector<double>>();
            m.nb.log_priors =
                Eigen::Map<const Eigen::VectorXd>(lp.data(), static_cast<Eigen::Index>(lp.size()));
            break;
        }
    }
    return m;
}

}  // namespace androcon
