// Unscented Kalman Filter: sigma-point generation, predict/update steps and
// series filtering for nonlinear denoising of per-feature time series.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "androcon/common.hpp"

namespace androcon {

/// Sigma-point weight schemes. ScaledUnscented is the standard scaled
/// unscented transform and is exact for linear maps. PaperLiteral reproduces
/// the nonstandard published formulas (W_m(0) = 1 - 1/lambda^2,
/// W(i) = 1/(2 L lambda^2)) behind a compatibility switch; its mean weights
/// are normalized to sum to one.
enum class UkfWeightScheme { ScaledUnscented, PaperLiteral };

struct UkfConfig {
    int dim = 1;          // state dimension L
    double lambda = 2.0;  // sigma-point spread; classical default is 3 - L
    double beta = 2.0;    // W_c(0) correction term (ScaledUnscented only)
    UkfWeightScheme weight_scheme = UkfWeightScheme::ScaledUnscented;
    Eigen::MatrixXd process_noise;      // Q, L x L, symmetric PSD
    Eigen::MatrixXd measurement_noise;  // R, m x m, symmetric PD
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> transition;   // f
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> observation;  // h

    int measurement_dim() const { return static_cast<int>(measurement_noise.rows()); }

    void validate() const {
        if (dim < 1) throw Error(ErrorCode::InvalidArgument, "state dimension must be >= 1");
        if (!(dim + lambda > 0.0))
            throw Error(ErrorCode::InvalidArgument, "L + lambda must be positive");
        if (process_noise.rows() != dim || process_noise.cols() != dim)
            throw Error(ErrorCode::DimMismatch, "Q must be L x L");
        if (measurement_noise.rows() != measurement_noise.cols() ||
            measurement_noise.rows() < 1)
            throw Error(ErrorCode::DimMismatch, "R must be square");
        if (!transition || !observation)
            throw Error(ErrorCode::InvalidArgument, "transition/observation not set");
    }

    /// Per-channel constant-velocity model (state = value + drift): linear f,
    /// h selecting the value. Q = q I, R = [r].
    static UkfConfig constant_velocity(double q, double r) {
        UkfConfig cfg;
        cfg.dim = 2;
        cfg.lambda = 3.0 - 2.0;
        cfg.process_noise = q * Eigen::Matrix2d::Identity();
        cfg.measurement_noise = Eigen::MatrixXd::Constant(1, 1, r);
        cfg.transition = [](const Eigen::VectorXd& x) {
            Eigen::VectorXd y(2);
            y << x(0) + x(1), x(1);
            return y;
        };
        cfg.observation = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd::Constant(1, x(0));
        };
        return cfg;
    }
};

struct UkfState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    int64_t step = 0;
};

struct SigmaSet {
    Eigen::MatrixXd points;        // (2L+1) x L, row i = sigma point i
    Eigen::VectorXd weights_mean;  // length 2L+1
    Eigen::VectorXd weights_cov;   // length 2L+1
};

namespace detail {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

/// Symmetric factor S with S S^T = m, via pivoted LDLT (handles the
/// semidefinite case, e.g. a zero covariance). On an indefinite input, adds
/// diagonal jitter 1e-12 * 2^k, k <= 20, before giving up.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    Eigen::MatrixXd a = symmetrize(m);
    for (int k = 0; k <= 21; ++k) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd d = ldlt.vectorD();
            if (d.minCoeff() >= -1e-9 * scale) {
                Eigen::MatrixXd l = ldlt.matrixL();
                Eigen::MatrixXd s =
                    ldlt.transpositionsP().transpose() *
                    Eigen::MatrixXd(l * d.cwiseMax(0.0).cwiseSqrt().asDiagonal());
                return s;
            }
        }
        if (k == 21) break;
        a = symmetrize(m) +
            (1e-12 * std::pow(2.0, k)) * Eigen::MatrixXd::Identity(n, n);
    }
    throw Error(ErrorCode::NonPsdCovariance,
                "covariance admits no PSD square root after jitter up to 1e-6");
}

inline void sigma_weights(const UkfConfig& cfg, Eigen::VectorXd& wm, Eigen::VectorXd& wc) {
    const int n = 2 * cfg.dim + 1;
    wm.resize(n);
    wc.resize(n);
    if (cfg.weight_scheme == UkfWeightScheme::ScaledUnscented) {
        const double denom = cfg.dim + cfg.lambda;
        wm.setConstant(1.0 / (2.0 * denom));
        wm(0) = cfg.lambda / denom;
        wc = wm;
        wc(0) += cfg.beta;
    } else {
        const double l2 = cfg.lambda * cfg.lambda;
        wm.setConstant(1.0 / (2.0 * cfg.dim * l2));
        wm(0) = 1.0 - 1.0 / l2;
        wc = wm;
        wm /= wm.sum();  // mean weights must form a partition of unity
    }
}

}  // namespace detail

/// Generate 2L+1 sigma points around the state mean: point 0 is the mean,
/// points i and i+L are mean +/- column i of sqrt((L+lambda) P).
inline SigmaSet generate_sigma_points(const UkfState& s, const UkfConfig& cfg) {
    cfg.validate();
    const int dim = cfg.dim;
    Eigen::MatrixXd root = detail::psd_sqrt((dim + cfg.lambda) * s.cov);

    SigmaSet set;
    set.points.resize(2 * dim + 1, dim);
    set.points.row(0) = s.mean.transpose();
    for (int i = 0; i < dim; ++i) {
        set.points.row(1 + i) = (s.mean + root.col(i)).transpose();
        set.points.row(1 + dim + i) = (s.mean - root.col(i)).transpose();
    }
    detail::sigma_weights(cfg, set.weights_mean, set.weights_cov);
    return set;
}

/// Time update: propagate sigma points through f, recombine into the
/// predicted mean and covariance, add process noise.
inline UkfState predict(const UkfState& s, const UkfConfig& cfg) {
    SigmaSet set = generate_sigma_points(s, cfg);
    const int n = static_cast<int>(set.points.rows());

    Eigen::MatrixXd propagated(n, cfg.dim);
    for (int i = 0; i < n; ++i)
        propagated.row(i) = cfg.transition(set.points.row(i).transpose()).transpose();

    Eigen::VectorXd mean = propagated.transpose() * set.weights_mean;
    Eigen::MatrixXd centered = propagated.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * set.weights_cov.asDiagonal() * centered +
                          cfg.process_noise;

    UkfState out;
    out.mean = std::move(mean);
    out.cov = detail::symmetrize(cov);
    out.step = s.step;
    return out;
}

/// Measurement update on a predicted state: project fresh sigma points
/// through h, form the innovation and cross covariances, apply the Kalman
/// gain. The posterior covariance is symmetrized and PSD-clipped.
inline UkfState update(const UkfState& s, const Eigen::VectorXd& z, const UkfConfig& cfg) {
    cfg.validate();
    if (z.size() != cfg.measurement_noise.rows())
        throw Error(ErrorCode::DimMismatch, "measurement dimension does not match R");

    SigmaSet set = generate_sigma_points(s, cfg);
    const int n = static_cast<int>(set.points.rows());
    const int m = static_cast<int>(z.size());

    Eigen::MatrixXd gamma(n, m);
    for (int i = 0; i < n; ++i)
        gamma.row(i) = cfg.observation(set.points.row(i).transpose()).transpose();

    Eigen::VectorXd z_pred = gamma.transpose() * set.weights_mean;
    Eigen::MatrixXd gamma_c = gamma.rowwise() - z_pred.transpose();
    Eigen::MatrixXd chi_c = set.points.rowwise() - s.mean.transpose();

    Eigen::MatrixXd innovation_cov =
        detail::symmetrize(gamma_c.transpose() * set.weights_cov.asDiagonal() * gamma_c +
                           cfg.measurement_noise);
    Eigen::MatrixXd cross_cov =
        chi_c.transpose() * set.weights_cov.asDiagonal() * gamma_c;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(innovation_cov);
    const double d_max = ldlt.vectorD().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(d_max > 0.0) ||
        ldlt.vectorD().minCoeff() <= 1e-14 * d_max)
        throw Error(ErrorCode::SingularInnovation, "innovation covariance not invertible");

    Eigen::MatrixXd gain = ldlt.solve(cross_cov.transpose()).transpose();  // K = C S^-1

    UkfState out;
    out.mean = s.mean + gain * (z - z_pred);
    Eigen::MatrixXd cov =
        detail::symmetrize(s.cov - gain * innovation_cov * gain.transpose());

    // Clip any negative eigenvalue introduced by roundoff.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.eigenvalues().minCoeff() < 0.0) {
        Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
        cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        cov = detail::symmetrize(cov);
    }
    out.cov = std::move(cov);
    out.step = s.step + 1;
    return out;
}

/// Run predict/update over a measurement series. Output length equals input
/// length; element t is the posterior state after absorbing measurement t.
inline std::vector<UkfState> filter_series(std::span<const Eigen::VectorXd> zs,
                                           const UkfConfig& cfg, const UkfState& init) {
    if (zs.empty()) throw Error(ErrorCode::EmptyInput, "empty measurement series");
    std::vector<UkfState> out;
    out.reserve(zs.size());
    UkfState state = init;
    for (size_t t = 0; t < zs.size(); ++t) {
        try {
            state = update(predict(state, cfg), zs[t], cfg);
        } catch (const Error& e) {
            throw Error(e.code(), "step " + std::to_string(t) + ": " + e.what());
        }
        out.push_back(state);
    }
    return out;
}

/// Denoise one scalar series with the constant-velocity model. Q and R
/// default to the trace-variance heuristic (Q = 1e-3 var, R = var) unless
/// overridden.
inline std::vector<double> filter_channel(std::span<const double> values,
                                          std::optional<double> q_override = std::nullopt,
                                          std::optional<double> r_override = std::nullopt) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "empty channel");
    if (values.size() == 1) return {values[0]};

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());

    // A (numerically) constant channel has nothing to denoise.
    if (!r_override && var <= 1e-12 * (mean * mean + 1.0))
        return {values.begin(), values.end()};

    const double q = q_override.value_or(1e-3 * var);
    const double r = r_override.value_or(var);
    UkfConfig cfg = UkfConfig::constant_velocity(q, r);

    // Initialize from a short leading window so a noisy first sample does not
    // become a warm-up outlier in the filtered series.
    const size_t warmup = std::min<size_t>(20, values.size());
    double init = 0.0;
    for (size_t i = 0; i < warmup; ++i) init += values[i];
    init /= static_cast<double>(warmup);

    UkfState state;
    state.mean = Eigen::Vector2d(init, 0.0);
    state.cov = (var / static_cast<double>(warmup)) * Eigen::Matrix2d::Identity();

    std::vector<Eigen::VectorXd> zs;
    zs.reserve(values.size());
    for (double v : values) zs.push_back(Eigen::VectorXd::Constant(1, v));

    auto states = filter_series(zs, cfg, state);
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& st : states) out.push_back(st.mean(0));
    return out;
}

}  // namespace androcon
