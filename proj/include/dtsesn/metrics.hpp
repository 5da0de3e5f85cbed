#pragma once

// Scalar evaluation of predictions: NRMSE for one-step-ahead output and the
// normalized error series / valid time used for closed-loop runs.

#include <cmath>
#include <cstddef>
#include <optional>

#include "dtsesn/errors.hpp"
#include "dtsesn/linalg.hpp"

namespace dtsesn {

/// Root-mean-square prediction error normalized by the target's deviation
/// from its per-component time mean.
inline double nrmse(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& d) {
    if (y.rows() != d.rows() || y.cols() != d.cols())
        throw DimensionError("nrmse: prediction and target shapes differ");
    if (d.rows() < 2) throw PreconditionError("nrmse: need at least two samples");
    const double t = static_cast<double>(d.rows());
    const Eigen::RowVectorXd mean = d.colwise().mean();
    const double denom_sq = (d.rowwise() - mean).squaredNorm() / t;
    if (denom_sq <= 0.0)
        throw DegenerateDenominatorError("nrmse: target is constant over the period");
    const double num_sq = (y - d).squaredNorm() / t;
    return std::sqrt(num_sq / denom_sq);
}

/// Root-mean-square of the row norms: sqrt(mean_k ||d_k||^2).
inline double rms_norm(const Eigen::Ref<const Matrix>& d) {
    if (d.rows() < 1) throw PreconditionError("rms_norm: empty input");
    return std::sqrt(d.squaredNorm() / static_cast<double>(d.rows()));
}

/// Normalized error series E_k = ||y_k - d_k|| / sqrt(mean_j ||d_j||^2),
/// with the denominator averaged over the whole period covered by d.
inline Vector normalized_error_series(const Eigen::Ref<const Matrix>& y,
                                      const Eigen::Ref<const Matrix>& d) {
    if (y.rows() != d.rows() || y.cols() != d.cols())
        throw DimensionError("normalized_error_series: shapes differ");
    if (d.rows() < 1) throw PreconditionError("normalized_error_series: empty input");
    const double den = rms_norm(d);
    if (den <= 0.0)
        throw DegenerateDenominatorError("normalized_error_series: target is identically zero");
    return (y - d).rowwise().norm() / den;
}

/// Elapsed time k* dt before E first exceeds epsilon (strictly); returns the
/// full covered duration |E| * dt when the threshold is never exceeded.
inline double valid_time(const Eigen::Ref<const Vector>& e, double epsilon, double dt) {
    if (e.size() < 1) throw PreconditionError("valid_time: empty error series");
    if (!(epsilon > 0.0)) throw PreconditionError("valid_time: epsilon must be positive");
    if (!(dt > 0.0)) throw PreconditionError("valid_time: dt must be positive");
    for (Eigen::Index k = 0; k < e.size(); ++k)
        if (e[k] > epsilon) return static_cast<double>(k) * dt;
    return static_cast<double>(e.size()) * dt;
}

/// Report for one evaluated run; valid_time carries a censoring flag when
/// the threshold was never exceeded inside the covered period.
struct MetricReport {
    std::optional<double> nrmse;
    std::optional<double> valid_time;
    Vector error_series;
    double epsilon = 0.0;
    bool censored = false;
};

}  // namespace dtsesn
