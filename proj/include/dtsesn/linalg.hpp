#pragma once

// Dense real matrix kernels shared by the rest of the library: eigenvalue
// moduli of nonsymmetric matrices, spectral radius, and ridge-regularized
// least squares. Backed by Eigen; every function here is pure and safe to
// call from multiple threads.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dtsesn/errors.hpp"

namespace dtsesn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalue moduli sorted descending; length equals the matrix order.
using EigenModuli = std::vector<double>;

namespace detail {

inline void require_finite(const Eigen::Ref<const Matrix>& m, const char* name) {
    if (!m.allFinite())
        throw PreconditionError(std::string(name) + " contains non-finite entries");
}

inline void require_square(const Eigen::Ref<const Matrix>& m, const char* op) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected square");
    if (m.rows() < 1) throw PreconditionError(std::string(op) + ": matrix order must be >= 1");
}

}  // namespace detail

/// Iteration budget for the shifted-QR eigensolver, in sweeps per matrix row.
inline constexpr int kQrSweepsPerRow = 100;

/// Moduli of all (generally complex) eigenvalues of a square matrix,
/// multiset-complete, sorted descending. Computed from the real Schur form
/// (Hessenberg reduction followed by shifted QR): 1x1 diagonal blocks are
/// real eigenvalues, 2x2 blocks are conjugate pairs whose squared modulus
/// equals the block determinant.
inline EigenModuli eigenvalue_moduli(const Eigen::Ref<const Matrix>& m) {
    detail::require_square(m, "eigenvalue_moduli");
    detail::require_finite(m, "eigenvalue_moduli input");
    const Eigen::Index n = m.rows();

    Eigen::RealSchur<Matrix> schur(n);
    schur.setMaxIterations(kQrSweepsPerRow * n);
    schur.compute(m, /*computeU=*/false);
    if (schur.info() != Eigen::Success)
        throw ConvergenceError("QR iteration did not converge for order " + std::to_string(n) +
                                   " within " + std::to_string(kQrSweepsPerRow * n) + " sweeps",
                               static_cast<std::size_t>(n),
                               static_cast<std::size_t>(kQrSweepsPerRow * n));

    const Matrix& t = schur.matrixT();
    EigenModuli moduli;
    moduli.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n;) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            // Conjugate pair: |lambda|^2 = det of the 2x2 block.
            const double det = t(i, i) * t(i + 1, i + 1) - t(i, i + 1) * t(i + 1, i);
            const double mod = std::sqrt(std::max(det, 0.0));
            moduli.push_back(mod);
            moduli.push_back(mod);
            i += 2;
        } else {
            moduli.push_back(std::abs(t(i, i)));
            i += 1;
        }
    }
    std::sort(moduli.begin(), moduli.end(), std::greater<double>());
    return moduli;
}

/// Largest eigenvalue modulus.
inline double spectral_radius(const Eigen::Ref<const Matrix>& m) {
    return eigenvalue_moduli(m).front();
}

/// Solve min_W  sum_t ||W s_t - d_t||^2 + beta ||W||_F^2  for W (q x p),
/// where the rows of s (T x p) and d (T x q) are paired samples.
///
/// Normal-equation route: W^T = (S^T S + beta I)^{-1} S^T D via a symmetric
/// positive-definite factorization; with beta > 0 the system is always
/// solvable. For beta = 0 a rank check guards against a singular Gram
/// matrix. Callers that need an ill-conditioned beta = 0 solve should use an
/// orthogonal factorization of S directly instead of this routine.
inline Matrix ridge_solve(const Eigen::Ref<const Matrix>& s, const Eigen::Ref<const Matrix>& d,
                          double beta) {
    if (s.rows() != d.rows())
        throw DimensionError("ridge_solve: sample counts differ (" + std::to_string(s.rows()) +
                             " vs " + std::to_string(d.rows()) + ")");
    if (s.rows() < 1) throw PreconditionError("ridge_solve: need at least one sample");
    if (!(beta >= 0.0)) throw PreconditionError("ridge_solve: beta must be >= 0");
    detail::require_finite(s, "ridge_solve design");
    detail::require_finite(d, "ridge_solve targets");

    const Eigen::Index p = s.cols();
    Matrix gram = Matrix::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(s.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += beta;
    const Matrix rhs = s.transpose() * d;  // p x q

    if (beta == 0.0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(gram);
        if (qr.rank() < p)
            throw SingularityError(
                "ridge_solve: S^T S is rank-deficient with beta = 0; supply beta > 0");
        return qr.solve(rhs).transpose();
    }
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) return llt.solve(rhs).transpose();
    // beta > 0 makes the Gram matrix positive definite in exact arithmetic;
    // if rounding defeats LLT, LDLT still factors it.
    Eigen::LDLT<Matrix> ldlt(gram);
    return ldlt.solve(rhs).transpose();
}

}  // namespace dtsesn
