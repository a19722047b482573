#pragma once

#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "cavity/errors.hpp"

namespace cavity {

/// Direct LU factorization for the indefinite saddle-point systems. Backed by
/// Eigen's supernodal SparseLU; the symbolic analysis is reused while the
/// sparsity pattern stays fixed, which it does across Newton iterations with
/// an unchanged active set.
class SparseLuSolver {
public:
  /// Factorize A; `label` names the solve step in error messages. The matrix
  /// is equilibrated by max-norm row and column scalings first: the saddle
  /// systems mix viscous, divergence and edge-average rows of wildly
  /// different magnitudes.
  void factorize(const Eigen::SparseMatrix<double>& A, const std::string& label = "system") {
    if (A.rows() != A.cols()) throw SingularMatrixError(label + ": matrix not square");
    const Eigen::Index n = A.rows();
    Eigen::SparseMatrix<double> Ac = A;
    Ac.makeCompressed();
    norm_ = Ac.coeffs().cwiseAbs().maxCoeff();

    row_scale_ = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < Ac.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, k); it; ++it)
        row_scale_[it.row()] = std::max(row_scale_[it.row()], std::abs(it.value()));
    for (Eigen::Index i = 0; i < n; ++i)
      row_scale_[i] = row_scale_[i] > 0.0 ? 1.0 / row_scale_[i] : 1.0;
    col_scale_ = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < Ac.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, k); it; ++it)
        col_scale_[it.col()] =
            std::max(col_scale_[it.col()], row_scale_[it.row()] * std::abs(it.value()));
    for (Eigen::Index j = 0; j < n; ++j)
      col_scale_[j] = col_scale_[j] > 0.0 ? 1.0 / col_scale_[j] : 1.0;
    for (Eigen::Index k = 0; k < Ac.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, k); it; ++it)
        it.valueRef() *= row_scale_[it.row()] * col_scale_[it.col()];

    if (!analyzed_ || !same_pattern(Ac)) {
      lu_.analyzePattern(Ac);
      pattern_rows_ = Ac.innerIndexPtr() ? std::vector<int>(Ac.innerIndexPtr(),
                                                            Ac.innerIndexPtr() + Ac.nonZeros())
                                         : std::vector<int>();
      pattern_cols_.assign(Ac.outerIndexPtr(), Ac.outerIndexPtr() + Ac.cols() + 1);
      analyzed_ = true;
    }
    lu_.factorize(Ac);
    if (lu_.info() != Eigen::Success)
      throw SingularMatrixError(label + ": numerically singular matrix");
    matrix_ = std::move(Ac);
    label_ = label;
  }

  /// Back/forward substitution on the equilibrated system with one step of
  /// iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (b.size() != lu_.rows())
      throw SolverError(label_ + ": right-hand side has incompatible dimension");
    const Eigen::VectorXd bs = row_scale_.cwiseProduct(b);
    Eigen::VectorXd y = lu_.solve(bs);
    if (!y.allFinite())
      throw SingularMatrixError(label_ + ": non-finite solution (singular matrix)");
    const Eigen::VectorXd residual = bs - matrix_ * y;
    const Eigen::VectorXd correction = lu_.solve(residual);
    if (correction.allFinite()) y += correction;
    return col_scale_.cwiseProduct(y);
  }

  double matrix_norm() const { return norm_; }

private:
  bool same_pattern(const Eigen::SparseMatrix<double>& A) const {
    if (pattern_cols_.size() != static_cast<size_t>(A.cols()) + 1) return false;
    if (pattern_rows_.size() != static_cast<size_t>(A.nonZeros())) return false;
    for (size_t i = 0; i < pattern_cols_.size(); ++i)
      if (pattern_cols_[i] != A.outerIndexPtr()[i]) return false;
    for (size_t i = 0; i < pattern_rows_.size(); ++i)
      if (pattern_rows_[i] != A.innerIndexPtr()[i]) return false;
    return true;
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::VectorXd row_scale_, col_scale_;
  std::vector<int> pattern_rows_;
  std::vector<int> pattern_cols_;
  bool analyzed_ = false;
  double norm_ = 0.0;
  std::string label_;
};

}  // namespace cavity
