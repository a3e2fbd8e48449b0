#pragma once

// Dense complex linear algebra shared by every module: Kronecker products,
// SVD-based rank decisions, nullspaces and least squares.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace kacsub {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Default absolute tolerance for every identity check.
inline constexpr double kDefaultEps = 1e-9;

/// Deterministic generator used wherever a random choice is made.
using Rng = std::mt19937_64;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

using RowMajorMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Reads v in V_0 ⊗ V_1 as the d0 x d1 matrix of its coefficients.
inline Mat as_matrix(const Vec& v, Index d0, Index d1) {
  return Eigen::Map<const RowMajorMat>(v.data(), d0, d1);
}

/// Inverse of `as_matrix`.
inline Vec as_vector(const Mat& m) {
  RowMajorMat r = m;
  return Eigen::Map<const Vec>(r.data(), r.size());
}

/// (f ⊗ id)v for v in V_0 ⊗ V_1 with dim V_1 = d1.
inline Vec apply_left(const Mat& f, const Vec& v, Index d1) {
  return as_vector(f * as_matrix(v, v.size() / d1, d1));
}

/// (id ⊗ g)v for v in V_0 ⊗ V_1 with dim V_0 = d0.
inline Vec apply_right(const Mat& g, const Vec& v, Index d0) {
  return as_vector(as_matrix(v, d0, v.size() / d0) * g.transpose());
}

/// Matrix of (f ⊗ id)∘m, column by column.
inline Mat compose_left(const Mat& f, const Mat& m, Index d1) {
  Mat out(f.rows() * d1, m.cols());
  for (Index c = 0; c < m.cols(); ++c) out.col(c) = apply_left(f, m.col(c), d1);
  return out;
}

/// Matrix of (id ⊗ g)∘m, column by column.
inline Mat compose_right(const Mat& g, const Mat& m, Index d0) {
  Mat out(d0 * g.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c) out.col(c) = apply_right(g, m.col(c), d0);
  return out;
}

inline Vec unit_vector(Index n, Index i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

template <typename Derived>
inline double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Vec random_vector(Index n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

inline RVec random_real_vector(Index n, Rng& rng) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  RVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = ud(rng);
  return v;
}

/// Singular values of `a`, descending. Tall inputs are QR-reduced first.
inline RVec singular_values(const Mat& a) {
  if (a.size() == 0) return RVec();
  if (a.rows() > 2 * a.cols()) {
    Eigen::HouseholderQR<Mat> qr(a);
    Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Mat>(r).singularValues();
  }
  return Eigen::JacobiSVD<Mat>(a).singularValues();
}

/// Columns spanning {x : a x = 0}, orthonormal in the Euclidean inner
/// product. A singular value counts as zero when it is below
/// `rel_tol * sigma_max` (or below `abs_floor`).
inline Mat nullspace(const Mat& a, double rel_tol, double abs_floor = 1e-13) {
  const Index n = a.cols();
  if (n == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(n, n);
  Mat r;
  if (a.rows() > 2 * n) {
    Eigen::HouseholderQR<Mat> qr(a);
    r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    r = a;
  }
  Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double cut = std::max(rel_tol * smax, abs_floor);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Numerical rank with the same thresholding rule as `nullspace`.
inline Index numerical_rank(const Mat& a, double rel_tol, double abs_floor = 1e-13) {
  if (a.size() == 0) return 0;
  RVec s = singular_values(a);
  const double cut = std::max(rel_tol * (s.size() ? s(0) : 0.0), abs_floor);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return rank;
}

/// Orthonormal (Euclidean) basis of the column space of `a`.
inline Mat range_basis(const Mat& a, double rel_tol, double abs_floor = 1e-13) {
  if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  const double cut = std::max(rel_tol * (s.size() ? s(0) : 0.0), abs_floor);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Minimum-norm least-squares solution X of a X = b.
inline Mat least_squares(const Mat& a, const Mat& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

/// Solution X of X s = t in the least-squares sense (right division).
inline Mat right_divide(const Mat& t, const Mat& s) {
  return least_squares(s.adjoint(), t.adjoint()).adjoint();
}

/// Hermitian square root inverse of a positive definite matrix.
inline Mat inverse_sqrt_psd(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  RVec d = es.eigenvalues();
  for (Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-300));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// True when `x` lies in the column span of the orthonormal basis `q`.
inline double distance_to_span(const Mat& q, const Vec& x) {
  if (q.cols() == 0) return x.norm();
  return (x - q * (q.adjoint() * x)).norm();
}

}  // namespace kacsub
