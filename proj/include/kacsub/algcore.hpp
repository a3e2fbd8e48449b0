#pragma once

// Block structure of finite-dimensional C*-algebras, the canonical trace,
// conditional expectations and the left regular representation.

#include "kacsub/algebra.hpp"

#include <numeric>

namespace kacsub {

/// B ≅ ⊕_g M_{m_g}. Column (offset_g + i*m_g + j) of `block_isomorphism`
/// is the coefficient vector of the matrix unit e^g_ij.
struct BlockStructure {
  std::vector<Index> block_sizes;
  std::vector<double> weights;
  std::vector<Vec> central_projections;
  Mat block_isomorphism;

  Index blocks() const { return static_cast<Index>(block_sizes.size()); }
  Vec matrix_unit(Index g, Index i, Index j) const {
    Index off = 0;
    for (Index b = 0; b < g; ++b) off += block_sizes[b] * block_sizes[b];
    return block_isomorphism.col(off + i * block_sizes[g] + j);
  }
};

/// Commutator map x -> (b_i x - x b_i)_i stacked over the basis.
inline Mat commutator_system(const FiniteStarAlgebra& a, const Mat& generators) {
  const Index n = a.dim();
  Mat sys(n * generators.cols(), n);
  for (Index g = 0; g < generators.cols(); ++g) {
    Vec x = generators.col(g);
    sys.middleRows(g * n, n) = a.left_mult(x) - a.right_mult(x);
  }
  return sys;
}

/// Coefficient vectors spanning the center Z(B).
inline Mat center_basis(const FiniteStarAlgebra& a, double eps = kDefaultEps) {
  const Index n = a.dim();
  Mat sys = Mat::Zero(n * n, n);
  for (const auto& t : a.mult_terms()) {
    sys(t.i * n + t.k, t.j) += t.value;
    sys(t.j * n + t.k, t.i) -= t.value;
  }
  return nullspace(sys, std::sqrt(eps));
}

namespace detail {

/// Random self-adjoint element of the span of `span` (columns).
inline Vec random_selfadjoint(const FiniteStarAlgebra& a, const Mat& span, Rng& rng) {
  // Complex coefficients, so a span of skew-adjoint vectors still contributes.
  Vec x = span * random_vector(span.cols(), rng);
  return 0.5 * (x + a.star(x));
}

/// Clusters sorted reals; returns cluster start indices.
inline std::vector<Index> cluster_starts(const RVec& sorted, double tol) {
  std::vector<Index> starts{0};
  for (Index i = 1; i < sorted.size(); ++i)
    if (sorted(i) - sorted(i - 1) > tol) starts.push_back(i);
  return starts;
}

/// Orthogonal (trace inner product) projection of x onto the span of the
/// G-orthonormal columns of q.
inline Vec project(const FiniteStarAlgebra& a, const Mat& q, const Vec& x) {
  return q * (q.adjoint() * (a.gram() * x));
}

}  // namespace detail

/// Splits B into simple blocks with a random self-adjoint central element
/// (fixed seed) and then builds matrix units in each block.
inline BlockStructure wedderburn(const FiniteStarAlgebra& a, double eps = kDefaultEps, std::uint64_t seed = 0) {
  const Index n = a.dim();
  const double cluster_tol = 1e-6;
  const Mat& w = a.orthonormal_basis();
  const Mat& winv = a.orthonormal_inverse();
  Mat z = center_basis(a, eps);
  const Index s = z.cols();
  if (s == 0) throw Error(ErrorKind::NonSemisimple, "center is trivial-dimensional");
  Mat zon = range_basis(winv * z, std::sqrt(eps));  // orthonormal coords of Z(B)
  if (zon.cols() != s) throw Error(ErrorKind::NonSemisimple, "degenerate Gram matrix on the center");
  Rng rng(seed);

  std::vector<Vec> projections;
  for (int attempt = 0; attempt < 20 && projections.empty(); ++attempt) {
    Vec c = detail::random_selfadjoint(a, z, rng);
    Mat op = zon.adjoint() * (winv * a.left_mult(c) * w) * zon;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op + op.adjoint()));
    auto starts = detail::cluster_starts(es.eigenvalues(), cluster_tol);
    if (static_cast<Index>(starts.size()) != s) continue;
    for (Index k = 0; k < s; ++k) {
      Vec v = w * (zon * es.eigenvectors().col(k));
      // v is a multiple of a minimal central projection p: v^2 = c v.
      Vec v2 = a.multiply(v, v);
      Index piv;
      v.cwiseAbs().maxCoeff(&piv);
      Vec p = v * (v(piv) / v2(piv));
      p = 0.5 * (p + a.star(p));
      projections.push_back(p);
    }
  }
  if (projections.empty()) throw Error(ErrorKind::NonSemisimple, "could not split the center");

  // Checks on the central projections.
  Vec sum = Vec::Zero(n);
  for (Index g = 0; g < s; ++g) {
    const Vec& p = projections[g];
    sum += p;
    if (max_abs(Vec(a.multiply(p, p) - p)) > std::sqrt(eps))
      throw Error(ErrorKind::NonSemisimple, "central idempotent splitting failed");
  }
  if (max_abs(Vec(sum - a.unit())) > std::sqrt(eps))
    throw Error(ErrorKind::NonSemisimple, "central projections do not sum to 1");

  BlockStructure bs;
  std::vector<std::vector<Vec>> units;
  for (Index g = 0; g < s; ++g) {
    const Vec& p = projections[g];
    Mat lp = winv * a.left_mult(p) * w;
    lp = 0.5 * (lp + lp.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(lp);
    std::vector<Index> cols;
    for (Index i = 0; i < n; ++i)
      if (es.eigenvalues()(i) > 0.5) cols.push_back(i);
    const Index d = static_cast<Index>(cols.size());
    const Index m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(d))));
    if (m * m != d) throw Error(ErrorKind::NonSemisimple, "block dimension is not a perfect square");
    Mat yon(n, d);
    for (Index i = 0; i < d; ++i) yon.col(i) = es.eigenvectors().col(cols[i]);
    Mat q = w * yon;  // G-orthonormal basis of p B

    std::vector<Vec> f;  // minimal projections f_1..f_m
    if (m == 1) {
      f.push_back(p);
    } else {
      for (int attempt = 0; attempt < 20 && f.empty(); ++attempt) {
        Vec x = detail::random_selfadjoint(a, q, rng);
        Mat op = yon.adjoint() * (winv * a.left_mult(x) * w) * yon;
        Eigen::SelfAdjointEigenSolver<Mat> ex(0.5 * (op + op.adjoint()));
        auto starts = detail::cluster_starts(ex.eigenvalues(), cluster_tol);
        if (static_cast<Index>(starts.size()) != m) continue;
        bool even = true;
        for (Index k = 0; k < m; ++k) {
          Index end = k + 1 < m ? starts[k + 1] : d;
          if (end - starts[k] != m) even = false;
        }
        if (!even) continue;
        for (Index k = 0; k < m; ++k) {
          // The eigenspace is f_k B; the projection of 1 onto it is f_k.
          Mat e = w * (yon * ex.eigenvectors().middleCols(starts[k], m));
          Vec fk = detail::project(a, e, a.unit());
          f.push_back(0.5 * (fk + a.star(fk)));
        }
      }
      if (f.empty()) throw Error(ErrorKind::NonSemisimple, "could not split a simple block");
    }
    // Partial isometries e_1k in f_1 B f_k.
    std::vector<Vec> e1(m), ek1(m);
    e1[0] = f[0];
    ek1[0] = f[0];
    for (Index k = 1; k < m; ++k) {
      Vec best;
      double best_norm = -1.0;
      for (Index b = 0; b < d; ++b) {
        Vec y = a.multiply(a.multiply(f[0], q.col(b)), f[k]);
        double ny = a.norm(y);
        if (ny > best_norm) {
          best_norm = ny;
          best = y;
        }
      }
      Vec yy = a.multiply(best, a.star(best));
      double c = (a.trace(yy) / a.trace(f[0])).real();
      if (!(c > 1e-14)) throw Error(ErrorKind::NonSemisimple, "no partial isometry between minimal projections");
      e1[k] = best / std::sqrt(c);
      ek1[k] = a.star(e1[k]);
    }
    std::vector<Vec> u(static_cast<std::size_t>(m * m));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) u[i * m + j] = (i == 0) ? e1[j] : (j == 0 ? ek1[i] : a.multiply(ek1[i], e1[j]));
    bs.block_sizes.push_back(m);
    bs.weights.push_back(a.trace(p).real());
    bs.central_projections.push_back(p);
    units.push_back(std::move(u));
  }
  bs.block_isomorphism = Mat(n, n);
  Index col = 0;
  for (const auto& u : units)
    for (const auto& v : u) bs.block_isomorphism.col(col++) = v;
  if (col != n) throw Error(ErrorKind::NonSemisimple, "block dimensions do not add up to dim(B)");
  return bs;
}

/// Residual of the matrix-unit relations e^g_ij e^h_kl = [g=h][j=k] e^g_il.
inline double matrix_unit_residual(const FiniteStarAlgebra& a, const BlockStructure& bs) {
  double worst = 0.0;
  for (Index g = 0; g < bs.blocks(); ++g)
    for (Index h = 0; h < bs.blocks(); ++h) {
      const Index mg = bs.block_sizes[g], mh = bs.block_sizes[h];
      for (Index i = 0; i < mg; ++i)
        for (Index j = 0; j < mg; ++j)
          for (Index k = 0; k < mh; ++k)
            for (Index l = 0; l < mh; ++l) {
              Vec prod = a.multiply(bs.matrix_unit(g, i, j), bs.matrix_unit(h, k, l));
              Vec want = (g == h && j == k) ? bs.matrix_unit(g, i, l) : Vec::Zero(a.dim());
              worst = std::max(worst, max_abs(Vec(prod - want)));
            }
    }
  return worst;
}

/// λ_g = m_g^2 / Σ m^2.
inline std::vector<double> canonical_trace(const std::vector<Index>& block_sizes) {
  return canonical_weights(block_sizes);
}

/// Matrix of the multiplication μ: B⊗B -> B in orthonormal coordinates.
inline Mat multiplication_matrix_on(const FiniteStarAlgebra& a) {
  const Index n = a.dim();
  const Mat& w = a.orthonormal_basis();
  const Mat& winv = a.orthonormal_inverse();
  Mat mu(n, n * n);
  for (Index i = 0; i < n; ++i) {
    Mat l = winv * a.left_mult(w.col(i)) * w;
    for (Index j = 0; j < n; ++j) mu.col(i * n + j) = l.col(j);
  }
  return mu;
}

struct XiResult {
  Vec element;
  bool is_scalar = false;
  cplx scalar = 0.0;  // tr(ξ)
  double residual = 0.0;  // ||ξ - tr(ξ) 1||_2
};

/// ξ = μμ*(1); scalar exactly when tr is the canonical trace.
inline XiResult xi_element(const FiniteStarAlgebra& a, double eps = kDefaultEps) {
  const Mat& w = a.orthonormal_basis();
  const Mat& winv = a.orthonormal_inverse();
  Mat mu = multiplication_matrix_on(a);
  Vec one = winv * a.unit();
  Vec xi_on = mu * (mu.adjoint() * one);
  XiResult r;
  r.element = w * xi_on;
  r.scalar = a.trace(r.element);
  r.residual = a.norm(r.element - r.scalar * a.unit());
  r.is_scalar = r.residual < eps;
  return r;
}

/// Trace-preserving conditional expectation big -> big onto embed(small).
inline Mat conditional_expectation(const SubalgebraEmbedding& emb, double eps = kDefaultEps) {
  const Vec restricted = emb.embed.transpose() * emb.big->trace_vector();
  if (max_abs(Vec(restricted - emb.small->trace_vector())) > eps)
    throw Error(ErrorKind::IncompatibleTrace, "trace of the big algebra does not restrict to the small one");
  const Mat& g = emb.big->gram();
  const Mat& j = emb.embed;
  Mat gj = j.adjoint() * g * j;
  return j * gj.ldlt().solve(j.adjoint() * g);
}

/// Orthogonal projection onto the span of `span` in the trace inner product.
inline Mat orthogonal_projection(const FiniteStarAlgebra& a, const Mat& span, double eps = kDefaultEps) {
  Mat q = trace_orthonormalize(a, span, std::sqrt(eps));
  return q * q.adjoint() * a.gram();
}

/// λ(x): matrix of y -> x y in the orthonormal basis.
inline Mat left_regular(const FiniteStarAlgebra& a, const Vec& x) {
  return a.orthonormal_inverse() * a.left_mult(x) * a.orthonormal_basis();
}

/// λ as a linear map B -> L(B) = M_n (matrix units, index i*n+j).
inline Mat left_regular_map(const FiniteStarAlgebra& a) {
  const Index n = a.dim();
  Mat out(n * n, n);
  for (Index i = 0; i < n; ++i) {
    Mat l = left_regular(a, a.basis(i));
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) out(r * n + c, i) = l(r, c);
  }
  return out;
}

/// Adjoint T^† of a map T: V -> W for the trace inner products of V and W.
inline Mat trace_adjoint(const FiniteStarAlgebra& v, const FiniteStarAlgebra& w, const Mat& t) {
  return v.gram().ldlt().solve(t.adjoint() * w.gram());
}

}  // namespace kacsub
