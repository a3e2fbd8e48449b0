#pragma once

// Unitary corepresentations u ∈ M_n ⊗ A, their tensor operations and
// intertwiner spaces, and the bridges between coactions and corepresentations.

#include "kacsub/coaction_map.hpp"

namespace kacsub {

/// u = Σ e_ij ⊗ u_ij; entry u_ij occupies data.segment((i*n+j)*dim(A), dim(A)).
struct Corepresentation {
  KacPtr kac;
  Index size = 0;
  Vec data;
  std::string name;

  Corepresentation() = default;
  Corepresentation(KacPtr k, Index n, std::string nm = {})
      : kac(std::move(k)), size(n), data(Vec::Zero(n * n * kac->dim())), name(std::move(nm)) {}

  Index adim() const { return kac->dim(); }
  Vec entry(Index i, Index j) const { return data.segment((i * size + j) * adim(), adim()); }
  void set(Index i, Index j, const Vec& a) { data.segment((i * size + j) * adim(), adim()) = a; }
};

inline Report validate_corep(const Corepresentation& u, double eps = kDefaultEps) {
  const FiniteStarAlgebra& a = *u.kac->alg;
  const Index n = u.size, da = a.dim();
  if (u.data.size() != n * n * da) throw Error(ErrorKind::DimensionMismatch, "corepresentation data size");
  Report r;
  double coassoc = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      Vec rhs = Vec::Zero(da * da);
      for (Index j = 0; j < n; ++j) rhs += kron(u.entry(i, j), u.entry(j, k));
      coassoc = std::max(coassoc, max_abs(Vec(u.kac->delta(u.entry(i, k)) - rhs)));
    }
  r.add("coassociative", coassoc, eps);
  double uu = 0.0, uhu = 0.0, utub = 0.0, ubut = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      Vec s1 = Vec::Zero(da), s2 = Vec::Zero(da), s3 = Vec::Zero(da), s4 = Vec::Zero(da);
      for (Index j = 0; j < n; ++j) {
        s1 += a.multiply(u.entry(i, j), a.star(u.entry(k, j)));
        s2 += a.multiply(a.star(u.entry(j, i)), u.entry(j, k));
        s3 += a.multiply(u.entry(j, i), a.star(u.entry(j, k)));
        s4 += a.multiply(a.star(u.entry(i, j)), u.entry(k, j));
      }
      Vec want = (i == k) ? a.unit() : Vec::Zero(da);
      uu = std::max(uu, max_abs(Vec(s1 - want)));
      uhu = std::max(uhu, max_abs(Vec(s2 - want)));
      utub = std::max(utub, max_abs(Vec(s3 - want)));
      ubut = std::max(ubut, max_abs(Vec(s4 - want)));
    }
  r.add("u u* = 1", uu, eps);
  r.add("u* u = 1", uhu, eps);
  r.add("u^t ubar = 1", utub, eps);
  r.add("ubar u^t = 1", ubut, eps);
  return r;
}

inline double unitarity_residual(const Corepresentation& u) {
  Report r = validate_corep(u, 1.0);
  double w = 0.0;
  for (const auto& c : r.checks)
    if (c.name != "coassociative") w = std::max(w, c.residual);
  return w;
}

inline Corepresentation trivial_corep(const KacPtr& k) {
  Corepresentation u(k, 1, "1");
  u.set(0, 0, k->alg->unit());
  return u;
}

/// diag(x_1, ..., x_n) for group-like elements x_i of A.
inline Corepresentation diagonal_corep(const KacPtr& k, const std::vector<Vec>& group_likes, std::string name = "v") {
  Corepresentation u(k, static_cast<Index>(group_likes.size()), std::move(name));
  for (Index i = 0; i < u.size; ++i) u.set(i, i, group_likes[i]);
  return u;
}

inline Vec character(const Corepresentation& u) {
  Vec chi = Vec::Zero(u.adim());
  for (Index i = 0; i < u.size; ++i) chi += u.entry(i, i);
  return chi;
}

inline Corepresentation tensor(const Corepresentation& u, const Corepresentation& w) {
  require_same_kac(u.kac, w.kac);
  const FiniteStarAlgebra& a = *u.kac->alg;
  Corepresentation t(u.kac, u.size * w.size, u.name + "(x)" + w.name);
  for (Index i = 0; i < u.size; ++i)
    for (Index j = 0; j < u.size; ++j)
      for (Index k = 0; k < w.size; ++k)
        for (Index l = 0; l < w.size; ++l) t.set(i * w.size + k, j * w.size + l, a.multiply(u.entry(i, j), w.entry(k, l)));
  return t;
}

/// ubar with entries u_ij*.
inline Corepresentation conjugate(const Corepresentation& u) {
  Corepresentation c(u.kac, u.size, "conj(" + u.name + ")");
  for (Index i = 0; i < u.size; ++i)
    for (Index j = 0; j < u.size; ++j) c.set(i, j, u.kac->alg->star(u.entry(i, j)));
  return c;
}

inline Corepresentation direct_sum(const std::vector<Corepresentation>& us) {
  if (us.empty()) throw Error(ErrorKind::InvalidInput, "direct sum of nothing");
  Index n = 0;
  for (const auto& u : us) {
    require_same_kac(us[0].kac, u.kac);
    n += u.size;
  }
  Corepresentation s(us[0].kac, n, "sum");
  Index off = 0;
  for (const auto& u : us) {
    for (Index i = 0; i < u.size; ++i)
      for (Index j = 0; j < u.size; ++j) s.set(off + i, off + j, u.entry(i, j));
    off += u.size;
  }
  return s;
}

/// V* u V entrywise for an n x m matrix V with orthonormal columns.
inline Corepresentation restrict_corep(const Corepresentation& u, const Mat& v) {
  Corepresentation r(u.kac, v.cols(), u.name + "|");
  for (Index a = 0; a < v.cols(); ++a)
    for (Index b = 0; b < v.cols(); ++b) {
      Vec x = Vec::Zero(u.adim());
      for (Index i = 0; i < u.size; ++i)
        for (Index j = 0; j < u.size; ++j) {
          cplx c = std::conj(v(i, a)) * v(j, b);
          if (c != 0.0) x += c * u.entry(i, j);
        }
      r.set(a, b, x);
    }
  return r;
}

struct IntertwinerSpace {
  Index source_size = 0, target_size = 0;
  std::vector<Mat> basis;  // target_size x source_size, Frobenius orthonormal
  Index dimension() const { return static_cast<Index>(basis.size()); }
};

/// Matrix of T -> (T⊗1)v - w(T⊗1) on vec(T) (row-major T).
inline Mat intertwiner_system(const Corepresentation& v, const Corepresentation& w) {
  require_same_kac(v.kac, w.kac);
  const Index n = v.size, m = w.size, da = v.adim();
  Mat sys = Mat::Zero(m * n * da, m * n);
  for (Index p = 0; p < m; ++p)
    for (Index q = 0; q < n; ++q) {
      const Index col = p * n + q;
      for (Index k = 0; k < n; ++k) sys.block((p * n + k) * da, col, da, 1) += v.entry(q, k);
      for (Index i = 0; i < m; ++i) sys.block((i * n + q) * da, col, da, 1) -= w.entry(i, p);
    }
  return sys;
}

/// Hom(v, w) = {T : (T⊗1)v = w(T⊗1)}.
inline IntertwinerSpace intertwiners(const Corepresentation& v, const Corepresentation& w, double eps = kDefaultEps) {
  Mat null = nullspace(intertwiner_system(v, w), std::sqrt(eps));
  IntertwinerSpace s{v.size, w.size, {}};
  for (Index c = 0; c < null.cols(); ++c) s.basis.push_back(as_matrix(null.col(c), w.size, v.size));
  return s;
}

/// Residual of the intertwining equation for a given T.
inline double intertwining_residual(const Corepresentation& v, const Corepresentation& w, const Mat& t) {
  return max_abs(Vec(intertwiner_system(v, w) * as_vector(t)));
}

/// u_β from β(b_i) = Σ_j b_j ⊗ u_ji in the orthonormal basis of B. Works for
/// coactions and anticoactions alike.
inline Corepresentation corep_of_coaction(const CoactionMap& beta, double eps = kDefaultEps) {
  require_valid(beta, eps);
  const FiniteStarAlgebra& b = *beta.target;
  const Index n = b.dim(), da = beta.kac->dim();
  Mat on_map = compose_left(b.orthonormal_inverse(), Mat(beta.map * b.orthonormal_basis()), da);
  Corepresentation u(beta.kac, n, "u_" + beta.name);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) u.set(j, i, on_map.col(i).segment(j * da, da));
  return u;
}

inline Corepresentation regular_corep(const KacPtr& k, double eps = kDefaultEps) {
  return corep_of_coaction(comultiplication_coaction(k), eps);
}

/// π_u on L(H) ⊗ P: e_ij ⊗ p -> Σ_ab e_ab ⊗ (1⊗u_ai)π(p)(1⊗u_bj*).
inline CoactionMap pi_u(const Corepresentation& u, const CoactionMap& pi, double eps = kDefaultEps) {
  require_same_kac(u.kac, pi.kac);
  require_valid(pi, eps);
  const FiniteStarAlgebra& a = *u.kac->alg;
  const Index n = u.size, dp = pi.dim(), da = a.dim();
  auto target = tensor_product(matrix_algebra(n), pi.target);
  CoactionMap out{u.kac, target, Mat::Zero(n * n * dp * da, n * n * dp), CoactionKind::Coaction, "pi_" + u.name};
  std::vector<Vec> ustar(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) ustar[i * n + j] = a.star(u.entry(i, j));
  for (Index r = 0; r < dp; ++r) {
    Mat y = as_matrix(pi.map.col(r), dp, da);  // row l: A-coefficient of p_l
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const Index col = (i * n + j) * dp + r;
        for (Index ia = 0; ia < n; ++ia)
          for (Index ib = 0; ib < n; ++ib) {
            Mat z(dp, da);
            for (Index l = 0; l < dp; ++l)
              z.row(l) = a.multiply(a.multiply(u.entry(ia, i), y.row(l).transpose()), ustar[ib * n + j]).transpose();
            out.map.block(((ia * n + ib) * dp) * da, col, dp * da, 1) = as_vector(z);
          }
      }
  }
  return out;
}

/// K_m(p) = (id⊗h)(π(p)(1⊗a_m)) as dim(P) x dim(P) matrices.
inline std::vector<Mat> haar_slices(const CoactionMap& pi) {
  const FiniteStarAlgebra& a = *pi.kac->alg;
  const Index dp = pi.dim(), da = a.dim();
  Mat hh = Mat::Zero(da, da);  // hh(c, m) = h(a_c a_m)
  for (const auto& t : a.mult_terms()) hh(t.i, t.j) += t.value * pi.kac->haar(t.k);
  std::vector<Mat> k(static_cast<std::size_t>(da), Mat::Zero(dp, dp));
  for (Index r = 0; r < dp; ++r) {
    Mat y = as_matrix(pi.map.col(r), dp, da);
    Mat yh = y * hh;
    for (Index m = 0; m < da; ++m) k[m].col(r) = yh.col(m);
  }
  return k;
}

/// E_{π_u} = (id⊗h)π_u on L(H) ⊗ P, computed without forming π_u: by
/// traciality of h, block (a,c) of E(e_ij ⊗ p) is K_{u_cj* u_ai}(p).
inline Mat pi_u_expectation(const Corepresentation& u, const CoactionMap& pi) {
  require_same_kac(u.kac, pi.kac);
  const FiniteStarAlgebra& a = *u.kac->alg;
  const Index n = u.size, dp = pi.dim(), da = a.dim();
  std::vector<Mat> k = haar_slices(pi);
  Mat e = Mat::Zero(n * n * dp, n * n * dp);
  for (Index ia = 0; ia < n; ++ia)
    for (Index i = 0; i < n; ++i)
      for (Index ic = 0; ic < n; ++ic)
        for (Index j = 0; j < n; ++j) {
          Vec z = a.multiply(a.star(u.entry(ic, j)), u.entry(ia, i));
          Mat blk = Mat::Zero(dp, dp);
          for (Index m = 0; m < da; ++m)
            if (z(m) != 0.0) blk += z(m) * k[m];
          e.block((ia * n + ic) * dp, (i * n + j) * dp, dp, dp) = blk;
        }
  return e;
}

/// Irreducible constituents of the regular corepresentation, one per class,
/// found from the eigenspaces of a random self-adjoint element of End(u).
inline std::vector<Corepresentation> decompose_regular(const KacPtr& k, double eps = kDefaultEps, std::uint64_t seed = 0) {
  Corepresentation u = regular_corep(k, eps);
  IntertwinerSpace end = intertwiners(u, u, eps);
  Rng rng(seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Mat t = Mat::Zero(u.size, u.size);
    // Both hermitian parts, so complex basis phases cannot cancel.
    RVec c = random_real_vector(2 * end.dimension(), rng);
    for (Index b = 0; b < end.dimension(); ++b)
      t += c(2 * b) * (end.basis[b] + end.basis[b].adjoint()) +
           c(2 * b + 1) * cplx(0.0, 1.0) * (end.basis[b] - end.basis[b].adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    const RVec& ev = es.eigenvalues();
    std::vector<Corepresentation> parts;
    bool ok = true;
    for (Index s = 0, e = 0; s < ev.size() && ok; s = e) {
      e = s + 1;
      while (e < ev.size() && ev(e) - ev(e - 1) < 1e-6) ++e;
      Corepresentation w = restrict_corep(u, es.eigenvectors().middleCols(s, e - s));
      if (intertwiners(w, w, eps).dimension() != 1) ok = false;
      parts.push_back(std::move(w));
    }
    if (!ok) continue;
    std::vector<Corepresentation> classes;
    for (auto& w : parts) {
      bool seen = false;
      for (const auto& c : classes)
        if (c.size == w.size && intertwiners(w, c, eps).dimension() > 0) seen = true;
      if (!seen) {
        w.name = "irr" + std::to_string(classes.size());
        classes.push_back(std::move(w));
      }
    }
    std::stable_sort(classes.begin(), classes.end(), [](const auto& x, const auto& y) { return x.size < y.size; });
    return classes;
  }
  throw Error(ErrorKind::MissingIrreducibles, "could not split the regular corepresentation");
}

}  // namespace kacsub
