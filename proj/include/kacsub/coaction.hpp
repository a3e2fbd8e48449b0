#pragma once

// Anticoaction views, fixed-point algebras, the twisted tensor β⊗π, spectral
// projections and eigenmatrices.

#include "kacsub/corep.hpp"

#include <optional>

namespace kacsub {

// ---------------------------------------------------------------------------
// Twists

/// t(x) = entrywise conjugate of x* in the orthonormal basis. Linear,
/// involutive; antimultiplicative when the orthonormal structure constants
/// are real (see `transposition_residual`).
inline Mat transposition(const FiniteStarAlgebra& b) {
  return b.orthonormal_basis() * b.orthonormal_inverse().conjugate() * b.star_matrix().conjugate();
}

inline double transposition_residual(const FiniteStarAlgebra& b, const Mat& t) {
  const Index n = b.dim();
  double w = max_abs(Mat(t * t - Mat::Identity(n, n)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      w = std::max(w, max_abs(Vec(t * b.multiply(b.basis(i), b.basis(j)) - b.multiply(t.col(j), t.col(i)))));
  return w;
}

/// ᵒβ on B°: same coefficients, opposite multiplication.
inline CoactionMap o_twist(const CoactionMap& beta) {
  return {beta.kac, opposite(beta.target), beta.map, CoactionKind::Coaction, "o(" + beta.name + ")"};
}

/// ᵗβ = (t⊗id)βt.
inline CoactionMap t_twist(const CoactionMap& beta, CoactionKind kind = CoactionKind::Coaction) {
  Mat t = transposition(*beta.target);
  return {beta.kac, beta.target, compose_left(t, Mat(beta.map * t), beta.kac->dim()), kind, "t(" + beta.name + ")"};
}

/// β^κ = (id⊗κ)β, over (A, σδ, κ, h).
inline CoactionMap kappa_twist(const CoactionMap& beta) {
  return {opposite_comultiplication(beta.kac), beta.target, compose_right(beta.kac->antipode, beta.map, beta.dim()),
          CoactionKind::Coaction, beta.name + "^kappa"};
}

struct Def31Views {
  CoactionMap o_twist, t_twist, kappa_twist;
  bool anticoaction = false;  // β itself checked as a homomorphism into B⊗A^op
  bool verdict_o = false, verdict_t = false, verdict_kappa = false;
  bool agree = false;
  double transposition_residual = 0.0;
  Report report;
};

inline Def31Views def31_views(const CoactionMap& beta, double eps = kDefaultEps) {
  Def31Views v{o_twist(beta), t_twist(beta), kappa_twist(beta)};
  v.anticoaction = validate_as(beta, CoactionKind::Anticoaction, eps).pass();
  v.verdict_o = validate_as(v.o_twist, CoactionKind::Coaction, eps).pass();
  v.verdict_t = validate_as(v.t_twist, CoactionKind::Coaction, eps).pass();
  v.verdict_kappa = validate_as(v.kappa_twist, CoactionKind::Coaction, eps).pass();
  v.transposition_residual = transposition_residual(*beta.target, transposition(*beta.target));
  v.agree = v.anticoaction == v.verdict_o && v.verdict_o == v.verdict_t && v.verdict_t == v.verdict_kappa;
  v.report.add_flag("anticoaction", v.anticoaction);
  v.report.add_flag("o-twist is a coaction", v.verdict_o);
  v.report.add_flag("t-twist is a coaction", v.verdict_t);
  v.report.add_flag("kappa-twist is a coaction", v.verdict_kappa);
  v.report.add("transposition antimultiplicative", v.transposition_residual, eps);
  v.report.add_flag("verdicts agree", v.agree);
  return v;
}

/// ᵏδ = (κ⊗id)δκ on A.
inline CoactionMap kappa_delta(const KacPtr& k) {
  return {k, k->alg, compose_left(k->antipode, Mat(k->comult * k->antipode), k->dim()), CoactionKind::Anticoaction,
          "kdelta"};
}

/// ᵗι_v: e_ij -> Σ_ab e_ab ⊗ v_bj v_ai*.
inline CoactionMap t_iota_v(const Corepresentation& v, double eps = kDefaultEps) {
  Report r = validate_corep(v, eps);
  if (!r.pass()) throw Error(ErrorKind::NotUnitary, "corepresentation " + v.name + ": " + r.failures());
  const FiniteStarAlgebra& a = *v.kac->alg;
  const Index n = v.size, da = a.dim();
  CoactionMap out{v.kac, matrix_algebra(n), Mat::Zero(n * n * da, n * n), CoactionKind::Anticoaction, "t_iota_" + v.name};
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index ia = 0; ia < n; ++ia)
        for (Index ib = 0; ib < n; ++ib)
          out.map.block((ia * n + ib) * da, i * n + j, da, 1) = a.multiply(v.entry(ib, j), a.star(v.entry(ia, i)));
  return out;
}

// ---------------------------------------------------------------------------
// Fixed points

struct FixedPointAlgebra {
  AlgebraPtr ambient;
  Mat projection;
  Mat basis;  // trace-orthonormal columns spanning Im(E)
  std::optional<SubalgebraEmbedding> as_algebra;
  double idempotence_residual = 0.0;
  double closure_residual = 0.0;
  double trace_residual = 0.0;
  bool contains_unit = false;
  bool is_algebra = false;

  Index dim() const { return basis.cols(); }
};

inline FixedPointAlgebra fixed_points_of(const AlgebraPtr& ambient, const Mat& e, double eps = kDefaultEps) {
  FixedPointAlgebra f;
  f.ambient = ambient;
  f.projection = e;
  f.idempotence_residual = max_abs(Mat(e * e - e));
  Mat tr_row = ambient->trace_vector().transpose();
  f.trace_residual = max_abs(Mat(tr_row * e - tr_row));
  f.basis = trace_orthonormalize(*ambient, e, std::sqrt(eps));
  Mat coord = f.basis.adjoint() * ambient->gram();
  f.contains_unit = max_abs(Vec(ambient->unit() - f.basis * (coord * ambient->unit()))) < std::sqrt(eps);
  double closure = 0.0;
  for (Index i = 0; i < f.dim(); ++i) {
    Vec s = ambient->star(f.basis.col(i));
    closure = std::max(closure, max_abs(Vec(s - f.basis * (coord * s))));
    for (Index j = 0; j < f.dim(); ++j) {
      Vec p = ambient->multiply(f.basis.col(i), f.basis.col(j));
      closure = std::max(closure, max_abs(Vec(p - f.basis * (coord * p))));
    }
  }
  f.closure_residual = closure;
  f.is_algebra = f.contains_unit && closure < eps && f.idempotence_residual < eps;
  if (f.is_algebra) f.as_algebra = subalgebra(ambient, f.basis, eps);
  return f;
}

/// E = (id⊗h)∘map.
inline Mat averaging_map(const CoactionMap& c) {
  return compose_right(Mat(c.kac->haar.transpose()), c.map, c.dim());
}

inline FixedPointAlgebra averaging(const CoactionMap& c, double eps = kDefaultEps) {
  return fixed_points_of(c.target, averaging_map(c), eps);
}

/// Fixed points as a subspace: nullspace of β - (·)⊗1.
inline Mat fixed_subspace(const CoactionMap& c, double eps = kDefaultEps) {
  Mat sys = c.map - kron(Mat::Identity(c.dim(), c.dim()), Mat(c.kac->alg->unit()));
  return nullspace(sys, std::sqrt(eps));
}

// ---------------------------------------------------------------------------
// Twisted tensor β⊗π

inline void require_twisted_pair(const CoactionMap& beta, const CoactionMap& pi) {
  if (beta.kind != CoactionKind::Anticoaction) throw Error(ErrorKind::KindMismatch, "beta must be an anticoaction");
  if (pi.kind != CoactionKind::Coaction) throw Error(ErrorKind::KindMismatch, "pi must be a coaction");
  require_same_kac(beta.kac, pi.kac);
}

/// b⊗p -> π(p)_23 β(b)_13 on B⊗P. The result is coassociative but in
/// general neither a coaction nor an anticoaction.
inline CoactionMap beta_tensor_pi(const CoactionMap& beta, const CoactionMap& pi) {
  require_twisted_pair(beta, pi);
  const FiniteStarAlgebra& a = *beta.kac->alg;
  const Index db = beta.dim(), dp = pi.dim(), da = a.dim();
  CoactionMap out{beta.kac, tensor_product(beta.target, pi.target), Mat::Zero(db * dp * da, db * dp), CoactionKind::None,
                  beta.name + "(x)" + pi.name};
  for (Index i = 0; i < db; ++i) {
    Mat bi = as_matrix(beta.map.col(i), db, da);
    for (Index j = 0; j < dp; ++j) {
      Mat pj = as_matrix(pi.map.col(j), dp, da);
      Mat r = Mat::Zero(db * dp, da);
      for (const auto& t : a.mult_terms())  // a_{t.i} from π, a_{t.j} from β
        r.col(t.k) += t.value * kron(Vec(bi.col(t.j)), Vec(pj.col(t.i)));
      out.map.col(i * dp + j) = as_vector(r);
    }
  }
  return out;
}

/// E_{β⊗π} directly: block (k,l) of E(b_i⊗p_j) is (B_i H^t P_j^t)(k,l) with
/// H(c,a) = h(a_c a_a).
inline Mat beta_tensor_pi_expectation(const CoactionMap& beta, const CoactionMap& pi) {
  require_twisted_pair(beta, pi);
  const FiniteStarAlgebra& a = *beta.kac->alg;
  const Index db = beta.dim(), dp = pi.dim(), da = a.dim();
  Mat hh = Mat::Zero(da, da);
  for (const auto& t : a.mult_terms()) hh(t.i, t.j) += t.value * beta.kac->haar(t.k);
  Mat e(db * dp, db * dp);
  for (Index i = 0; i < db; ++i) {
    Mat bh = as_matrix(beta.map.col(i), db, da) * hh.transpose();
    for (Index j = 0; j < dp; ++j) e.col(i * dp + j) = as_vector(Mat(bh * as_matrix(pi.map.col(j), dp, da).transpose()));
  }
  return e;
}

struct FixedPointTensor {
  FixedPointAlgebra fixed;
  double left_regular_residual = 0.0;
};

/// (B⊗P)^{β⊗π} with the left-regular cross-check against E_{π_{u_β}}.
inline FixedPointTensor fixed_point_tensor(const CoactionMap& beta, const CoactionMap& pi, double eps = kDefaultEps) {
  require_twisted_pair(beta, pi);
  require_valid(beta, eps);
  require_valid(pi, eps);
  auto ambient = tensor_product(beta.target, pi.target);
  Mat e = beta_tensor_pi_expectation(beta, pi);
  FixedPointTensor out{fixed_points_of(ambient, e, eps)};
  Corepresentation u = corep_of_coaction(beta, eps);
  Mat eu = pi_u_expectation(u, pi);
  Mat lam = kron(left_regular_map(*beta.target), Mat::Identity(pi.dim(), pi.dim()));
  out.left_regular_residual = max_abs(Mat(eu * lam - lam * e));
  if (!(out.left_regular_residual < eps))
    throw Error(ErrorKind::CrossCheckFailed, "left-regular identity residual " + std::to_string(out.left_regular_residual));
  return out;
}

/// Z(B) ∩ B^β as a subspace of B.
inline Mat fixed_center(const CoactionMap& beta, double eps = kDefaultEps) {
  const FiniteStarAlgebra& b = *beta.target;
  const Index n = b.dim();
  Mat comm = Mat::Zero(n * n, n);
  for (const auto& t : b.mult_terms()) {
    comm(t.i * n + t.k, t.j) += t.value;
    comm(t.j * n + t.k, t.i) -= t.value;
  }
  Mat fix = beta.map - kron(Mat::Identity(n, n), Mat(beta.kac->alg->unit()));
  Mat sys(comm.rows() + fix.rows(), n);
  sys << comm, fix;
  return nullspace(sys, std::sqrt(eps));
}

/// Z(B) ∩ B^β = C; returns the offending element otherwise.
struct ErgodicityCheck {
  bool ergodic = false;
  Index dimension = 0;
  Vec witness;  // a non-scalar fixed central element when not ergodic
};

inline ErgodicityCheck ergodicity(const CoactionMap& beta, double eps = kDefaultEps) {
  Mat z = fixed_center(beta, eps);
  ErgodicityCheck e{z.cols() == 1, z.cols(), {}};
  if (!e.ergodic && z.cols() > 1) {
    const FiniteStarAlgebra& b = *beta.target;
    for (Index c = 0; c < z.cols() && e.witness.size() == 0; ++c) {
      Vec x = z.col(c);
      Vec scalar_part = b.trace(x) * b.unit();
      if (b.norm(x - scalar_part) > std::sqrt(eps)) e.witness = x - scalar_part;
    }
  }
  return e;
}

inline std::string describe_element(const FiniteStarAlgebra& b, const Vec& x) {
  std::string out;
  for (Index i = 0; i < b.dim(); ++i)
    if (std::abs(x(i)) > 1e-9) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s(%.6g%+.6gi)%s", out.empty() ? "" : " + ", x(i).real(), x(i).imag(),
                    b.labels()[i].c_str());
      out += buf;
    }
  return out.empty() ? "0" : out;
}

struct CenterShadow {
  Index fixed_center_dim = 0;
  double membership_residual = 0.0;   // E(z⊗1) - z⊗1
  double commutation_residual = 0.0;  // [z⊗1, F]
  bool holds = false;
};

/// (Z(B)∩B^β)⊗1 ⊆ Z((B⊗P)^{β⊗π}).
inline CenterShadow center_shadow(const CoactionMap& beta, const CoactionMap& pi, const FixedPointAlgebra& fixed,
                                  double eps = kDefaultEps) {
  Mat z = fixed_center(beta, eps);
  const FiniteStarAlgebra& amb = *fixed.ambient;
  CenterShadow s;
  s.fixed_center_dim = z.cols();
  for (Index c = 0; c < z.cols(); ++c) {
    Vec x = kron(Vec(z.col(c)), pi.target->unit());
    s.membership_residual = std::max(s.membership_residual, max_abs(Vec(fixed.projection * x - x)));
    Mat lx = amb.left_mult(x) - amb.right_mult(x);
    s.commutation_residual = std::max(s.commutation_residual, max_abs(Mat(lx * fixed.basis)));
  }
  s.holds = s.membership_residual < eps && s.commutation_residual < eps;
  return s;
}

// ---------------------------------------------------------------------------
// Spectral projections

struct SpectralComponent {
  Corepresentation irrep;
  Mat projection;
  Mat basis;  // spanning P^u
  Index dim = 0;
};

struct SpectralDecomposition {
  std::vector<SpectralComponent> components;
  double idempotence_residual = 0.0;
  double orthogonality_residual = 0.0;  // max ||E_u E_w|| for u != w
  double self_adjointness_residual = 0.0;
  double mass_defect = 0.0;             // ||id - Σ E_u||
  bool complete = false;
};

/// E_u = dim(u)(id⊗h)(π(·)(1⊗χ(u)*)).
inline SpectralDecomposition spectral(const CoactionMap& pi, const std::vector<Corepresentation>& irr,
                                      double eps = kDefaultEps) {
  if (irr.empty()) throw Error(ErrorKind::MissingIrreducibles, "no irreducible corepresentations supplied");
  const FiniteStarAlgebra& p = *pi.target;
  const Index dp = p.dim();
  std::vector<Mat> k = haar_slices(pi);
  SpectralDecomposition sd;
  Mat sum = Mat::Zero(dp, dp);
  for (const auto& u : irr) {
    require_same_kac(u.kac, pi.kac);
    Vec chi_star = pi.kac->alg->star(character(u));
    Mat e = Mat::Zero(dp, dp);
    for (Index m = 0; m < chi_star.size(); ++m)
      if (chi_star(m) != 0.0) e += chi_star(m) * k[m];
    e *= static_cast<double>(u.size);
    SpectralComponent c{u, e, range_basis(e, std::sqrt(eps)), 0};
    c.dim = c.basis.cols();
    sd.idempotence_residual = std::max(sd.idempotence_residual, max_abs(Mat(e * e - e)));
    sd.self_adjointness_residual =
        std::max(sd.self_adjointness_residual, max_abs(Mat(p.gram() * e - e.adjoint() * p.gram())));
    sum += e;
    sd.components.push_back(std::move(c));
  }
  for (std::size_t a = 0; a < sd.components.size(); ++a)
    for (std::size_t b = 0; b < sd.components.size(); ++b)
      if (a != b)
        sd.orthogonality_residual = std::max(
            sd.orthogonality_residual, max_abs(Mat(sd.components[a].projection * sd.components[b].projection)));
  sd.mass_defect = max_abs(Mat(Mat::Identity(dp, dp) - sum));
  sd.complete = sd.mass_defect < eps;
  return sd;
}

// ---------------------------------------------------------------------------
// Eigenmatrices

enum class EigenmatrixStatus { Unitary, Nonunitary, None };

inline const char* to_string(EigenmatrixStatus s) {
  switch (s) {
    case EigenmatrixStatus::Unitary: return "unitary";
    case EigenmatrixStatus::Nonunitary: return "nonunitary";
    case EigenmatrixStatus::None: return "none";
  }
  return "none";
}

struct EigenmatrixResult {
  Vec m;  // element of M_n ⊗ P
  EigenmatrixStatus status = EigenmatrixStatus::None;
  Index solution_dim = 0;
  double equation_residual = 0.0;
  double unitarity_residual = 0.0;
  std::string method;
};

/// Matrix of M -> (id⊗π)M - M_12 u_13 on M_n ⊗ P.
inline Mat eigenmatrix_system(const CoactionMap& pi, const Corepresentation& u) {
  require_same_kac(pi.kac, u.kac);
  const Index n = u.size, dp = pi.dim(), da = pi.kac->dim();
  Mat sys = Mat::Zero(n * n * dp * da, n * n * dp);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      for (Index l = 0; l < dp; ++l) {
        const Index col = (i * n + k) * dp + l;
        sys.block((i * n + k) * dp * da, col, dp * da, 1) += pi.map.col(l);
        for (Index j = 0; j < n; ++j) sys.block(((i * n + j) * dp + l) * da, col, da, 1) -= u.entry(k, j);
      }
  return sys;
}

namespace detail {

/// Concrete operator Σ e_ij ⊗ λ_P(M_ij) of size n·dim(P).
inline Mat eigenmatrix_operator(const FiniteStarAlgebra& p, Index n, const Vec& m) {
  const Index dp = p.dim();
  Mat x = Mat::Zero(n * dp, n * dp);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) x.block(i * dp, j * dp, dp, dp) = left_regular(p, m.segment((i * n + j) * dp, dp));
  return x;
}

inline double unitarity_in(const FiniteStarAlgebra& t, const Vec& m) {
  Vec ms = t.star(m);
  return std::max(max_abs(Vec(t.multiply(m, ms) - t.unit())), max_abs(Vec(t.multiply(ms, m) - t.unit())));
}

}  // namespace detail

/// Solves (id⊗π)M = M_12 u_13. When `equivariant_copy` (an embedding
/// j: A -> P with π j = (j⊗id)δ) is given, M = (id⊗j)(u) is tried first.
/// Otherwise the solution of largest smallest singular value among a
/// seeded sample is polar-corrected and rechecked.
inline EigenmatrixResult eigenmatrix(const CoactionMap& pi, const Corepresentation& u, const Mat* equivariant_copy = nullptr,
                                     double eps = kDefaultEps, std::uint64_t seed = 0) {
  const Index n = u.size, dp = pi.dim();
  Mat sys = eigenmatrix_system(pi, u);
  Mat null = nullspace(sys, std::sqrt(eps));
  EigenmatrixResult res;
  res.solution_dim = null.cols();
  if (null.cols() == 0) {
    res.m = Vec::Zero(n * n * dp);
    res.method = "trivial solution space";
    return res;
  }
  auto t = tensor_product(matrix_algebra(n), pi.target);
  auto finish = [&](Vec m, std::string method) {
    res.m = std::move(m);
    res.equation_residual = max_abs(Vec(sys * res.m));
    res.unitarity_residual = detail::unitarity_in(*t, res.m);
    res.status = (res.equation_residual < eps && res.unitarity_residual < eps) ? EigenmatrixStatus::Unitary
                                                                                : EigenmatrixStatus::Nonunitary;
    res.method = std::move(method);
  };
  if (equivariant_copy) {
    Vec m = apply_right(*equivariant_copy, u.data, n * n);
    if (max_abs(Vec(sys * m)) < eps && detail::unitarity_in(*t, m) < eps) {
      finish(m, "equivariant copy");
      return res;
    }
  }
  Rng rng(seed);
  Vec best;
  double best_smin = -1.0;
  for (int s = 0; s < 16; ++s) {
    Vec m = null * random_vector(null.cols(), rng);
    RVec sv = singular_values(detail::eigenmatrix_operator(*pi.target, n, m));
    double smin = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
    if (smin > best_smin) {
      best_smin = smin;
      best = m;
    }
  }
  if (best_smin < 1e-12) {
    finish(best, "sampled solution (singular)");
    return res;
  }
  // Polar part of the concrete operator, read back in coefficients.
  Mat x = detail::eigenmatrix_operator(*pi.target, n, best);
  Mat polar = x * inverse_sqrt_psd(Mat(x.adjoint() * x));
  const Index coeffs = n * n * dp;
  Mat rep(x.size(), coeffs);
  for (Index c = 0; c < coeffs; ++c) rep.col(c) = detail::eigenmatrix_operator(*pi.target, n, unit_vector(coeffs, c)).reshaped();
  Vec m = least_squares(rep, Mat(polar.reshaped()));
  finish(m, "polar correction");
  return res;
}

}  // namespace kacsub
