#pragma once

// Linear maps B -> B ⊗ A tagged as coactions or anticoactions, their
// validation, and the crossed product with its dual coaction.

#include "kacsub/kac.hpp"

namespace kacsub {

enum class CoactionKind { Coaction, Anticoaction, None };

inline const char* to_string(CoactionKind k) {
  switch (k) {
    case CoactionKind::Coaction: return "coaction";
    case CoactionKind::Anticoaction: return "anticoaction";
    case CoactionKind::None: return "none";
  }
  return "none";
}

/// Column i of `map` is the coefficient vector of β(b_i) in B ⊗ A.
struct CoactionMap {
  KacPtr kac;
  AlgebraPtr target;
  Mat map;
  CoactionKind kind = CoactionKind::Coaction;
  std::string name;

  Index dim() const { return target->dim(); }
  Vec apply(const Vec& x) const { return map * x; }
};

/// B ⊗ A for coactions, B ⊗ A^op for anticoactions: β is a homomorphism
/// into this algebra.
inline AlgebraPtr homomorphism_codomain(const CoactionMap& c, CoactionKind kind) {
  return tensor_product(c.target, kind == CoactionKind::Anticoaction ? opposite(c.kac->alg) : c.kac->alg);
}

/// (β ⊗ id)β - (id ⊗ δ)β.
inline double coassociativity_residual(const CoactionMap& c) {
  const Index da = c.kac->dim();
  return max_abs(Mat(compose_left(c.map, c.map, da) - compose_right(c.kac->comult, c.map, c.dim())));
}

/// Report for `c` checked against an explicitly chosen kind.
inline Report validate_as(const CoactionMap& c, CoactionKind kind, double eps = kDefaultEps) {
  const Index db = c.dim(), da = c.kac->dim();
  if (c.map.rows() != db * da || c.map.cols() != db)
    throw Error(ErrorKind::DimensionMismatch, "coaction matrix must be dim(B)dim(A) x dim(B)");
  Report r;
  r.add("coassociative", coassociativity_residual(c), eps);
  Mat tr_row = c.target->trace_vector().transpose();
  Mat want = c.kac->alg->unit() * tr_row;
  r.add("trace equivariant", max_abs(Mat(compose_left(tr_row, c.map, da) - want)), eps);
  Mat eps_row = c.kac->counit.transpose();
  r.add("counital", max_abs(Mat(compose_right(eps_row, c.map, db) - Mat::Identity(db, db))), eps);
  if (kind == CoactionKind::None) return r;
  auto codomain = homomorphism_codomain(c, kind);
  const FiniteStarAlgebra& b = *c.target;
  double mult = 0.0, star = 0.0;
  if (db <= 16) {
    for (Index i = 0; i < db; ++i) {
      Vec bi = c.map.col(i);
      star = std::max(star, max_abs(Vec(codomain->star(bi) - c.map * b.star(b.basis(i)))));
      for (Index j = 0; j < db; ++j)
        mult = std::max(mult, max_abs(Vec(codomain->multiply(bi, c.map.col(j)) - c.map * b.multiply(b.basis(i), b.basis(j)))));
    }
  } else {
    Rng rng(0xc0ac);
    for (int s = 0; s < 16; ++s) {
      Vec x = random_vector(db, rng), y = random_vector(db, rng);
      Vec x_scaled = x / std::max(1.0, b.norm(x)), y_scaled = y / std::max(1.0, b.norm(y));
      mult = std::max(mult, max_abs(Vec(codomain->multiply(c.map * x_scaled, c.map * y_scaled) -
                                        c.map * b.multiply(x_scaled, y_scaled))));
      star = std::max(star, max_abs(Vec(codomain->star(c.map * x_scaled) - c.map * b.star(x_scaled))));
    }
  }
  const char* mult_name = kind == CoactionKind::Anticoaction ? "antimultiplicative" : "multiplicative";
  r.add(mult_name, mult, eps);
  r.add("star preserving", star, eps);
  r.add("unital", max_abs(Vec(c.map * b.unit() - codomain->unit())), eps);
  r.add_flag("injective", numerical_rank(c.map, std::sqrt(eps)) == db);
  return r;
}

inline Report validate_coaction(const CoactionMap& c, double eps = kDefaultEps) { return validate_as(c, c.kind, eps); }

/// Throws NotACoaction when `c` fails validation for its own kind.
inline void require_valid(const CoactionMap& c, double eps) {
  Report r = validate_coaction(c, eps);
  if (!r.pass()) throw Error(ErrorKind::NotACoaction, (c.name.empty() ? std::string("map") : c.name) + ": " + r.failures());
}

inline void require_same_kac(const KacPtr& a, const KacPtr& b) {
  if (a != b) throw Error(ErrorKind::MixedAlgebras, "objects are defined over different Kac algebras");
}

/// δ regarded as a coaction of A on itself.
inline CoactionMap comultiplication_coaction(const KacPtr& k) {
  return {k, k->alg, k->comult, CoactionKind::Coaction, "delta"};
}

/// b -> b ⊗ 1.
inline CoactionMap trivial_coaction(const KacPtr& k, const AlgebraPtr& b, CoactionKind kind = CoactionKind::Coaction) {
  return {k, b, kron(Mat::Identity(b->dim(), b->dim()), Mat(k->alg->unit())), kind, "trivial"};
}

// ---------------------------------------------------------------------------
// Crossed products

/// Q ⋊ Γ with its dual coaction of C[Γ], plus the canonical copies of Q and
/// of C[Γ] inside it. Basis q_i u_g sits at index g*dim(Q) + i.
struct CrossedProduct {
  AlgebraPtr algebra;
  CoactionMap dual;
  Mat q_embedding;      // Q -> P
  Mat group_embedding;  // C[Γ] -> P, equivariant
  KacPtr kac;
};

inline CrossedProduct crossed_product(const GroupAction& act, KacPtr kac = nullptr, double eps = kDefaultEps) {
  Report ar = act.validate(eps);
  if (!ar.pass()) throw Error(ErrorKind::InvalidInput, "group action: " + ar.failures());
  const FiniteGroupTable& g = act.group;
  const FiniteStarAlgebra& q = *act.target;
  if (!kac) kac = group_algebra(g);
  if (kac->dim() != g.order()) throw Error(ErrorKind::DimensionMismatch, "Kac algebra does not match the group");
  const Index n = g.order(), dq = q.dim(), dp = n * dq;
  auto idx = [dq](Index grp, Index i) { return grp * dq + i; };
  std::vector<std::string> labels;
  std::vector<MultTerm> mult;
  for (Index a = 0; a < n; ++a)
    for (Index i = 0; i < dq; ++i) labels.push_back(q.labels()[i] + "*u_" + g.names()[a]);
  // (q_i u_a)(q_j u_b) = q_i α_a(q_j) u_{ab}
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index j = 0; j < dq; ++j) {
        Vec moved = act.automorphisms[a].col(j);
        for (Index i = 0; i < dq; ++i) {
          Vec prod = q.multiply(q.basis(i), moved);
          for (Index k = 0; k < dq; ++k)
            if (prod(k) != 0.0) mult.push_back({idx(a, i), idx(b, j), idx(g.mul(a, b), k), prod(k)});
        }
      }
  Mat star = Mat::Zero(dp, dp);
  for (Index a = 0; a < n; ++a)
    for (Index i = 0; i < dq; ++i) {
      // (q_i u_a)* = α_{a^-1}(q_i*) u_{a^-1}
      Vec s = act.automorphisms[g.inv(a)] * q.star(q.basis(i));
      star.block(idx(g.inv(a), 0), idx(a, i), dq, 1) = s;
    }
  Vec unit = Vec::Zero(dp), trace = Vec::Zero(dp);
  unit.segment(idx(g.identity(), 0), dq) = q.unit();
  trace.segment(idx(g.identity(), 0), dq) = q.trace_vector();
  auto p = std::make_shared<FiniteStarAlgebra>(labels, mult, unit, star, trace, FiniteStarAlgebra::Options{eps, true});
  CrossedProduct cp;
  cp.algebra = p;
  cp.kac = kac;
  cp.dual = {kac, p, Mat::Zero(dp * n, dp), CoactionKind::Coaction, "dual"};
  for (Index a = 0; a < n; ++a)
    for (Index i = 0; i < dq; ++i) cp.dual.map(idx(a, i) * n + a, idx(a, i)) = 1.0;
  cp.q_embedding = Mat::Zero(dp, dq);
  cp.q_embedding.middleRows(idx(g.identity(), 0), dq) = Mat::Identity(dq, dq);
  cp.group_embedding = Mat::Zero(dp, n);
  for (Index a = 0; a < n; ++a) cp.group_embedding.middleRows(idx(a, 0), dq).col(a) = q.unit();
  return cp;
}

}  // namespace kacsub
