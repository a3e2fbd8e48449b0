#pragma once

// Finite-dimensional Kac algebras (A, δ, ε, κ, h) on a FiniteStarAlgebra,
// function and group algebras of finite groups, and crossed products.

#include "kacsub/algcore.hpp"
#include "kacsub/group.hpp"
#include "kacsub/legs.hpp"

namespace kacsub {

/// Default cap on dim(A); the comultiplication is stored dense.
inline constexpr Index kDefaultKacDimCap = 64;

struct KacAlgebra {
  AlgebraPtr alg;
  Mat comult;    // dim^2 x dim, column i = δ(a_i)
  Vec counit;    // ε(a_i)
  Mat antipode;  // κ on coefficient vectors
  Vec haar;      // h(a_i)
  std::string name;

  Index dim() const { return alg->dim(); }
  Vec delta(const Vec& a) const { return comult * a; }
  cplx h(const Vec& a) const { return haar.transpose() * a; }
};
using KacPtr = std::shared_ptr<const KacAlgebra>;

/// μ(Σ x_ab a_a ⊗ a_b) = Σ x_ab a_a a_b.
inline Vec multiply_tensor(const FiniteStarAlgebra& a, const Vec& x) {
  const Index n = a.dim();
  Vec z = Vec::Zero(n);
  for (const auto& t : a.mult_terms()) z(t.k) += t.value * x(t.i * n + t.j);
  return z;
}

inline Report validate_kac(const KacAlgebra& k, double eps = kDefaultEps) {
  const Index n = k.alg->dim();
  if (k.comult.rows() != n * n || k.comult.cols() != n || k.counit.size() != n || k.antipode.rows() != n ||
      k.antipode.cols() != n || k.haar.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "Kac algebra tensor shapes");
  const FiniteStarAlgebra& a = *k.alg;
  Report r;
  auto aa = tensor_product(k.alg, k.alg);
  const Mat id = Mat::Identity(n, n);
  // δ: unital *-homomorphism, coassociative
  double mult = 0.0, star = 0.0;
  for (Index i = 0; i < n; ++i) {
    Vec di = k.comult.col(i);
    star = std::max(star, max_abs(Vec(aa->star(di) - k.comult * a.star(a.basis(i)))));
    for (Index j = 0; j < n; ++j)
      mult = std::max(mult, max_abs(Vec(aa->multiply(di, k.comult.col(j)) - k.comult * a.multiply(a.basis(i), a.basis(j)))));
  }
  r.add("comultiplication multiplicative", mult, eps);
  r.add("comultiplication star", star, eps);
  r.add("comultiplication unital", max_abs(Vec(k.comult * a.unit() - aa->unit())), eps);
  r.add("coassociative", max_abs(Mat(compose_left(k.comult, k.comult, n) - compose_right(k.comult, k.comult, n))), eps);
  // counit
  Mat eps_row = k.counit.transpose();
  r.add("counit left", max_abs(Mat(compose_left(eps_row, k.comult, n) - id)), eps);
  r.add("counit right", max_abs(Mat(compose_right(eps_row, k.comult, n) - id)), eps);
  // antipode
  double left = 0.0, right = 0.0, anti = 0.0, kstar = 0.0;
  for (Index i = 0; i < n; ++i) {
    Vec di = k.comult.col(i);
    Vec want = k.counit(i) * a.unit();
    left = std::max(left, max_abs(Vec(multiply_tensor(a, apply_left(k.antipode, di, n)) - want)));
    right = std::max(right, max_abs(Vec(multiply_tensor(a, apply_right(k.antipode, di, n)) - want)));
    Vec ki = k.antipode.col(i);
    kstar = std::max(kstar, max_abs(Vec(a.star(ki) - k.antipode * a.star(a.basis(i)))));
    for (Index j = 0; j < n; ++j)
      anti = std::max(anti, max_abs(Vec(k.antipode * a.multiply(a.basis(i), a.basis(j)) -
                                        a.multiply(k.antipode.col(j), ki))));
  }
  r.add("antipode left", left, eps);
  r.add("antipode right", right, eps);
  r.add("antipode involutive", max_abs(Mat(k.antipode * k.antipode - id)), eps);
  r.add("antipode antimultiplicative", anti, eps);
  r.add("antipode star", kstar, eps);
  // Haar state: faithful tracial state, two-sided invariant
  Mat t = Mat::Zero(n, n);
  for (const auto& term : a.mult_terms()) t(term.i, term.j) += term.value * k.haar(term.k);
  Mat g = a.star_matrix().transpose() * t;
  r.add("haar unital", std::abs(k.h(a.unit()) - 1.0), eps);
  r.add("haar tracial", max_abs(Mat(t - t.transpose())), eps);
  r.add("haar hermitian", max_abs(Mat(g - g.adjoint())), eps);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  r.checks.push_back({"haar faithful", es.eigenvalues()(0) > eps ? 0.0 : eps - es.eigenvalues()(0), es.eigenvalues()(0) > eps});
  Mat h_row = k.haar.transpose();
  Mat h_one = a.unit() * h_row;
  r.add("haar right invariant", max_abs(Mat(compose_right(h_row, k.comult, n) - h_one)), eps);
  r.add("haar left invariant", max_abs(Mat(compose_left(h_row, k.comult, n) - h_one)), eps);
  return r;
}

inline double cocommutativity_residual(const KacAlgebra& k) {
  const Index n = k.dim();
  return max_abs(Mat(legs::flip(n, n) * k.comult - k.comult));
}

/// ℓ∞(G) on the basis {δ_g}.
inline KacPtr function_algebra(const FiniteGroupTable& g) {
  const Index n = g.order();
  std::vector<std::string> labels;
  std::vector<MultTerm> mult;
  for (Index x = 0; x < n; ++x) {
    labels.push_back("d_" + g.names()[x]);
    mult.push_back({x, x, x, 1.0});
  }
  auto alg = std::make_shared<FiniteStarAlgebra>(labels, mult, Vec::Ones(n), Mat::Identity(n, n),
                                                 Vec::Constant(n, 1.0 / static_cast<double>(n)),
                                                 FiniteStarAlgebra::Options{kDefaultEps, false});
  auto k = std::make_shared<KacAlgebra>();
  k->alg = alg;
  k->comult = Mat::Zero(n * n, n);
  k->antipode = Mat::Zero(n, n);
  k->counit = Vec::Zero(n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) k->comult(a * n + b, g.mul(a, b)) = 1.0;
    k->antipode(g.inv(a), a) = 1.0;
  }
  k->counit(g.identity()) = 1.0;
  k->haar = alg->trace_vector();
  k->name = "function_algebra";
  return k;
}

/// C[G] on the basis {u_g} with h(u_g) = [g = e].
inline KacPtr group_algebra(const FiniteGroupTable& g) {
  const Index n = g.order();
  std::vector<std::string> labels;
  std::vector<MultTerm> mult;
  Mat star = Mat::Zero(n, n), antipode = Mat::Zero(n, n);
  for (Index a = 0; a < n; ++a) {
    labels.push_back("u_" + g.names()[a]);
    star(g.inv(a), a) = 1.0;
    antipode(g.inv(a), a) = 1.0;
    for (Index b = 0; b < n; ++b) mult.push_back({a, b, g.mul(a, b), 1.0});
  }
  Vec trace = Vec::Zero(n);
  trace(g.identity()) = 1.0;
  auto alg = std::make_shared<FiniteStarAlgebra>(labels, mult, unit_vector(n, g.identity()), star, trace,
                                                 FiniteStarAlgebra::Options{kDefaultEps, false});
  auto k = std::make_shared<KacAlgebra>();
  k->alg = alg;
  k->comult = Mat::Zero(n * n, n);
  for (Index a = 0; a < n; ++a) k->comult(a * n + a, a) = 1.0;
  k->counit = Vec::Ones(n);
  k->antipode = antipode;
  k->haar = trace;
  k->name = "group_algebra";
  return k;
}

/// (A, σδ, κ, h).
inline KacPtr opposite_comultiplication(const KacPtr& k) {
  auto o = std::make_shared<KacAlgebra>(*k);
  o->comult = legs::flip(k->dim(), k->dim()) * k->comult;
  o->name = k->name + "^cop";
  return o;
}

/// Kac algebra from raw structure tensors; rejects dimensions above `cap`.
inline KacPtr make_kac(AlgebraPtr alg, Mat comult, Vec counit, Mat antipode, Vec haar, std::string name = "kac",
                       Index cap = kDefaultKacDimCap) {
  if (alg->dim() > cap) throw Error(ErrorKind::InvalidInput, "Kac algebra dimension exceeds the configured cap");
  auto k = std::make_shared<KacAlgebra>(KacAlgebra{std::move(alg), std::move(comult), std::move(counit),
                                                   std::move(antipode), std::move(haar), std::move(name)});
  return k;
}

}  // namespace kacsub
