#include "oracles.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace kacsub;

namespace {

constexpr double kEps = 1e-9;

void expect_kind(const std::function<void()>& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error thrown, expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

Corepresentation diag_likes(const KacPtr& a, const std::vector<Index>& elems) {
  std::vector<Vec> likes;
  for (Index x : elems) likes.push_back(unit_vector(a->dim(), x));
  return diagonal_corep(a, likes, "v");
}

CrossedProduct translation_crossed(Index n) {
  auto g = cyclic_group(n);
  return crossed_product(permutation_action(g, oracle::left_translation_points(g)), group_algebra(g));
}

/// Valid coactions and anticoactions used by the property tests.
std::vector<CoactionMap> corpus() {
  std::vector<CoactionMap> out;
  auto g = symmetric_group(3);
  for (const auto& k : {function_algebra(g), group_algebra(g)}) {
    out.push_back(comultiplication_coaction(k));
    out.push_back(kappa_delta(k));
    out.push_back(t_iota_v(regular_corep(k, kEps), kEps));
    out.push_back(trivial_coaction(k, multimatrix({1, 2})));
  }
  out.push_back(translation_crossed(2).dual);
  out.push_back(translation_crossed(3).dual);
  return out;
}

}  // namespace

TEST(Validate, TrivialAndComultiplication) {
  auto k = group_algebra(symmetric_group(3));
  EXPECT_TRUE(validate_coaction(trivial_coaction(k, matrix_algebra(1)), kEps).pass());
  EXPECT_TRUE(validate_coaction(comultiplication_coaction(k), kEps).pass());
  Report r = validate_as(comultiplication_coaction(k), CoactionKind::Anticoaction, kEps);
  EXPECT_FALSE(r.pass());
  EXPECT_TRUE(r.passed("coassociative")) << r.failures();
}

TEST(Validate, PerturbedMapFails) {
  CoactionMap d = comultiplication_coaction(function_algebra(cyclic_group(3)));
  d.map(0, 0) += 1e-3;
  EXPECT_FALSE(validate_coaction(d, kEps).pass());
  d.map.resize(3, 3);
  EXPECT_THROW(validate_coaction(d, kEps), Error);
}

TEST(Views, CommutativeAlgebraCoactionsAreAnticoactions) {
  for (const auto& g : {cyclic_group(3), symmetric_group(3)}) {
    auto f = function_algebra(g);
    for (const auto& beta : {comultiplication_coaction(f), kappa_delta(f)}) {
      Def31Views v = def31_views(beta, kEps);
      EXPECT_TRUE(v.agree);
      EXPECT_TRUE(v.anticoaction) << v.report.failures();
      EXPECT_TRUE(validate_as(beta, CoactionKind::Coaction, kEps).pass());
    }
  }
}

TEST(Views, KappaDeltaOnGroupAlgebraIsOnlyAnticoaction) {
  auto c = group_algebra(symmetric_group(3));
  CoactionMap kd = kappa_delta(c);
  Def31Views v = def31_views(kd, kEps);
  EXPECT_TRUE(v.agree);
  EXPECT_TRUE(v.anticoaction);
  EXPECT_TRUE(v.report.pass()) << v.report.failures();
  EXPECT_FALSE(validate_as(kd, CoactionKind::Coaction, kEps).pass());
  Def31Views d = def31_views(comultiplication_coaction(c), kEps);
  EXPECT_TRUE(d.agree);
  EXPECT_FALSE(d.anticoaction);
}

TEST(Views, TranspositionFixesCommutativeMaps) {
  for (const auto& b : {commutative_algebra(2), matrix_algebra(2), multimatrix({1, 2})})
    EXPECT_LT(transposition_residual(*b, transposition(*b)), kEps);
  auto f = function_algebra(cyclic_group(2));
  for (const auto& beta : {comultiplication_coaction(f), trivial_coaction(f, commutative_algebra(2))})
    EXPECT_LT(max_abs(Mat(t_twist(beta).map - beta.map)), kEps);
}

TEST(Averaging, TrivialIsIdentity) {
  auto k = group_algebra(cyclic_group(3));
  auto b = multimatrix({1, 2});
  FixedPointAlgebra fp = averaging(trivial_coaction(k, b), kEps);
  EXPECT_LT(max_abs(Mat(fp.projection - Mat::Identity(b->dim(), b->dim()))), kEps);
  EXPECT_EQ(fp.dim(), b->dim());
  EXPECT_TRUE(fp.is_algebra);
}

TEST(Averaging, ComultiplicationGivesScalars) {
  for (const auto& g : {cyclic_group(2), symmetric_group(3), quaternion_group()})
    for (const auto& k : {function_algebra(g), group_algebra(g)}) {
      FixedPointAlgebra fp = averaging(comultiplication_coaction(k), kEps);
      EXPECT_EQ(fp.dim(), 1);
      EXPECT_TRUE(fp.contains_unit);
      EXPECT_EQ(fixed_subspace(comultiplication_coaction(k), kEps).cols(), 1);
    }
}

TEST(Averaging, DualCoactionFixesQ) {
  for (Index n : {2, 3}) {
    CrossedProduct cp = translation_crossed(n);
    FixedPointAlgebra fp = averaging(cp.dual, kEps);
    EXPECT_EQ(fp.dim(), n);
    EXPECT_TRUE(fp.is_algebra);
    EXPECT_TRUE(oracle::same_span(fp.basis, cp.q_embedding, 1e-8));
    EXPECT_TRUE(oracle::same_span(fixed_subspace(cp.dual, kEps), cp.q_embedding, 1e-8));
  }
}

TEST(Averaging, ConditionalExpectationProperties) {
  Rng rng(2024);
  for (const auto& c : corpus()) {
    ASSERT_TRUE(validate_coaction(c, kEps).pass()) << c.name;
    const FiniteStarAlgebra& b = *c.target;
    Mat e = averaging_map(c);
    double idem = max_abs(Mat(e * e - e)), tr = 0.0, st = 0.0;
    for (int s = 0; s < 100; ++s) {
      Vec x = random_vector(b.dim(), rng);
      tr = std::max(tr, std::abs(b.trace(e * x) - b.trace(x)));
      st = std::max(st, max_abs(Vec(e * b.star(x) - b.star(e * x))));
    }
    EXPECT_LT(idem, kEps) << c.name;
    EXPECT_LT(tr, kEps) << c.name;
    EXPECT_LT(st, kEps) << c.name;
  }
}

TEST(TwistedTensor, TrivialPairIsIdentity) {
  auto k = group_algebra(cyclic_group(2));
  auto b = commutative_algebra(2), p = matrix_algebra(2);
  CoactionMap m = beta_tensor_pi(trivial_coaction(k, b, CoactionKind::Anticoaction), trivial_coaction(k, p));
  EXPECT_EQ(m.kind, CoactionKind::None);
  EXPECT_LT(max_abs(Mat(m.map - kron(Mat::Identity(8, 8), Mat(k->alg->unit())))), kEps);
}

TEST(TwistedTensor, KappaDeltaExpansionOnFunctionAlgebra) {
  // δ_a ⊗ δ_b -> Σ_z δ_{za} ⊗ δ_{bz⁻¹} ⊗ δ_z.
  for (const auto& g : {cyclic_group(2), symmetric_group(3)}) {
    auto f = function_algebra(g);
    const Index n = g.order();
    CoactionMap m = beta_tensor_pi(kappa_delta(f), comultiplication_coaction(f));
    Mat want = Mat::Zero(n * n * n, n * n);
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index z = 0; z < n; ++z) want((g.mul(z, a) * n + g.mul(b, g.inv(z))) * n + z, a * n + b) = 1.0;
    EXPECT_LT(max_abs(Mat(m.map - want)), kEps);
    EXPECT_LT(coassociativity_residual(m), kEps);
  }
}

TEST(TwistedTensor, TraceEquivariance) {
  Rng rng(7);
  auto g = symmetric_group(3);
  auto c = group_algebra(g);
  CrossedProduct cp = crossed_product(permutation_action(g, oracle::s3_sign_points(g)), c);
  std::vector<std::pair<CoactionMap, CoactionMap>> pairs = {
      {kappa_delta(c), comultiplication_coaction(c)},
      {t_iota_v(diag_likes(c, {0, 1}), kEps), cp.dual},
      {t_twist(cp.dual, CoactionKind::Anticoaction), comultiplication_coaction(c)}};
  for (const auto& [beta, pi] : pairs) {
    CoactionMap m = beta_tensor_pi(beta, pi);
    const FiniteStarAlgebra& amb = *m.target;
    for (int s = 0; s < 100; ++s) {
      Vec x = random_vector(amb.dim(), rng);
      Mat y = as_matrix(Vec(m.map * x), amb.dim(), c->dim());
      Vec slice = (amb.trace_vector().transpose() * y).transpose();
      EXPECT_LT(max_abs(Vec(slice - amb.trace(x) * c->alg->unit())), kEps);
    }
  }
}

TEST(TwistedTensor, KindMismatch) {
  auto c = group_algebra(cyclic_group(2));
  CoactionMap d = comultiplication_coaction(c);
  expect_kind([&] { beta_tensor_pi(d, d); }, ErrorKind::KindMismatch);
  expect_kind([&] { beta_tensor_pi(kappa_delta(c), kappa_delta(c)); }, ErrorKind::KindMismatch);
  expect_kind([&] { fixed_point_tensor(d, d); }, ErrorKind::KindMismatch);
  expect_kind([&] { beta_tensor_pi(kappa_delta(c), comultiplication_coaction(function_algebra(cyclic_group(2)))); },
              ErrorKind::MixedAlgebras);
}

TEST(FixedPointTensor, IsUnitalStarSubalgebra) {
  auto g = symmetric_group(3);
  for (const auto& k : {function_algebra(g), group_algebra(g)}) {
    CoactionMap d = comultiplication_coaction(k);
    for (const auto& beta : {kappa_delta(k), t_iota_v(decompose_regular(k, kEps).back(), kEps)}) {
      FixedPointTensor t = fixed_point_tensor(beta, d, kEps);
      EXPECT_TRUE(t.fixed.is_algebra);
      EXPECT_TRUE(t.fixed.contains_unit);
      EXPECT_LT(t.fixed.closure_residual, kEps);
      EXPECT_LT(t.fixed.idempotence_residual, kEps);
      EXPECT_LT(t.left_regular_residual, kEps);
    }
  }
}

TEST(FixedPointTensor, KappaDeltaGivesFlippedComultiplication) {
  for (const auto& g : {cyclic_group(2), symmetric_group(3)}) {
    auto f = function_algebra(g);
    FixedPointTensor t = fixed_point_tensor(kappa_delta(f), comultiplication_coaction(f), kEps);
    Mat sigma_delta = oracle::flip(f->dim()) * f->comult;
    EXPECT_EQ(t.fixed.dim(), f->dim());
    EXPECT_TRUE(oracle::same_span(t.fixed.basis, sigma_delta, 1e-8));
  }
}

TEST(FixedPointTensor, LeftRegularIdentityNeedsMatchingCorep) {
  Rng rng(5);
  auto f = function_algebra(symmetric_group(3));
  CoactionMap beta = kappa_delta(f), pi = comultiplication_coaction(f);
  Mat e = beta_tensor_pi_expectation(beta, pi);
  Mat lam = kron(left_regular_map(*beta.target), Mat::Identity(pi.dim(), pi.dim()));
  Corepresentation u = corep_of_coaction(beta, kEps);
  EXPECT_LT(max_abs(Mat(pi_u_expectation(u, pi) * lam - lam * e)), kEps);
  Mat z(u.size, u.size);
  for (Index c = 0; c < u.size; ++c) z.col(c) = random_vector(u.size, rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Corepresentation moved = restrict_corep(u, qr.householderQ() * Mat::Identity(u.size, u.size));
  EXPECT_GT(max_abs(Mat(pi_u_expectation(moved, pi) * lam - lam * e)), 1e-3);
  Corepresentation other = corep_of_coaction(pi, kEps);
  EXPECT_GT(max_abs(Mat(pi_u_expectation(other, pi) * lam - lam * e)), 1e-3);
}

TEST(TIotaV, GroupLikeFormula) {
  auto g = symmetric_group(3);
  auto c = group_algebra(g);
  const std::vector<Index> gens = {0, 1, 4};
  CoactionMap m = t_iota_v(diag_likes(c, gens), kEps);
  EXPECT_EQ(m.kind, CoactionKind::Anticoaction);
  EXPECT_TRUE(validate_coaction(m, kEps).pass());
  const Index n = 3;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Vec want = kron(unit_vector(n * n, i * n + j), unit_vector(6, g.mul(gens[j], g.inv(gens[i]))));
      EXPECT_LT(max_abs(Vec(m.map.col(i * n + j) - want)), kEps);
    }
}

TEST(TIotaV, TrivialAndRegular) {
  auto f = function_algebra(symmetric_group(3));
  CoactionMap one = t_iota_v(trivial_corep(f), kEps);
  EXPECT_LT(max_abs(Mat(one.map - trivial_coaction(f, matrix_algebra(1)).map)), kEps);
  Report r = validate_coaction(t_iota_v(regular_corep(f, kEps), kEps), kEps);
  EXPECT_TRUE(r.pass()) << r.failures();
}

TEST(TIotaV, RejectsNonUnitary) {
  auto c = group_algebra(cyclic_group(2));
  Corepresentation u = trivial_corep(c);
  u.set(0, 0, 3.0 * c->alg->unit());
  expect_kind([&] { t_iota_v(u, kEps); }, ErrorKind::NotUnitary);
}

TEST(Centers, ErgodicityAndShadow) {
  auto c = group_algebra(symmetric_group(3));
  ErgodicityCheck e = ergodicity(t_iota_v(diag_likes(c, {0, 1}), kEps), kEps);
  EXPECT_TRUE(e.ergodic);
  EXPECT_EQ(e.dimension, 1);
  ErgodicityCheck n = ergodicity(trivial_coaction(c, commutative_algebra(2), CoactionKind::Anticoaction), kEps);
  EXPECT_FALSE(n.ergodic);
  EXPECT_EQ(n.dimension, 2);
  ASSERT_EQ(n.witness.size(), 2);
  EXPECT_GT(std::abs(n.witness(0) - n.witness(1)), 1e-6);
  EXPECT_EQ(fixed_center(comultiplication_coaction(c), kEps).cols(), 1);
  CoactionMap beta = trivial_coaction(c, commutative_algebra(2), CoactionKind::Anticoaction);
  CoactionMap pi = comultiplication_coaction(c);
  FixedPointTensor t = fixed_point_tensor(beta, pi, kEps);
  CenterShadow s = center_shadow(beta, pi, t.fixed, kEps);
  EXPECT_TRUE(s.holds);
  EXPECT_EQ(s.fixed_center_dim, 2);
}

TEST(Spectral, Z2SignByHand) {
  auto f = function_algebra(cyclic_group(2));
  Vec sign(2);
  sign << 1.0, -1.0;
  SpectralDecomposition sd =
      spectral(comultiplication_coaction(f), {trivial_corep(f), diagonal_corep(f, {sign}, "sign")}, kEps);
  Vec want(2);
  want << 0.5, -0.5;
  EXPECT_LT(max_abs(Vec(sd.components[1].projection * unit_vector(2, 0) - want)), kEps);
  EXPECT_LT(max_abs(Mat(sd.components[0].projection - averaging_map(comultiplication_coaction(f)))), kEps);
  EXPECT_TRUE(sd.complete);
}

TEST(Spectral, Z3CharactersAreComplete) {
  auto f = function_algebra(cyclic_group(3));
  std::vector<Corepresentation> irr;
  for (Index k = 0; k < 3; ++k) irr.push_back(diagonal_corep(f, {oracle::cyclic_character(3, k)}, "chi"));
  SpectralDecomposition sd = spectral(comultiplication_coaction(f), irr, kEps);
  EXPECT_TRUE(sd.complete);
  EXPECT_LT(sd.idempotence_residual, kEps);
  EXPECT_LT(sd.orthogonality_residual, kEps);
  EXPECT_LT(sd.self_adjointness_residual, kEps);
  SpectralDecomposition partial = spectral(comultiplication_coaction(f), {irr[0], irr[1]}, kEps);
  EXPECT_FALSE(partial.complete);
  EXPECT_GT(partial.mass_defect, 0.1);
  expect_kind([&] { spectral(comultiplication_coaction(f), {}, kEps); }, ErrorKind::MissingIrreducibles);
}

TEST(Spectral, ProjectionsActAsIdentityAndKillTraces) {
  auto g = symmetric_group(3);
  for (const auto& k : {function_algebra(g), group_algebra(g)}) {
    auto irr = decompose_regular(k, kEps);
    std::vector<CoactionMap> pis = {comultiplication_coaction(k)};
    if (k->name == "group_algebra")
      pis.push_back(crossed_product(permutation_action(g, oracle::s3_sign_points(g)), k).dual);
    for (const auto& pi : pis) {
      SpectralDecomposition sd = spectral(pi, irr, kEps);
      EXPECT_TRUE(sd.complete) << k->name << " mass " << sd.mass_defect;
      for (const auto& c : sd.components) {
        EXPECT_LT(max_abs(Mat(c.projection * c.basis - c.basis)), kEps);
        const bool trivial = c.irrep.size == 1 && max_abs(Vec(c.irrep.entry(0, 0) - k->alg->unit())) < kEps;
        if (!trivial) EXPECT_LT(max_abs(Mat(pi.target->trace_vector().transpose() * c.projection)), kEps);
      }
      if (pi.name == "delta")
        for (const auto& c : sd.components) EXPECT_EQ(c.dim, c.irrep.size * c.irrep.size);
    }
  }
}

TEST(Eigenmatrix, NoSolutionOnScalars) {
  auto f = function_algebra(cyclic_group(2));
  Vec sign(2);
  sign << 1.0, -1.0;
  EigenmatrixResult r = eigenmatrix(trivial_coaction(f, matrix_algebra(1)), diagonal_corep(f, {sign}, "sign"));
  EXPECT_EQ(r.status, EigenmatrixStatus::None);
  EXPECT_EQ(r.solution_dim, 0);
  EXPECT_STREQ(to_string(r.status), "none");
}

TEST(Eigenmatrix, ComultiplicationWithoutHint) {
  auto g = symmetric_group(3);
  for (const auto& k : {function_algebra(g), group_algebra(g)})
    for (const auto& u : decompose_regular(k, kEps)) {
      EigenmatrixResult r = eigenmatrix(comultiplication_coaction(k), u, nullptr, kEps, 1);
      EXPECT_EQ(r.status, EigenmatrixStatus::Unitary) << k->name << " " << u.size << " " << r.method;
      EXPECT_LT(r.equation_residual, kEps);
      EXPECT_LT(r.unitarity_residual, kEps);
    }
}

TEST(Eigenmatrix, DualCoactionWithCanonicalImage) {
  CrossedProduct cp = translation_crossed(2);
  Corepresentation v = diag_likes(cp.kac, {0, 1});
  EigenmatrixResult r = eigenmatrix(cp.dual, v, &cp.group_embedding, kEps);
  EXPECT_EQ(r.status, EigenmatrixStatus::Unitary);
  EXPECT_EQ(r.method, "equivariant copy");
  EXPECT_LT(max_abs(Vec(r.m - apply_right(cp.group_embedding, v.data, 4))), kEps);
  EigenmatrixResult unhinted = eigenmatrix(cp.dual, v, nullptr, kEps);
  EXPECT_EQ(unhinted.status, EigenmatrixStatus::Unitary) << unhinted.method;
}
