#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kacsub;

namespace {

constexpr double kEps = 1e-9;

std::vector<Index> sorted(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

Mat mu_mu_star(const FiniteStarAlgebra& a) {
  Mat mu = multiplication_matrix_on(a);
  return mu * mu.adjoint();
}

SubalgebraEmbedding diagonal_in_m2(std::vector<double> w = {}) {
  Mat j = Mat::Zero(4, 2);
  j(0, 0) = j(3, 1) = 1.0;
  return {commutative_algebra(2, std::move(w)), matrix_algebra(2), j};
}

std::vector<AlgebraPtr> test_algebras() {
  return {matrix_algebra(1),
          matrix_algebra(2),
          matrix_algebra(3),
          commutative_algebra(3),
          multimatrix({1, 2}),
          multimatrix({1, 2}, {0.5, 0.5}),
          multimatrix({2, 3}),
          multimatrix({1, 1, 2}, {0.2, 0.3, 0.5}),
          group_algebra(symmetric_group(3))->alg,
          tensor_product(matrix_algebra(2), commutative_algebra(2))};
}

}  // namespace

TEST(Algebra, ConstructorsPassValidation) {
  for (const auto& a : test_algebras()) EXPECT_TRUE(a->validate(kEps).pass()) << a->validate(kEps).failures();
}

TEST(Algebra, RejectsNonFaithfulTrace) {
  EXPECT_THROW(commutative_algebra(2, {1.0, 0.0}), Error);
  auto a = matrix_algebra(2);
  try {
    FiniteStarAlgebra bad(a->labels(), a->mult_terms(), a->unit(), a->star_matrix(), Vec::Zero(4));
    FAIL() << "zero trace accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSemisimple);
  }
}

TEST(Algebra, RejectsBrokenStructureConstants) {
  auto a = matrix_algebra(2);
  auto mult = a->mult_terms();
  mult.push_back({1, 1, 0, 1.0});  // e12 e12 = e11 breaks associativity
  EXPECT_THROW(FiniteStarAlgebra(a->labels(), mult, a->unit(), a->star_matrix(), a->trace_vector()), Error);
}

TEST(Algebra, GramMatricesArePositiveDefinite) {
  for (const auto& a : test_algebras()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a->gram());
    EXPECT_GT(es.eigenvalues()(0), kEps);
  }
}

TEST(Algebra, OrthonormalBasisIsOrthonormal) {
  for (const auto& a : test_algebras()) {
    const Mat& w = a->orthonormal_basis();
    EXPECT_LT(max_abs(Mat(w.adjoint() * a->gram() * w - Mat::Identity(a->dim(), a->dim()))), kEps);
    EXPECT_LT(max_abs(Mat(a->orthonormal_inverse() * w - Mat::Identity(a->dim(), a->dim()))), kEps);
  }
}

TEST(Algebra, TensorAndOpposite) {
  auto t = tensor_product(matrix_algebra(2), commutative_algebra(3));
  EXPECT_EQ(t->dim(), 12);
  EXPECT_TRUE(t->validate(kEps).pass());
  auto a = matrix_algebra(2);
  auto o = opposite(a);
  Vec x = unit_vector(4, 1), y = unit_vector(4, 2);  // e12, e21
  EXPECT_LT(max_abs(Vec(o->multiply(x, y) - a->multiply(y, x))), kEps);
}

TEST(Algebra, FromMatricesDiagonal) {
  Mat d1 = Mat::Zero(2, 2), d2 = Mat::Zero(2, 2);
  d1(0, 0) = 1.0;
  d2(1, 1) = 1.0;
  auto a = from_matrices({d1, d2});
  EXPECT_EQ(a->dim(), 2);
  EXPECT_TRUE(a->validate(kEps).pass());
  EXPECT_NEAR(a->trace(a->basis(0)).real(), 0.5, kEps);
  Mat off = Mat::Zero(2, 2);
  off(0, 1) = 1.0;
  EXPECT_THROW(from_matrices({d1, off}), Error);
}

TEST(Wedderburn, SimpleAlgebra) {
  BlockStructure bs = wedderburn(*matrix_algebra(2));
  EXPECT_EQ(bs.block_sizes, std::vector<Index>({2}));
  ASSERT_EQ(bs.weights.size(), 1u);
  EXPECT_NEAR(bs.weights[0], 1.0, kEps);
}

TEST(Wedderburn, CommutativeAlgebra) {
  BlockStructure bs = wedderburn(*commutative_algebra(3));
  EXPECT_EQ(bs.block_sizes, std::vector<Index>({1, 1, 1}));
}

TEST(Wedderburn, GroupAlgebrasMatchCharacterTheory) {
  for (const auto& g : {symmetric_group(3), dihedral_group(4), quaternion_group(), cyclic_group(4)}) {
    auto k = group_algebra(g);
    BlockStructure bs = wedderburn(*k->alg, kEps);
    const std::vector<Index> want = oracle::irrep_degrees(g);
    ASSERT_FALSE(want.empty());
    EXPECT_EQ(sorted(bs.block_sizes), want);
    EXPECT_LT(matrix_unit_residual(*k->alg, bs), 1e-8);
    // The Haar trace weights each block by d²/|G|.
    for (std::size_t b = 0; b < bs.block_sizes.size(); ++b)
      EXPECT_NEAR(bs.weights[b], static_cast<double>(bs.block_sizes[b] * bs.block_sizes[b]) / g.order(), 1e-9);
  }
  EXPECT_EQ(oracle::irrep_degrees(symmetric_group(3)), std::vector<Index>({1, 1, 2}));
}

TEST(Wedderburn, CentralProjectionsPartitionUnity) {
  for (const auto& a : test_algebras()) {
    BlockStructure bs = wedderburn(*a, kEps);
    Vec sum = Vec::Zero(a->dim());
    double wsum = 0.0;
    for (std::size_t g = 0; g < bs.central_projections.size(); ++g) {
      const Vec& p = bs.central_projections[g];
      sum += p;
      wsum += bs.weights[g];
      EXPECT_NEAR(a->trace(p).real(), bs.weights[g], kEps);
      EXPECT_LT(max_abs(Vec(a->multiply(p, p) - p)), 1e-8);
      EXPECT_LT(max_abs(Vec(a->star(p) - p)), 1e-8);
      EXPECT_LT(max_abs(Mat(a->left_mult(p) - a->right_mult(p))), 1e-8);
      for (std::size_t h = 0; h < g; ++h)
        EXPECT_LT(max_abs(Vec(a->multiply(p, bs.central_projections[h]))), 1e-8);
    }
    EXPECT_LT(max_abs(Vec(sum - a->unit())), 1e-8);
    EXPECT_NEAR(wsum, 1.0, kEps);
    EXPECT_LT(matrix_unit_residual(*a, bs), 1e-8);
  }
}

TEST(CanonicalTrace, Examples) {
  EXPECT_EQ(canonical_trace({2}), std::vector<double>({1.0}));
  auto w = canonical_trace({1, 2});
  EXPECT_NEAR(w[0], 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(w[1], 4.0 / 5.0, 1e-15);
  w = canonical_trace({2, 3});
  EXPECT_NEAR(w[0], 4.0 / 13.0, 1e-15);
  EXPECT_NEAR(w[1], 9.0 / 13.0, 1e-15);
  EXPECT_THROW(canonical_trace({}), Error);
  EXPECT_THROW(canonical_trace({0, 1}), Error);
}

TEST(CanonicalTrace, MuMuStarIsDimensionTimesIdentity) {
  for (const auto& blocks : std::vector<std::vector<Index>>{{1, 2}, {2, 3}, {1, 1, 2}}) {
    auto a = multimatrix(blocks, canonical_trace(blocks));
    Mat m = mu_mu_star(*a);
    EXPECT_LT(max_abs(Mat(m - static_cast<double>(a->dim()) * Mat::Identity(a->dim(), a->dim()))), 1e-9);
  }
}

TEST(Xi, Examples) {
  XiResult half = xi_element(*commutative_algebra(2, {0.5, 0.5}));
  EXPECT_TRUE(half.is_scalar);
  EXPECT_NEAR(half.scalar.real(), 2.0, kEps);
  XiResult third = xi_element(*commutative_algebra(2, {1.0 / 3.0, 2.0 / 3.0}));
  EXPECT_FALSE(third.is_scalar);
  EXPECT_NEAR(third.element(0).real(), 3.0, kEps);
  EXPECT_NEAR(third.element(1).real(), 1.5, kEps);
  XiResult m2 = xi_element(*matrix_algebra(2));
  EXPECT_TRUE(m2.is_scalar);
  EXPECT_NEAR(m2.scalar.real(), 4.0, kEps);
}

TEST(Xi, BlockwiseFormula) {
  const std::vector<std::pair<std::vector<Index>, std::vector<double>>> cases = {
      {{1, 2}, {0.3, 0.7}}, {{2, 3}, {0.5, 0.5}}, {{1, 1, 2}, {0.1, 0.2, 0.7}}, {{3}, {1.0}}};
  for (const auto& [blocks, w] : cases) {
    XiResult xi = xi_element(*multimatrix(blocks, w));
    EXPECT_LT(max_abs(Vec(xi.element - oracle::xi_blockwise(blocks, w))), 1e-9);
  }
}

// μμ* x = n x on random elements exactly when the trace is canonical, and
// wedderburn + canonical_trace reproduce the weights exactly then.
TEST(Xi, CriterionBothDirections) {
  Rng rng(11);
  const std::vector<std::pair<std::vector<Index>, std::vector<double>>> cases = {
      {{1, 1}, {0.5, 0.5}},   {{1, 1}, {0.4, 0.6}},       {{1, 2}, {0.2, 0.8}}, {{1, 2}, {0.5, 0.5}},
      {{2, 3}, {4.0 / 13, 9.0 / 13}}, {{2, 3}, {0.3, 0.7}}, {{1, 1, 2}, {1.0 / 6, 1.0 / 6, 4.0 / 6}},
      {{1, 1, 2}, {0.25, 0.25, 0.5}}};
  for (const auto& [blocks, w] : cases) {
    auto a = multimatrix(blocks, w);
    const bool scalar = xi_element(*a, kEps).is_scalar;
    BlockStructure bs = wedderburn(*a, kEps);
    std::vector<double> canon = canonical_trace(bs.block_sizes);
    bool reproduces = true;
    for (std::size_t g = 0; g < canon.size(); ++g) reproduces &= std::abs(canon[g] - bs.weights[g]) < 1e-9;
    EXPECT_EQ(scalar, reproduces);
    Mat m = mu_mu_star(*a);
    const double n = static_cast<double>(a->dim());
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      Vec x = random_vector(a->dim(), rng);
      worst = std::max(worst, max_abs(Vec(m * x - n * x)) / std::max(1.0, max_abs(x)));
    }
    EXPECT_EQ(worst < kEps, scalar);
  }
}

TEST(ConditionalExpectation, OntoScalars) {
  auto b = multimatrix({1, 2});
  SubalgebraEmbedding emb{matrix_algebra(1), b, Mat(b->unit())};
  Mat e = conditional_expectation(emb);
  Mat want = b->unit() * b->trace_vector().transpose();
  EXPECT_LT(max_abs(Mat(e - want)), kEps);
}

TEST(ConditionalExpectation, Identity) {
  auto b = multimatrix({1, 2});
  EXPECT_LT(max_abs(Mat(conditional_expectation(identity_embedding(b)) - Mat::Identity(5, 5))), kEps);
}

TEST(ConditionalExpectation, DiagonalInM2) {
  Mat e = conditional_expectation(diagonal_in_m2());
  EXPECT_LT(max_abs(Vec(e * unit_vector(4, 1))), kEps);
  EXPECT_LT(max_abs(Vec(e * unit_vector(4, 0) - unit_vector(4, 0))), kEps);
  EXPECT_LT(max_abs(Vec(e * unit_vector(4, 2))), kEps);
}

TEST(ConditionalExpectation, RejectsIncompatibleTrace) {
  try {
    conditional_expectation(diagonal_in_m2({1.0 / 3.0, 2.0 / 3.0}));
    FAIL() << "incompatible trace accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompatibleTrace);
  }
}

TEST(ConditionalExpectation, Properties) {
  Rng rng(5);
  std::vector<SubalgebraEmbedding> embs = {diagonal_in_m2(), identity_embedding(multimatrix({1, 2}))};
  {
    auto big = matrix_algebra(3);
    Mat j = Mat::Zero(9, 5);
    // C ⊕ M_2 inside M_3 as block-diagonal matrices; trace weights 1/3, 2/3.
    j(0, 0) = 1.0;
    j(4, 1) = j(5, 2) = j(7, 3) = j(8, 4) = 1.0;
    embs.push_back({multimatrix({1, 2}, {1.0 / 3.0, 2.0 / 3.0}), big, j});
  }
  for (const auto& emb : embs) {
    ASSERT_TRUE(emb.validate(kEps).pass()) << emb.validate(kEps).failures();
    const FiniteStarAlgebra& b = *emb.big;
    Mat e = conditional_expectation(emb);
    EXPECT_LT(max_abs(Mat(e * e - e)), kEps);
    EXPECT_LT(max_abs(Mat(b.trace_vector().transpose() * e - b.trace_vector().transpose())), kEps);
    EXPECT_LT(max_abs(Mat(b.gram() * e - e.adjoint() * b.gram())), kEps);
    for (int s = 0; s < 100; ++s) {
      Vec x = random_vector(b.dim(), rng);
      Vec a1 = emb.embed * random_vector(emb.small->dim(), rng), a2 = emb.embed * random_vector(emb.small->dim(), rng);
      EXPECT_LE(b.norm(e * x), b.norm(x) + kEps);
      Vec lhs = e * b.multiply(b.multiply(a1, x), a2);
      Vec rhs = b.multiply(b.multiply(a1, e * x), a2);
      EXPECT_LT(max_abs(Vec(lhs - rhs)), 1e-8);
    }
  }
}

TEST(LeftRegular, UnitAndHomomorphism) {
  Rng rng(3);
  for (const auto& a : test_algebras()) {
    const Index n = a->dim();
    EXPECT_LT(max_abs(Mat(left_regular(*a, a->unit()) - Mat::Identity(n, n))), kEps);
    for (int s = 0; s < 10; ++s) {
      Vec x = random_vector(n, rng), y = random_vector(n, rng);
      EXPECT_LT(max_abs(Mat(left_regular(*a, x) * left_regular(*a, y) - left_regular(*a, a->multiply(x, y)))), 1e-9);
      EXPECT_LT(max_abs(Mat(left_regular(*a, a->star(x)) - left_regular(*a, x).adjoint())), 1e-9);
    }
  }
}

TEST(LeftRegular, MinimalIdempotentIsRankOneProjection) {
  auto a = commutative_algebra(2);
  Mat l = left_regular(*a, unit_vector(2, 0));
  Mat want = Mat::Zero(2, 2);
  want(0, 0) = 1.0;
  EXPECT_LT(max_abs(Mat(l - want)), kEps);
}

TEST(LeftRegular, MapShape) {
  auto a = multimatrix({1, 2});
  Mat l = left_regular_map(*a);
  EXPECT_EQ(l.rows(), 25);
  EXPECT_EQ(l.cols(), 5);
  EXPECT_EQ(numerical_rank(l, 1e-9), 5);
}
