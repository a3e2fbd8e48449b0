#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kacsub;

namespace {

constexpr double kEps = 1e-9;

std::vector<FiniteGroupTable> small_groups() {
  std::vector<FiniteGroupTable> gs;
  for (Index n = 1; n <= 8; ++n) gs.push_back(cyclic_group(n));
  gs.push_back(symmetric_group(3));
  gs.push_back(dihedral_group(4));
  gs.push_back(quaternion_group());
  gs.push_back(direct_product(cyclic_group(2), cyclic_group(2)));
  gs.push_back(direct_product(cyclic_group(2), cyclic_group(4)));
  return gs;
}

// f(xy) - f(x)f(y) over basis pairs, for a linear map f: a -> b.
double homomorphism_residual(const FiniteStarAlgebra& a, const FiniteStarAlgebra& b, const Mat& f) {
  double w = 0.0;
  for (Index i = 0; i < a.dim(); ++i)
    for (Index j = 0; j < a.dim(); ++j)
      w = std::max(w, max_abs(Vec(f * a.multiply(a.basis(i), a.basis(j)) - b.multiply(f.col(i), f.col(j)))));
  return w;
}

}  // namespace

TEST(Groups, TablesAreGroups) {
  for (const auto& g : small_groups()) {
    const Index n = g.order();
    for (Index a = 0; a < n; ++a) {
      EXPECT_EQ(g.mul(a, g.inv(a)), g.identity());
      EXPECT_EQ(g.mul(g.identity(), a), a);
      for (Index b = 0; b < n; ++b)
        for (Index c = 0; c < n; ++c) EXPECT_EQ(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
    }
  }
}

TEST(Groups, Orders) {
  EXPECT_EQ(symmetric_group(3).order(), 6);
  EXPECT_EQ(symmetric_group(4).order(), 24);
  EXPECT_EQ(dihedral_group(4).order(), 8);
  EXPECT_EQ(quaternion_group().order(), 8);
  EXPECT_FALSE(symmetric_group(3).is_abelian());
  EXPECT_TRUE(cyclic_group(5).is_abelian());
  EXPECT_FALSE(quaternion_group().is_abelian());
  EXPECT_EQ(oracle::class_count(quaternion_group()), 5);
}

TEST(Groups, GeneratorsAndInvalidTables) {
  auto g = group_from_generators({{1, 2, 0}});
  EXPECT_EQ(g.order(), 3);
  EXPECT_TRUE(g.is_abelian());
  using Table = std::vector<std::vector<Index>>;
  EXPECT_THROW(FiniteGroupTable(Table{{0, 1}, {0, 1}}), Error);
  EXPECT_THROW(FiniteGroupTable(Table{{0, 1}, {1, 1}}), Error);
  EXPECT_THROW(cyclic_group(0), Error);
}

TEST(Kac, SmallGroupsValidate) {
  for (const auto& g : small_groups()) {
    Report f = validate_kac(*function_algebra(g), kEps);
    Report c = validate_kac(*group_algebra(g), kEps);
    EXPECT_TRUE(f.pass()) << f.failures();
    EXPECT_TRUE(c.pass()) << c.failures();
  }
}

TEST(Kac, FunctionAlgebraStructure) {
  for (const auto& g : small_groups()) {
    auto f = function_algebra(g);
    EXPECT_TRUE(f->alg->is_commutative(kEps));
    EXPECT_EQ(cocommutativity_residual(*f) < kEps, g.is_abelian());
  }
  auto s3 = function_algebra(symmetric_group(3));
  EXPECT_EQ(s3->dim(), 6);
  EXPECT_GT(cocommutativity_residual(*s3), kEps);
  for (Index x = 0; x < 6; ++x) EXPECT_NEAR(s3->h(unit_vector(6, x)).real(), 1.0 / 6.0, 1e-15);
}

TEST(Kac, GroupAlgebraStructure) {
  for (const auto& g : small_groups()) {
    auto c = group_algebra(g);
    EXPECT_LT(cocommutativity_residual(*c), kEps);
    EXPECT_EQ(c->alg->is_commutative(kEps), g.is_abelian());
    for (Index x = 0; x < g.order(); ++x) {
      Vec u = unit_vector(g.order(), x);
      EXPECT_LT(max_abs(Vec(c->alg->multiply(u, c->alg->star(u)) - c->alg->unit())), kEps);
    }
  }
  EXPECT_GT(group_algebra(symmetric_group(3))->alg->commutativity_residual(), kEps);
}

TEST(Kac, HaarInvariance) {
  for (const auto& g : small_groups())
    for (const auto& k : {function_algebra(g), group_algebra(g)})
      for (Index i = 0; i < k->dim(); ++i) {
        Vec a = unit_vector(k->dim(), i);
        Vec d = k->delta(a);
        Vec left = Vec::Zero(k->dim()), right = Vec::Zero(k->dim());
        for (Index x = 0; x < k->dim(); ++x)
          for (Index y = 0; y < k->dim(); ++y) {
            right(x) += d(x * k->dim() + y) * k->haar(y);
            left(y) += k->haar(x) * d(x * k->dim() + y);
          }
        EXPECT_LT(max_abs(Vec(left - k->h(a) * k->alg->unit())), kEps);
        EXPECT_LT(max_abs(Vec(right - k->h(a) * k->alg->unit())), kEps);
      }
}

TEST(Kac, BrokenAntipodeIsRejected) {
  auto k = std::make_shared<KacAlgebra>(*group_algebra(symmetric_group(3)));
  k->antipode.setZero();
  Report r = validate_kac(*k, kEps);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.passed("antipode left"));
  EXPECT_FALSE(r.passed("antipode involutive"));
  EXPECT_TRUE(r.passed("coassociative"));
}

TEST(Kac, ShapeMismatchThrows) {
  auto k = std::make_shared<KacAlgebra>(*group_algebra(cyclic_group(2)));
  k->counit = Vec::Ones(3);
  EXPECT_THROW(validate_kac(*k), Error);
}

TEST(Kac, AntipodeIsHomomorphismOnlyWhenCommutative) {
  auto g = symmetric_group(3);
  auto f = function_algebra(g), c = group_algebra(g);
  EXPECT_LT(homomorphism_residual(*f->alg, *f->alg, f->antipode), kEps);
  EXPECT_GT(homomorphism_residual(*c->alg, *c->alg, c->antipode), kEps);
}

TEST(Kac, FourierTransformZ2) {
  auto g = cyclic_group(2);
  auto c = group_algebra(g), f = function_algebra(g);
  Mat ft(2, 2);  // u_e -> δ_e + δ_g, u_g -> δ_e - δ_g
  ft << 1.0, 1.0, 1.0, -1.0;
  EXPECT_LT(homomorphism_residual(*c->alg, *f->alg, ft), kEps);
  EXPECT_LT(max_abs(Vec(ft * c->alg->unit() - f->alg->unit())), kEps);
  EXPECT_LT(max_abs(Mat(kron(ft, ft) * c->comult - f->comult * ft)), kEps);
  EXPECT_LT(max_abs(Mat(f->haar.transpose() * ft - c->haar.transpose())), kEps);
  EXPECT_LT(max_abs(Mat(ft * c->antipode - f->antipode * ft)), kEps);
}

TEST(Kac, OppositeComultiplicationIsKac) {
  auto k = opposite_comultiplication(function_algebra(symmetric_group(3)));
  EXPECT_TRUE(validate_kac(*k, kEps).pass());
}

TEST(Kac, DimensionCap) {
  auto k = group_algebra(cyclic_group(4));
  EXPECT_THROW(make_kac(k->alg, k->comult, k->counit, k->antipode, k->haar, "capped", 3), Error);
  EXPECT_NO_THROW(make_kac(k->alg, k->comult, k->counit, k->antipode, k->haar, "ok", 4));
}

TEST(CrossedProduct, TrivialGroup) {
  auto q = commutative_algebra(2);
  CrossedProduct cp = crossed_product(trivial_action(cyclic_group(1), q));
  EXPECT_EQ(cp.algebra->dim(), 2);
  EXPECT_LT(max_abs(Mat(cp.dual.map - kron(Mat::Identity(2, 2), Mat(cp.kac->alg->unit())))), kEps);
}

TEST(CrossedProduct, OverScalarsIsGroupAlgebra) {
  auto g = cyclic_group(2);
  auto a = group_algebra(g);
  CrossedProduct cp = crossed_product(trivial_action(g, matrix_algebra(1)), a);
  ASSERT_EQ(cp.algebra->dim(), 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      EXPECT_LT(max_abs(Vec(cp.algebra->multiply(unit_vector(2, i), unit_vector(2, j)) -
                            a->alg->multiply(unit_vector(2, i), unit_vector(2, j)))),
                kEps);
  EXPECT_LT(max_abs(Mat(cp.dual.map - a->comult)), kEps);
}

TEST(CrossedProduct, FlipActionOnC2) {
  auto g = cyclic_group(2);
  CrossedProduct cp = crossed_product(permutation_action(g, oracle::left_translation_points(g)));
  EXPECT_EQ(cp.algebra->dim(), 4);
  EXPECT_TRUE(cp.algebra->validate(kEps).pass());
  EXPECT_EQ(wedderburn(*cp.algebra, kEps).block_sizes, std::vector<Index>({2}));
  EXPECT_TRUE(validate_coaction(cp.dual, kEps).pass()) << validate_coaction(cp.dual, kEps).failures();
  FixedPointAlgebra fp = averaging(cp.dual, kEps);
  EXPECT_EQ(fp.dim(), 2);
  EXPECT_TRUE(oracle::same_span(fp.basis, cp.q_embedding, 1e-6));
}

TEST(CrossedProduct, S3SignActionAndEquivariantCopy) {
  auto g = symmetric_group(3);
  auto a = group_algebra(g);
  CrossedProduct cp = crossed_product(permutation_action(g, oracle::s3_sign_points(g)), a);
  EXPECT_EQ(cp.algebra->dim(), 12);
  EXPECT_TRUE(validate_coaction(cp.dual, kEps).pass());
  // π∘j = (j⊗id)∘δ for the canonical copy of C[Γ].
  Mat lhs = cp.dual.map * cp.group_embedding;
  Mat rhs = compose_left(cp.group_embedding, a->comult, a->dim());
  EXPECT_LT(max_abs(Mat(lhs - rhs)), kEps);
  EXPECT_TRUE(SubalgebraEmbedding({a->alg, cp.algebra, cp.group_embedding}).validate(kEps).pass());
}

TEST(CrossedProduct, RejectsBadAction) {
  auto g = cyclic_group(2);
  GroupAction act = permutation_action(g, oracle::left_translation_points(g));
  act.automorphisms[1] = 2.0 * Mat::Identity(2, 2);
  EXPECT_THROW(crossed_product(act), Error);
}
