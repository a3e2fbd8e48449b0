#pragma once

// Inclusions of multimatrix algebras: inclusion matrices, the Perron-Frobenius
// index, the integrality certificate, basic constructions and Jones towers,
// commuting squares, and extension of (anti)coactions up a tower.

#include "kacsub/coaction.hpp"

#include <numeric>
#include <sstream>

namespace kacsub {

using IMat = std::vector<std::vector<long long>>;

inline IMat transpose(const IMat& m) {
  if (m.empty()) return {};
  IMat t(m[0].size(), std::vector<long long>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
  return t;
}

/// Block structure of ⊕ M_{m_g} in its own matrix-unit basis.
inline BlockStructure multimatrix_blocks(const FiniteStarAlgebra& a, const std::vector<Index>& sizes) {
  BlockStructure bs;
  bs.block_sizes = sizes;
  bs.block_isomorphism = Mat::Identity(a.dim(), a.dim());
  const auto off = block_offsets(sizes);
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    Vec p = Vec::Zero(a.dim());
    for (Index i = 0; i < sizes[g]; ++i) p(off[g] + i * sizes[g] + i) = 1.0;
    bs.weights.push_back(a.trace(p).real());
    bs.central_projections.push_back(p);
  }
  return bs;
}

/// B₀ ⊂ B₁ by blocks. m_ij = multiplicity of block i of B₀ in block j of B₁,
/// so that Mᵗn = p.
struct InclusionData {
  std::optional<SubalgebraEmbedding> emb;
  IMat matrix;
  std::vector<long long> dims_small, dims_big;
  std::vector<double> weights_small, weights_big;  // empty when unspecified
  std::optional<BlockStructure> small_blocks, big_blocks;

  std::size_t rows() const { return matrix.size(); }
  std::size_t cols() const { return matrix.empty() ? 0 : matrix[0].size(); }
};

inline Report validate_inclusion(const InclusionData& d, double eps = kDefaultEps) {
  Report r;
  const std::size_t nr = d.rows(), nc = d.cols();
  if (d.dims_small.size() != nr || d.dims_big.size() != nc)
    throw Error(ErrorKind::DimensionMismatch, "inclusion matrix shape vs block lists");
  bool dims_ok = true, rows_ok = true, cols_ok = true, nonneg = true;
  for (std::size_t j = 0; j < nc; ++j) {
    long long s = 0, col = 0;
    for (std::size_t i = 0; i < nr; ++i) {
      s += d.matrix[i][j] * d.dims_small[i];
      col += d.matrix[i][j];
      if (d.matrix[i][j] < 0) nonneg = false;
    }
    if (s != d.dims_big[j]) dims_ok = false;
    if (col == 0) cols_ok = false;
  }
  for (std::size_t i = 0; i < nr; ++i)
    if (std::accumulate(d.matrix[i].begin(), d.matrix[i].end(), 0LL) == 0) rows_ok = false;
  r.add_flag("nonnegative entries", nonneg);
  r.add_flag("M^t n = p", dims_ok);
  r.add_flag("no zero row", rows_ok);
  r.add_flag("no zero column", cols_ok);
  if (!d.weights_small.empty() && !d.weights_big.empty()) {
    double w = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      double rhs = 0.0;
      for (std::size_t j = 0; j < nc; ++j)
        rhs += static_cast<double>(d.dims_small[i]) / static_cast<double>(d.dims_big[j]) *
               static_cast<double>(d.matrix[i][j]) * d.weights_big[j];
      w = std::max(w, std::abs(d.weights_small[i] - rhs));
    }
    r.add("trace compatible", w, eps);
  }
  return r;
}

/// Matrix-only inclusion data; p = Mᵗn.
inline InclusionData inclusion_from_matrix(const IMat& m, const std::vector<long long>& dims_small,
                                           std::vector<double> weights_small = {}, std::vector<double> weights_big = {}) {
  if (m.empty() || m[0].empty()) throw Error(ErrorKind::InvalidInput, "empty inclusion matrix");
  for (const auto& row : m)
    if (row.size() != m[0].size()) throw Error(ErrorKind::InvalidInput, "ragged inclusion matrix");
  if (dims_small.size() != m.size()) throw Error(ErrorKind::DimensionMismatch, "one dimension per row");
  InclusionData d;
  d.matrix = m;
  d.dims_small = dims_small;
  d.dims_big.assign(m[0].size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) d.dims_big[j] += m[i][j] * dims_small[i];
  d.weights_small = std::move(weights_small);
  d.weights_big = std::move(weights_big);
  return d;
}

/// Tracks minimal central projections through the embedding. Block
/// structures may be supplied to fix the block order.
inline InclusionData inclusion_data(const SubalgebraEmbedding& emb, double eps = kDefaultEps,
                                    const BlockStructure* small_bs = nullptr, const BlockStructure* big_bs = nullptr,
                                    bool check_trace = true) {
  BlockStructure s = small_bs ? *small_bs : wedderburn(*emb.small, eps);
  BlockStructure b = big_bs ? *big_bs : wedderburn(*emb.big, eps);
  const FiniteStarAlgebra& big = *emb.big;
  InclusionData d;
  d.emb = emb;
  for (Index m : s.block_sizes) d.dims_small.push_back(m);
  for (Index m : b.block_sizes) d.dims_big.push_back(m);
  d.weights_small = s.weights;
  d.weights_big = b.weights;
  d.matrix.assign(s.blocks(), std::vector<long long>(b.blocks(), 0));
  for (Index i = 0; i < s.blocks(); ++i) {
    Vec qi = emb.embed * s.central_projections[i];
    for (Index j = 0; j < b.blocks(); ++j) {
      const double minimal = b.weights[j] / static_cast<double>(b.block_sizes[j]);
      const double rank = big.trace(big.multiply(qi, b.central_projections[j])).real() / minimal;
      const double mult = rank / static_cast<double>(s.block_sizes[i]);
      const long long rounded = std::llround(mult);
      if (std::abs(mult - static_cast<double>(rounded)) > 1e-6)
        throw Error(ErrorKind::InvalidInput, "non-integral multiplicity in inclusion");
      d.matrix[i][j] = rounded;
    }
  }
  d.small_blocks = std::move(s);
  d.big_blocks = std::move(b);
  Report r = validate_inclusion(d, eps);
  if (!r.passed("M^t n = p")) throw Error(ErrorKind::InvalidInput, "inclusion dimensions inconsistent");
  if (check_trace && r.find("trace compatible") && !r.passed("trace compatible")) {
    for (std::size_t i = 0; i < d.rows(); ++i) {
      double rhs = 0.0;
      for (std::size_t j = 0; j < d.cols(); ++j)
        rhs += static_cast<double>(d.dims_small[i]) / static_cast<double>(d.dims_big[j]) *
               static_cast<double>(d.matrix[i][j]) * d.weights_big[j];
      if (std::abs(d.weights_small[i] - rhs) >= eps)
        throw Error(ErrorKind::TraceIncompatible, "trace compatibility fails at equation " + std::to_string(i));
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Index

struct MarkovIndex {
  double value = 0.0;
  bool irreducible = true;
  bool converged = false;
  long iterations = 0;
};

/// Largest eigenvalue of MMᵗ by power iteration from the ones vector.
inline MarkovIndex markov_index(const InclusionData& d, double tol = 1e-12, long max_iter = 100000) {
  const Index nr = static_cast<Index>(d.rows()), nc = static_cast<Index>(d.cols());
  RMat m(nr, nc);
  for (Index i = 0; i < nr; ++i)
    for (Index j = 0; j < nc; ++j) m(i, j) = static_cast<double>(d.matrix[i][j]);
  RMat mmt = m * m.transpose();
  MarkovIndex res;
  // Irreducibility: the graph of MMᵗ is connected.
  std::vector<bool> seen(static_cast<std::size_t>(nr), false);
  std::vector<Index> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    Index x = stack.back();
    stack.pop_back();
    for (Index y = 0; y < nr; ++y)
      if (!seen[y] && mmt(x, y) > 0) {
        seen[y] = true;
        stack.push_back(y);
      }
  }
  for (bool s : seen) res.irreducible = res.irreducible && s;
  RVec v = RVec::Ones(nr).normalized();
  double lambda = v.dot(mmt * v);
  for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
    RVec w = mmt * v;
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
    const double next = v.dot(mmt * v);
    const bool done = std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next));
    lambda = next;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.value = lambda;
  return res;
}

enum class IntegralityStatus { Integer, NotAlgebraicData, CertificateFailed };

inline const char* to_string(IntegralityStatus s) {
  switch (s) {
    case IntegralityStatus::Integer: return "integer";
    case IntegralityStatus::NotAlgebraicData: return "NotAlgebraicData";
    case IntegralityStatus::CertificateFailed: return "CertificateFailed";
  }
  return "unknown";
}

struct IntegralityResult {
  IntegralityStatus status = IntegralityStatus::CertificateFailed;
  long long alpha = 0, beta = 1;  // γ = α/β in lowest terms
  long long index = 0;            // valid when status == Integer
  double markov = 0.0;
  std::vector<std::string> certificate;
  std::string reason;
};

/// Exact-arithmetic check that γ = dim B₁ / dim B₀ is an integer for an
/// inclusion carrying canonical compatible traces.
inline IntegralityResult integrality_check(const InclusionData& d, double eps = kDefaultEps) {
  IntegralityResult res;
  res.markov = markov_index(d).value;
  const std::size_t nr = d.rows(), nc = d.cols();
  long long n0 = 0, n1 = 0;
  for (long long x : d.dims_small) n0 += x * x;
  for (long long x : d.dims_big) n1 += x * x;
  auto fail = [&](IntegralityStatus s, std::string why) {
    res.status = s;
    res.reason = std::move(why);
    return res;
  };
  // Canonical traces only.
  auto canonical = [&](const std::vector<double>& w, const std::vector<long long>& dims, long long total) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (std::abs(w[i] - static_cast<double>(dims[i] * dims[i]) / static_cast<double>(total)) >= eps) return false;
    return true;
  };
  if (!d.weights_small.empty() && !canonical(d.weights_small, d.dims_small, n0))
    return fail(IntegralityStatus::NotAlgebraicData, "trace of the small algebra is not canonical");
  if (!d.weights_big.empty() && !canonical(d.weights_big, d.dims_big, n1))
    return fail(IntegralityStatus::NotAlgebraicData, "trace of the big algebra is not canonical");
  if (d.emb) {
    if (!xi_element(*d.emb->small, eps).is_scalar)
      return fail(IntegralityStatus::NotAlgebraicData, "xi is not scalar on the small algebra");
    if (!xi_element(*d.emb->big, eps).is_scalar)
      return fail(IntegralityStatus::NotAlgebraicData, "xi is not scalar on the big algebra");
  }
  res.certificate.push_back("canonical traces: rho_i = n_i^2/" + std::to_string(n0) + ", lambda_j = p_j^2/" +
                            std::to_string(n1));
  // Compatibility of the canonical traces: n_i N1 = N0 Σ_j m_ij p_j.
  for (std::size_t i = 0; i < nr; ++i) {
    long long s = 0;
    for (std::size_t j = 0; j < nc; ++j) s += d.matrix[i][j] * d.dims_big[j];
    if (d.dims_small[i] * n1 != n0 * s)
      return fail(IntegralityStatus::NotAlgebraicData,
                  "canonical-trace compatibility equation " + std::to_string(i) + " has no solution: " +
                      std::to_string(d.dims_small[i]) + "*" + std::to_string(n1) + " != " + std::to_string(n0) + "*" +
                      std::to_string(s));
  }
  res.certificate.push_back("compatibility n_i N1 = N0 (M p)_i holds for all i");
  const long long g = std::gcd(n1, n0);
  res.alpha = n1 / g;
  res.beta = n0 / g;
  res.certificate.push_back("gamma = " + std::to_string(n1) + "/" + std::to_string(n0) + " = " +
                            std::to_string(res.alpha) + "/" + std::to_string(res.beta));
  // Exact eigen-relations.
  std::vector<long long> mp(nr, 0), mtn(nc, 0), mtmp(nc, 0);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      mp[i] += d.matrix[i][j] * d.dims_big[j];
      mtn[j] += d.matrix[i][j] * d.dims_small[i];
    }
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t i = 0; i < nr; ++i) mtmp[j] += d.matrix[i][j] * mp[i];
  for (std::size_t j = 0; j < nc; ++j)
    if (mtn[j] != d.dims_big[j]) return fail(IntegralityStatus::CertificateFailed, "M^t n != p");
  for (std::size_t i = 0; i < nr; ++i)
    if (res.beta * mp[i] != res.alpha * d.dims_small[i]) return fail(IntegralityStatus::CertificateFailed, "M p != gamma n");
  for (std::size_t j = 0; j < nc; ++j)
    if (res.beta * mtmp[j] != res.alpha * d.dims_big[j])
      return fail(IntegralityStatus::CertificateFailed, "M^t M p != gamma p");
  res.certificate.push_back("M^t n = p, M p = gamma n, M^t M p = gamma p (exact)");
  // Divisibility cascade: β | α p_j forces β | p_j; dividing p by β preserves
  // the eigen-relation, so β^k | p_j for all k, hence β = 1.
  if (res.beta != 1) {
    std::vector<long long> p = d.dims_big;
    for (int step = 1; step <= 64; ++step) {
      for (long long& x : p) {
        if (x % res.beta != 0)
          return fail(IntegralityStatus::CertificateFailed,
                      "divisibility cascade breaks at step " + std::to_string(step) + ": beta does not divide p");
        x /= res.beta;
      }
      res.certificate.push_back("beta^" + std::to_string(step) + " divides every p_j");
    }
    return fail(IntegralityStatus::CertificateFailed, "cascade did not terminate");
  }
  res.certificate.push_back("beta = 1");
  res.index = res.alpha;
  res.status = IntegralityStatus::Integer;
  return res;
}

// ---------------------------------------------------------------------------
// Basic construction

struct BasicConstruction {
  AlgebraPtr b2;
  BlockStructure b2_blocks;
  Vec e1;  // in B₂
  SubalgebraEmbedding emb12;
  InclusionData new_data;
  Report report;
};

/// B₂ = commutant of the right action of B₀ on L²(B₁), realized in its own
/// matrix units; e₁ = projection of L²(B₁) onto B₀.
inline BasicConstruction basic_construction(const InclusionData& d, double eps = kDefaultEps) {
  if (!d.emb) throw Error(ErrorKind::InvalidInput, "basic construction needs a concrete embedding");
  IntegralityResult ir = integrality_check(d, eps);
  if (ir.status != IntegralityStatus::Integer) throw Error(ErrorKind::NotMarkov, "inclusion is not Markov: " + ir.reason);
  const SubalgebraEmbedding& emb = *d.emb;
  const FiniteStarAlgebra& b0 = *emb.small;
  const FiniteStarAlgebra& b1 = *emb.big;
  const Index d1 = b1.dim();
  const BlockStructure s = d.small_blocks ? *d.small_blocks : wedderburn(b0, eps);
  const Mat& w = b1.orthonormal_basis();
  const Mat& winv = b1.orthonormal_inverse();
  auto rho = [&](const Vec& x) -> Mat { return winv * b1.right_mult(emb.embed * x) * w; };
  // f^g_ij = ρ(e^g_ji) is a system of matrix units for ρ(B₀).
  std::vector<Index> sizes;
  std::vector<Mat> units;
  std::vector<Index> unit_rank;
  for (Index g = 0; g < s.blocks(); ++g) {
    const Index ng = s.block_sizes[g];
    std::vector<Mat> f_i1(ng), f_1i(ng);
    for (Index i = 0; i < ng; ++i) {
      f_i1[i] = rho(s.matrix_unit(g, 0, i));
      f_1i[i] = rho(s.matrix_unit(g, i, 0));
    }
    Mat f11 = 0.5 * (f_i1[0] + f_i1[0].adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(f11);
    std::vector<Index> cols;
    for (Index c = 0; c < d1; ++c)
      if (es.eigenvalues()(c) > 0.5) cols.push_back(c);
    const Index k = static_cast<Index>(cols.size());
    sizes.push_back(k);
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b) {
        Mat outer = es.eigenvectors().col(cols[a]) * es.eigenvectors().col(cols[b]).adjoint();
        Mat e = Mat::Zero(d1, d1);
        for (Index i = 0; i < ng; ++i) e += f_i1[i] * outer * f_1i[i];
        units.push_back(std::move(e));
        unit_rank.push_back(ng);
      }
  }
  const Index d2 = static_cast<Index>(units.size());
  auto coeffs = [&](const Mat& x) -> Vec {
    // Coefficient of E^g_ab is Tr(E^g_ba x)/n_g = Tr(E_ab^H x)/n_g.
    Vec c(d2);
    for (Index u = 0; u < d2; ++u) c(u) = (units[u].adjoint().cwiseProduct(x.transpose())).sum() / static_cast<double>(unit_rank[u]);
    return c;
  };
  auto rebuild = [&](const Vec& c) -> Mat {
    Mat x = Mat::Zero(d1, d1);
    for (Index u = 0; u < d2; ++u) x += c(u) * units[u];
    return x;
  };
  BasicConstruction bc;
  bc.b2 = multimatrix(sizes);
  bc.b2_blocks = multimatrix_blocks(*bc.b2, sizes);
  Mat embed(d2, d1);
  double membership = 0.0;
  for (Index i = 0; i < d1; ++i) {
    Mat lam = left_regular(b1, b1.basis(i));
    embed.col(i) = coeffs(lam);
    membership = std::max(membership, max_abs(Mat(rebuild(embed.col(i)) - lam)));
  }
  Mat q = range_basis(Mat(winv * emb.embed), std::sqrt(eps));
  Mat proj = q * q.adjoint();
  bc.e1 = coeffs(proj);
  membership = std::max(membership, max_abs(Mat(rebuild(bc.e1) - proj)));
  bc.emb12 = {emb.big, bc.b2, embed};
  Report& r = bc.report;
  r.add("left action lies in the commutant", membership, eps);
  Report er = bc.emb12.validate(eps, true);
  for (const auto& c : er.checks) r.checks.push_back({"embedding " + c.name, c.residual, c.pass});
  if (!er.passed("trace compatible")) throw Error(ErrorKind::NotMarkov, "canonical trace of B2 does not restrict to B1");
  const FiniteStarAlgebra& b2 = *bc.b2;
  const double gamma = static_cast<double>(ir.index);
  r.add("e1 idempotent", max_abs(Vec(b2.multiply(bc.e1, bc.e1) - bc.e1)), eps);
  r.add("e1 self-adjoint", max_abs(Vec(b2.star(bc.e1) - bc.e1)), eps);
  r.add("tr(e1) = 1/index", std::abs(b2.trace(bc.e1) - 1.0 / gamma), eps);
  Mat e0 = conditional_expectation(emb, eps);
  double exe = 0.0, markov = 0.0;
  for (Index i = 0; i < d1; ++i) {
    Vec x = embed.col(i);
    Vec lhs = b2.multiply(b2.multiply(bc.e1, x), bc.e1);
    Vec rhs = b2.multiply(embed * (e0 * b1.basis(i)), bc.e1);
    exe = std::max(exe, max_abs(Vec(lhs - rhs)));
    markov = std::max(markov, std::abs(b2.trace(b2.multiply(bc.e1, x)) - b1.trace(b1.basis(i)) / gamma));
  }
  r.add("e1 x e1 = E(x) e1", exe, eps);
  r.add("Markov property", markov, eps);
  BlockStructure b1_blocks = d.big_blocks ? *d.big_blocks : wedderburn(b1, eps);
  bc.new_data = inclusion_data(bc.emb12, eps, &b1_blocks, &bc.b2_blocks);
  r.add_flag("new inclusion matrix is the transpose", bc.new_data.matrix == transpose(d.matrix));
  return bc;
}

struct TowerLevelChain {
  std::vector<AlgebraPtr> levels;                // B_0, B_1, ...
  std::vector<SubalgebraEmbedding> embeddings;   // B_i -> B_{i+1}
  std::vector<Vec> jones_projections;            // e_{i+1} in B_{i+2}
  std::vector<InclusionData> inclusions;         // B_i ⊂ B_{i+1}
  double index = 0.0;
  Report report;

  Index top() const { return static_cast<Index>(levels.size()) - 1; }
  /// Composite embedding B_i -> B_j.
  Mat embedding(Index i, Index j) const {
    Mat m = Mat::Identity(levels[i]->dim(), levels[i]->dim());
    for (Index k = i; k < j; ++k) m = embeddings[k].embed * m;
    return m;
  }
  /// e_m as an element of B_j (requires m+1 <= j).
  Vec jones_in(Index m, Index j) const { return embedding(m + 1, j) * jones_projections[m - 1]; }
};

/// k basic constructions on top of B₀ ⊂ B₁.
inline TowerLevelChain jones_tower(const InclusionData& d, Index k, double eps = kDefaultEps) {
  if (k < 0) throw Error(ErrorKind::InvalidInput, "tower depth must be nonnegative");
  if (!d.emb) throw Error(ErrorKind::InvalidInput, "tower needs a concrete embedding");
  TowerLevelChain t;
  t.levels = {d.emb->small, d.emb->big};
  t.embeddings = {*d.emb};
  t.inclusions = {d};
  IntegralityResult ir = integrality_check(d, eps);
  if (ir.status != IntegralityStatus::Integer) throw Error(ErrorKind::NotMarkov, "inclusion is not Markov: " + ir.reason);
  t.index = static_cast<double>(ir.index);
  for (Index step = 0; step < k; ++step) {
    BasicConstruction bc = basic_construction(t.inclusions.back(), eps);
    for (const auto& c : bc.report.checks)
      t.report.checks.push_back({"level " + std::to_string(step + 2) + ": " + c.name, c.residual, c.pass});
    t.levels.push_back(bc.b2);
    t.embeddings.push_back(bc.emb12);
    t.jones_projections.push_back(bc.e1);
    t.inclusions.push_back(std::move(bc.new_data));
  }
  for (std::size_t i = 1; i < t.inclusions.size(); ++i)
    t.report.add_flag("inclusion matrix alternates at level " + std::to_string(i),
                      t.inclusions[i].matrix == transpose(t.inclusions[i - 1].matrix));
  for (std::size_t m = 0; m < t.jones_projections.size(); ++m) {
    const FiniteStarAlgebra& b = *t.levels[m + 2];
    t.report.add("tr(e" + std::to_string(m + 1) + ") = 1/index", std::abs(b.trace(t.jones_projections[m]) - 1.0 / t.index), eps);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Commuting squares

/// bottom ⊂ left ⊂ top and bottom ⊂ right ⊂ top.
struct CommutingSquareData {
  AlgebraPtr bottom, left, right, top;
  Mat bottom_left, bottom_right, left_top, right_top;
};

/// Square read off from three *-subalgebras of `top` given by spanning sets.
inline CommutingSquareData square_from_spans(const AlgebraPtr& top, const Mat& bottom, const Mat& left, const Mat& right,
                                             double eps = kDefaultEps) {
  SubalgebraEmbedding b = subalgebra(top, bottom, eps), l = subalgebra(top, left, eps), r = subalgebra(top, right, eps);
  // Subalgebra bases are trace-orthonormal, so v^H G reads coordinates.
  Mat bl = l.embed.adjoint() * top->gram() * b.embed;
  Mat br = r.embed.adjoint() * top->gram() * b.embed;
  return {b.small, l.small, r.small, top, bl, br, l.embed, r.embed};
}

struct SquareCheck {
  bool commuting = false, nondegenerate = false;
  double diagram_residual = 0.0;
  double commuting_residual = 0.0;  // ||E_l E_r - E_r E_l||
  double bottom_residual = 0.0;     // ||E_l E_r - E_bottom||
  Index span_rank = 0;
};

inline SquareCheck square_check(const CommutingSquareData& sq, double eps = kDefaultEps) {
  SquareCheck c;
  c.diagram_residual = max_abs(Mat(sq.left_top * sq.bottom_left - sq.right_top * sq.bottom_right));
  Mat el = conditional_expectation({sq.left, sq.top, sq.left_top}, eps);
  Mat er = conditional_expectation({sq.right, sq.top, sq.right_top}, eps);
  Mat eb = conditional_expectation({sq.bottom, sq.top, Mat(sq.left_top * sq.bottom_left)}, eps);
  c.commuting_residual = max_abs(Mat(el * er - er * el));
  c.bottom_residual = max_abs(Mat(el * er - eb));
  c.commuting = c.diagram_residual < eps && c.commuting_residual < eps && c.bottom_residual < eps;
  const FiniteStarAlgebra& t = *sq.top;
  Mat prods(t.dim(), sq.left_top.cols() * sq.right_top.cols());
  for (Index i = 0; i < sq.left_top.cols(); ++i)
    for (Index j = 0; j < sq.right_top.cols(); ++j)
      prods.col(i * sq.right_top.cols() + j) = t.multiply(sq.left_top.col(i), sq.right_top.col(j));
  c.span_rank = numerical_rank(Mat(t.orthonormal_inverse() * prods), std::sqrt(eps));
  c.nondegenerate = c.span_rank == t.dim();
  return c;
}

/// A ⊂ B⊗A over C ⊂ β(B) (B⊗A^op when β is an anticoaction).
inline CommutingSquareData coaction_square(const CoactionMap& beta, double eps = kDefaultEps) {
  auto top = homomorphism_codomain(beta, beta.kind);
  Mat ones = beta.target->unit();
  Mat left = kron(ones, Mat::Identity(beta.kac->dim(), beta.kac->dim()));
  return square_from_spans(top, Mat(top->unit()), left, beta.map, eps);
}

/// P ⊂ B⊗P over P^π ⊂ (B⊗P)^{β⊗π}.
inline CommutingSquareData twisted_fixed_square(const CoactionMap& beta, const CoactionMap& pi, double eps = kDefaultEps) {
  FixedPointTensor f = fixed_point_tensor(beta, pi, eps);
  auto top = f.fixed.ambient;
  Mat one_b = beta.target->unit();
  Mat left = kron(one_b, Mat::Identity(pi.dim(), pi.dim()));
  FixedPointAlgebra ppi = averaging(pi, eps);
  Mat bottom = kron(one_b, ppi.basis);
  return square_from_spans(top, bottom, left, f.fixed.basis, eps);
}

// ---------------------------------------------------------------------------
// Extension up the tower

struct ExtendedCoactions {
  std::vector<CoactionMap> betas;            // β_0, β_1, ..., β_top
  std::vector<double> consistency_residual;  // per extended level
  std::vector<bool> unique;
  std::vector<double> jones_fixed_residual;
  std::vector<double> restriction_residual;
  double invariance_residual = 0.0;
  Report report;
};

struct ExtensionOptions {
  bool reverse_spanning_order = false;
};

/// β_{i+1} determined by β_{i+1}|B_i = β_i and β_{i+1}(x e_i y) = β_i(x)(e_i⊗1)β_i(y).
inline ExtendedCoactions extend_anticoaction(const CoactionMap& beta1, const TowerLevelChain& chain,
                                             double eps = kDefaultEps, ExtensionOptions opts = {}) {
  if (chain.levels.size() < 2) throw Error(ErrorKind::InvalidInput, "tower has fewer than two levels");
  if (beta1.target->dim() != chain.levels[1]->dim())
    throw Error(ErrorKind::DimensionMismatch, "beta1 does not act on B1");
  if (beta1.kind == CoactionKind::None) throw Error(ErrorKind::KindMismatch, "beta1 must be a coaction or anticoaction");
  require_valid(beta1, eps);
  const Index da = beta1.kac->dim();
  ExtendedCoactions out;
  // Restriction to B₀ and invariance.
  const SubalgebraEmbedding& e01 = chain.embeddings[0];
  const Mat& g1 = e01.big->gram();
  Mat jpinv = (e01.embed.adjoint() * g1 * e01.embed).ldlt().solve(Mat(e01.embed.adjoint() * g1));
  Mat b0map = compose_left(jpinv, Mat(beta1.map * e01.embed), da);
  out.invariance_residual = max_abs(Mat(compose_left(e01.embed, b0map, da) - beta1.map * e01.embed));
  if (!(out.invariance_residual < eps))
    throw Error(ErrorKind::NotInvariant, "beta1 does not leave B0 invariant (residual " +
                                             std::to_string(out.invariance_residual) + ")");
  out.betas.push_back({beta1.kac, chain.levels[0], b0map, beta1.kind, beta1.name + "_0"});
  CoactionMap b1 = beta1;
  b1.target = chain.levels[1];
  out.betas.push_back(b1);
  out.report.add("B0 invariant", out.invariance_residual, eps);
  for (Index i = 1; i < chain.top(); ++i) {
    const CoactionMap& bi = out.betas[i];
    const Mat& j = chain.embeddings[i].embed;
    const AlgebraPtr& big = chain.levels[i + 1];
    const Index di = chain.levels[i]->dim(), dn = big->dim();
    const Vec& e = chain.jones_projections[i - 1];
    CoactionMap draft{bi.kac, big, Mat(), bi.kind, beta1.name + "_" + std::to_string(i + 1)};
    auto codomain = homomorphism_codomain(draft, bi.kind);
    Mat lifted = compose_left(j, bi.map, da);  // β_i(b_x) in B_{i+1}⊗A
    Vec e1 = kron(e, bi.kac->alg->unit());
    std::vector<Index> order(static_cast<std::size_t>(di));
    std::iota(order.begin(), order.end(), 0);
    if (opts.reverse_spanning_order) std::reverse(order.begin(), order.end());
    Mat s(dn, di + di * di), t(dn * da, di + di * di);
    Index col = 0;
    for (Index x : order) {
      s.col(col) = j.col(x);
      t.col(col) = lifted.col(x);
      ++col;
    }
    for (Index x : order) {
      Vec xe = big->multiply(j.col(x), e);
      Vec txe = codomain->multiply(lifted.col(x), e1);
      for (Index y : order) {
        s.col(col) = big->multiply(xe, j.col(y));
        t.col(col) = codomain->multiply(txe, lifted.col(y));
        ++col;
      }
    }
    draft.map = right_divide(t, s);
    const double resid = max_abs(Mat(draft.map * s - t));
    const bool unique = numerical_rank(s, std::sqrt(eps)) == dn;
    if (!(resid < eps))
      throw Error(ErrorKind::ExtensionInconsistent,
                  "extension to level " + std::to_string(i + 1) + " is inconsistent (residual " + std::to_string(resid) + ")");
    out.consistency_residual.push_back(resid);
    out.unique.push_back(unique);
    out.jones_fixed_residual.push_back(max_abs(Vec(draft.map * e - e1)));
    out.restriction_residual.push_back(max_abs(Mat(draft.map * j - lifted)));
    const std::string lvl = "level " + std::to_string(i + 1) + ": ";
    out.report.add(lvl + "consistent", resid, eps);
    out.report.add_flag(lvl + "unique", unique);
    out.report.add(lvl + "fixes Jones projection", out.jones_fixed_residual.back(), eps);
    out.report.add(lvl + "restricts to previous level", out.restriction_residual.back(), eps);
    Report v = validate_coaction(draft, eps);
    for (const auto& c : v.checks) out.report.checks.push_back({lvl + c.name, c.residual, c.pass});
    out.betas.push_back(std::move(draft));
  }
  return out;
}

}  // namespace kacsub
