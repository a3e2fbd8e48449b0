#pragma once

// Finite-dimensional *-algebras with a faithful unital trace, given by
// structure constants on a fixed basis {b_i}.

#include "kacsub/errors.hpp"
#include "kacsub/linalg.hpp"
#include "kacsub/report.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace kacsub {

/// b_i b_j contributes `value` to the coefficient of b_k.
struct MultTerm {
  Index i, j, k;
  cplx value;
};

class FiniteStarAlgebra;
using AlgebraPtr = std::shared_ptr<const FiniteStarAlgebra>;

class FiniteStarAlgebra {
 public:
  struct Options {
    double eps = kDefaultEps;
    bool validate = true;
  };

  /// `star` is the matrix S with x* = S conj(x); `trace` holds tr(b_i).
  FiniteStarAlgebra(std::vector<std::string> labels, std::vector<MultTerm> mult, Vec unit, Mat star,
                    Vec trace, Options opts)
      : labels_(std::move(labels)),
        mult_(std::move(mult)),
        unit_(std::move(unit)),
        star_(std::move(star)),
        trace_(std::move(trace)),
        cache_(std::make_shared<Cache>()) {
    const Index n = static_cast<Index>(labels_.size());
    if (n <= 0) throw Error(ErrorKind::InvalidInput, "algebra dimension must be positive");
    if (unit_.size() != n || trace_.size() != n || star_.rows() != n || star_.cols() != n)
      throw Error(ErrorKind::DimensionMismatch, "algebra data sizes disagree with the basis");
    for (const auto& t : mult_)
      if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= n || t.j >= n || t.k >= n)
        throw Error(ErrorKind::DimensionMismatch, "structure constant index out of range");
    mult_.erase(std::remove_if(mult_.begin(), mult_.end(), [](const MultTerm& t) { return t.value == 0.0; }),
                mult_.end());
    if (opts.validate) {
      Report r = validate(opts.eps);
      if (!r.pass()) {
        const bool faithful = r.passed("trace faithful");
        throw Error(faithful ? ErrorKind::InvalidInput : ErrorKind::NonSemisimple,
                    "algebra axioms fail: " + r.failures());
      }
    }
  }

  FiniteStarAlgebra(std::vector<std::string> labels, std::vector<MultTerm> mult, Vec unit, Mat star,
                    Vec trace)
      : FiniteStarAlgebra(std::move(labels), std::move(mult), std::move(unit), std::move(star),
                          std::move(trace), Options{}) {}

  Index dim() const { return static_cast<Index>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<MultTerm>& mult_terms() const { return mult_; }
  const Vec& unit() const { return unit_; }
  const Mat& star_matrix() const { return star_; }
  const Vec& trace_vector() const { return trace_; }

  Vec basis(Index i) const { return unit_vector(dim(), i); }

  Vec multiply(const Vec& x, const Vec& y) const {
    Vec z = Vec::Zero(dim());
    for (const auto& t : mult_) z(t.k) += t.value * x(t.i) * y(t.j);
    return z;
  }
  Vec star(const Vec& x) const { return star_ * x.conjugate(); }
  cplx trace(const Vec& x) const { return trace_.transpose() * x; }

  /// Matrix of y -> x y on coefficient vectors.
  Mat left_mult(const Vec& x) const {
    Mat l = Mat::Zero(dim(), dim());
    for (const auto& t : mult_) l(t.k, t.j) += t.value * x(t.i);
    return l;
  }
  /// Matrix of y -> y x on coefficient vectors.
  Mat right_mult(const Vec& x) const {
    Mat r = Mat::Zero(dim(), dim());
    for (const auto& t : mult_) r(t.k, t.i) += t.value * x(t.j);
    return r;
  }

  /// Gram matrix G with <x, y> = tr(y* x) = y^H G x.
  const Mat& gram() const {
    std::call_once(cache_->gram_once, [this] {
      if (cache_->gram_preset) return;
      Mat t = Mat::Zero(dim(), dim());
      for (const auto& term : mult_) t(term.i, term.j) += term.value * trace_(term.k);
      cache_->gram = star_.transpose() * t;
    });
    return cache_->gram;
  }
  cplx inner(const Vec& x, const Vec& y) const { return y.dot(gram() * x); }
  double norm(const Vec& x) const { return std::sqrt(std::max(0.0, inner(x, x).real())); }

  /// Columns: coefficient vectors of the orthonormal basis obtained by
  /// modified Gram-Schmidt on {b_i} in input order.
  const Mat& orthonormal_basis() const {
    ensure_orthonormal();
    return cache_->on;
  }
  /// Inverse of `orthonormal_basis()`: coefficients -> orthonormal coordinates.
  const Mat& orthonormal_inverse() const {
    ensure_orthonormal();
    return cache_->on_inv;
  }

  bool is_commutative(double eps = kDefaultEps) const { return commutativity_residual() < eps; }
  double commutativity_residual() const {
    double worst = 0.0;
    for (Index i = 0; i < dim(); ++i) worst = std::max(worst, max_abs(left_mult(basis(i)) - right_mult(basis(i))));
    return worst;
  }

  Report validate(double eps = kDefaultEps) const;

  /// Lets derived constructions install known Gram/orthonormal data.
  void preset_geometry(Mat gram, Mat on, Mat on_inv) const {
    std::call_once(cache_->gram_once, [&] {
      cache_->gram = std::move(gram);
      cache_->gram_preset = true;
    });
    std::call_once(cache_->on_once, [&] {
      cache_->on = std::move(on);
      cache_->on_inv = std::move(on_inv);
    });
  }

 private:
  struct Cache {
    std::once_flag gram_once;
    bool gram_preset = false;
    Mat gram;
    std::once_flag on_once;
    Mat on, on_inv;
  };

  void ensure_orthonormal() const {
    std::call_once(cache_->on_once, [this] {
      const Mat& g = gram();
      const Index n = dim();
      Mat q = Mat::Zero(n, n);
      for (Index k = 0; k < n; ++k) {
        Vec v = unit_vector(n, k);
        for (int pass = 0; pass < 2; ++pass)
          for (Index m = 0; m < k; ++m) v -= q.col(m).dot(g * v) * q.col(m);
        const double nv = std::sqrt(std::max(0.0, v.dot(g * v).real()));
        if (nv < 1e-14) throw Error(ErrorKind::NonSemisimple, "Gram-Schmidt breakdown: trace not faithful");
        q.col(k) = v / nv;
      }
      cache_->on = q;
      cache_->on_inv = q.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
    });
  }

  std::vector<std::string> labels_;
  std::vector<MultTerm> mult_;
  Vec unit_;
  Mat star_;
  Vec trace_;
  std::shared_ptr<Cache> cache_;
};

inline Report FiniteStarAlgebra::validate(double eps) const {
  Report r;
  const Index n = dim();
  Rng rng(0x5eed);
  // Associativity: exhaustive on small bases, random triples otherwise.
  double assoc = 0.0;
  if (n <= 10) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        Vec bij = multiply(basis(i), basis(j));
        for (Index k = 0; k < n; ++k)
          assoc = std::max(assoc, max_abs(multiply(bij, basis(k)) - multiply(basis(i), multiply(basis(j), basis(k)))));
      }
  } else {
    for (int s = 0; s < 12; ++s) {
      Vec x = random_vector(n, rng), y = random_vector(n, rng), z = random_vector(n, rng);
      assoc = std::max(assoc, max_abs(multiply(multiply(x, y), z) - multiply(x, multiply(y, z))));
    }
  }
  r.add("associative", assoc, eps);
  r.add("unit left", max_abs(left_mult(unit_) - Mat::Identity(n, n)), eps);
  r.add("unit right", max_abs(right_mult(unit_) - Mat::Identity(n, n)), eps);
  // star: involutive and antimultiplicative
  r.add("star involutive", max_abs(star_ * star_.conjugate() - Mat::Identity(n, n)), eps);
  double anti = 0.0;
  if (n <= 10) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        anti = std::max(anti, max_abs(star(multiply(basis(i), basis(j))) - multiply(star(basis(j)), star(basis(i)))));
  } else {
    for (int s = 0; s < 12; ++s) {
      Vec x = random_vector(n, rng), y = random_vector(n, rng);
      anti = std::max(anti, max_abs(star(multiply(x, y)) - multiply(star(y), star(x))));
    }
  }
  r.add("star antimultiplicative", anti, eps);
  r.add("trace unital", std::abs(trace(unit_) - 1.0), eps);
  Mat t = Mat::Zero(n, n);
  for (const auto& term : mult_) t(term.i, term.j) += term.value * trace_(term.k);
  r.add("trace tracial", max_abs(t - t.transpose()), eps);
  const Mat& g = gram();
  r.add("trace hermitian", max_abs(g - g.adjoint()), eps);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  r.checks.push_back({"trace faithful", lmin > eps ? 0.0 : eps - lmin, lmin > eps});
  return r;
}

// ---------------------------------------------------------------------------
// Constructors

/// M_n with matrix units e_ij at index i*n+j and the normalized trace.
inline AlgebraPtr matrix_algebra(Index n) {
  if (n <= 0) throw Error(ErrorKind::InvalidInput, "matrix size must be positive");
  std::vector<std::string> labels;
  std::vector<MultTerm> mult;
  Vec unit = Vec::Zero(n * n), trace = Vec::Zero(n * n);
  Mat star = Mat::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      labels.push_back("e" + std::to_string(i + 1) + std::to_string(j + 1));
      star(j * n + i, i * n + j) = 1.0;
      for (Index k = 0; k < n; ++k) mult.push_back({i * n + j, j * n + k, i * n + k, 1.0});
    }
  for (Index i = 0; i < n; ++i) {
    unit(i * n + i) = 1.0;
    trace(i * n + i) = 1.0 / static_cast<double>(n);
  }
  auto a = std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), unit, star, trace,
                                               FiniteStarAlgebra::Options{kDefaultEps, n <= 4});
  return a;
}

/// Canonical weights m_g^2 / sum(m^2) of a multimatrix algebra.
inline std::vector<double> canonical_weights(const std::vector<Index>& block_sizes) {
  if (block_sizes.empty()) throw Error(ErrorKind::InvalidInput, "empty block list");
  double n = 0.0;
  for (Index m : block_sizes) {
    if (m <= 0) throw Error(ErrorKind::InvalidInput, "block sizes must be positive");
    n += static_cast<double>(m * m);
  }
  std::vector<double> w;
  for (Index m : block_sizes) w.push_back(static_cast<double>(m * m) / n);
  return w;
}

/// Offsets of each block inside the matrix-unit basis of ⊕ M_{m_g}.
inline std::vector<Index> block_offsets(const std::vector<Index>& block_sizes) {
  std::vector<Index> off;
  Index acc = 0;
  for (Index m : block_sizes) {
    off.push_back(acc);
    acc += m * m;
  }
  return off;
}

/// ⊕_g M_{m_g} in matrix units (block-major, then row-major) with weights
/// λ_g = tr(1_g); empty weights select the canonical trace.
inline AlgebraPtr multimatrix(const std::vector<Index>& block_sizes, std::vector<double> weights = {}) {
  if (weights.empty()) weights = canonical_weights(block_sizes);
  if (weights.size() != block_sizes.size()) throw Error(ErrorKind::DimensionMismatch, "one weight per block");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::NonSemisimple, "weights must be positive for a faithful trace");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::InvalidInput, "weights must sum to 1");
  const auto off = block_offsets(block_sizes);
  const Index n = off.back() + block_sizes.back() * block_sizes.back();
  std::vector<std::string> labels(n);
  std::vector<MultTerm> mult;
  Vec unit = Vec::Zero(n), trace = Vec::Zero(n);
  Mat star = Mat::Zero(n, n);
  for (std::size_t g = 0; g < block_sizes.size(); ++g) {
    const Index m = block_sizes[g], o = off[g];
    for (Index i = 0; i < m; ++i) {
      unit(o + i * m + i) = 1.0;
      trace(o + i * m + i) = weights[g] / static_cast<double>(m);
      for (Index j = 0; j < m; ++j) {
        labels[o + i * m + j] = (block_sizes.size() > 1 ? "b" + std::to_string(g + 1) + ":" : "") + "e" +
                                std::to_string(i + 1) + std::to_string(j + 1);
        star(o + j * m + i, o + i * m + j) = 1.0;
        for (Index k = 0; k < m; ++k) mult.push_back({o + i * m + j, o + j * m + k, o + i * m + k, 1.0});
      }
    }
  }
  auto a = std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), unit, star, trace,
                                               FiniteStarAlgebra::Options{kDefaultEps, false});
  // Matrix units are orthogonal; the orthonormal basis is a rescaling.
  Mat g = Mat::Zero(n, n), on = Mat::Zero(n, n), on_inv = Mat::Zero(n, n);
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    const Index m = block_sizes[b];
    const double w = weights[b] / static_cast<double>(m);
    for (Index i = 0; i < m * m; ++i) {
      g(off[b] + i, off[b] + i) = w;
      on(off[b] + i, off[b] + i) = 1.0 / std::sqrt(w);
      on_inv(off[b] + i, off[b] + i) = std::sqrt(w);
    }
  }
  a->preset_geometry(g, on, on_inv);
  return a;
}

/// C^n with minimal projections as basis and the given weights.
inline AlgebraPtr commutative_algebra(Index n, std::vector<double> weights = {}) {
  if (weights.empty()) weights.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  return multimatrix(std::vector<Index>(static_cast<std::size_t>(n), 1), weights);
}

/// a ⊗ b with basis b_i ⊗ c_j at index i*dim(b)+j and trace tr ⊗ tr.
inline AlgebraPtr tensor_product(const AlgebraPtr& a, const AlgebraPtr& b) {
  const Index db = b->dim();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(a->dim() * db));
  for (const auto& la : a->labels())
    for (const auto& lb : b->labels()) labels.push_back(la + "(x)" + lb);
  std::vector<MultTerm> mult;
  mult.reserve(a->mult_terms().size() * b->mult_terms().size());
  for (const auto& ta : a->mult_terms())
    for (const auto& tb : b->mult_terms())
      mult.push_back({ta.i * db + tb.i, ta.j * db + tb.j, ta.k * db + tb.k, ta.value * tb.value});
  auto t = std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), kron(a->unit(), b->unit()),
                                               kron(a->star_matrix(), b->star_matrix()),
                                               kron(a->trace_vector(), b->trace_vector()),
                                               FiniteStarAlgebra::Options{kDefaultEps, false});
  t->preset_geometry(kron(a->gram(), b->gram()), kron(a->orthonormal_basis(), b->orthonormal_basis()),
                     kron(a->orthonormal_inverse(), b->orthonormal_inverse()));
  return t;
}

/// Opposite algebra: same space, star and trace; x ·° y = y x.
inline AlgebraPtr opposite(const AlgebraPtr& a) {
  std::vector<MultTerm> mult;
  for (const auto& t : a->mult_terms()) mult.push_back({t.j, t.i, t.k, t.value});
  std::vector<std::string> labels;
  for (const auto& l : a->labels()) labels.push_back(l + "^o");
  auto o = std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), a->unit(), a->star_matrix(),
                                               a->trace_vector(), FiniteStarAlgebra::Options{kDefaultEps, false});
  o->preset_geometry(a->gram(), a->orthonormal_basis(), a->orthonormal_inverse());
  return o;
}

/// The *-algebra spanned by the given N x N matrices (assumed closed under
/// product and adjoint), with trace Tr(x)/N. Coefficients are read back in
/// the Frobenius-orthonormalized version of `basis`.
inline AlgebraPtr from_matrices(const std::vector<Mat>& basis, double eps = kDefaultEps,
                                double* closure_residual = nullptr) {
  if (basis.empty()) throw Error(ErrorKind::InvalidInput, "empty matrix basis");
  const Index n = static_cast<Index>(basis.size());
  const Index size = basis[0].rows();
  Mat flat(size * size, n);
  for (Index i = 0; i < n; ++i) flat.col(i) = basis[i].reshaped();
  // Coefficients of an arbitrary matrix in the given basis.
  Mat gram_f = flat.adjoint() * flat;
  Eigen::LDLT<Mat> solver(gram_f);
  auto coeffs = [&](const Mat& m) -> Vec { return solver.solve(flat.adjoint() * m.reshaped()); };
  double closure = 0.0;
  auto track = [&](const Mat& m, const Vec& c) { closure = std::max(closure, max_abs(Mat(m.reshaped() - flat * c))); };
  std::vector<MultTerm> mult;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Mat prod = basis[i] * basis[j];
      Vec c = coeffs(prod);
      track(prod, c);
      for (Index k = 0; k < n; ++k)
        if (std::abs(c(k)) > 1e-14) mult.push_back({i, j, k, c(k)});
    }
  Mat star(n, n);
  for (Index i = 0; i < n; ++i) {
    Mat adj = basis[i].adjoint();
    star.col(i) = coeffs(adj);
    track(adj, star.col(i));
  }
  Mat id = Mat::Identity(size, size);
  Vec unit = coeffs(id);
  track(id, unit);
  Vec trace(n);
  for (Index i = 0; i < n; ++i) trace(i) = basis[i].trace() / static_cast<double>(size);
  if (closure_residual) *closure_residual = closure;
  if (closure > std::sqrt(eps)) throw Error(ErrorKind::InvalidInput, "matrix span is not a *-subalgebra");
  std::vector<std::string> labels;
  for (Index i = 0; i < n; ++i) labels.push_back("m" + std::to_string(i));
  return std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), unit, star, trace,
                                             FiniteStarAlgebra::Options{eps, false});
}

// ---------------------------------------------------------------------------
// Embeddings

/// Injective unital *-homomorphism small -> big as a coefficient matrix.
struct SubalgebraEmbedding {
  AlgebraPtr small;
  AlgebraPtr big;
  Mat embed;  // big.dim x small.dim

  Report validate(double eps = kDefaultEps, bool require_trace = true) const {
    Report r;
    if (embed.rows() != big->dim() || embed.cols() != small->dim())
      throw Error(ErrorKind::DimensionMismatch, "embedding matrix shape");
    const Index n = small->dim();
    double mult = 0.0, star = 0.0;
    for (Index i = 0; i < n; ++i) {
      Vec bi = embed.col(i);
      star = std::max(star, max_abs(Vec(big->star(bi) - embed * small->star(small->basis(i)))));
      for (Index j = 0; j < n; ++j)
        mult = std::max(mult, max_abs(Vec(big->multiply(bi, embed.col(j)) -
                                          embed * small->multiply(small->basis(i), small->basis(j)))));
    }
    r.add("multiplicative", mult, eps);
    r.add("star preserving", star, eps);
    r.add("unital", max_abs(Vec(embed * small->unit() - big->unit())), eps);
    r.add_flag("injective", numerical_rank(embed, std::sqrt(eps)) == n);
    if (require_trace)
      r.add("trace compatible", max_abs(Vec(embed.transpose() * big->trace_vector() - small->trace_vector())), eps);
    return r;
  }
};

inline SubalgebraEmbedding identity_embedding(const AlgebraPtr& a) {
  return {a, a, Mat::Identity(a->dim(), a->dim())};
}

inline SubalgebraEmbedding compose(const SubalgebraEmbedding& inner, const SubalgebraEmbedding& outer) {
  return {inner.small, outer.big, outer.embed * inner.embed};
}

/// Basis of a subspace of `ambient` orthonormal in the trace inner product.
inline Mat trace_orthonormalize(const FiniteStarAlgebra& ambient, const Mat& span, double rel_tol) {
  const Mat& w = ambient.orthonormal_basis();
  const Mat& winv = ambient.orthonormal_inverse();
  Mat q = range_basis(winv * span, rel_tol);
  return w * q;
}

/// The *-subalgebra spanned by the columns of `span` (coefficients in
/// `ambient`), as a standalone algebra with the restricted trace, on a
/// trace-orthonormal basis of the span. Throws InvalidInput when the span is
/// not closed under product and star or misses the unit.
inline SubalgebraEmbedding subalgebra(const AlgebraPtr& ambient, const Mat& span, double eps = kDefaultEps,
                                      double* closure_residual = nullptr) {
  Mat v = trace_orthonormalize(*ambient, span, std::sqrt(eps));
  const Index r = v.cols();
  if (r == 0) throw Error(ErrorKind::InvalidInput, "empty subalgebra");
  // v^H G is the coordinate map onto the span (v is G-orthonormal).
  Mat coord = v.adjoint() * ambient->gram();
  double closure = 0.0;
  auto read = [&](const Vec& x) -> Vec {
    Vec c = coord * x;
    closure = std::max(closure, max_abs(Vec(x - v * c)));
    return c;
  };
  std::vector<MultTerm> mult;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) {
      Vec c = read(ambient->multiply(v.col(i), v.col(j)));
      for (Index k = 0; k < r; ++k)
        if (std::abs(c(k)) > 1e-15) mult.push_back({i, j, k, c(k)});
    }
  Mat star(r, r);
  for (Index i = 0; i < r; ++i) star.col(i) = read(ambient->star(v.col(i)));
  Vec unit = read(ambient->unit());
  Vec trace = v.transpose() * ambient->trace_vector();
  if (closure_residual) *closure_residual = closure;
  if (closure > std::sqrt(eps))
    throw Error(ErrorKind::InvalidInput, "span is not a unital *-subalgebra (closure residual " + std::to_string(closure) + ", rank " + std::to_string(r) + " in dim " + std::to_string(ambient->dim()) + ")");
  std::vector<std::string> labels;
  for (Index i = 0; i < r; ++i) labels.push_back("s" + std::to_string(i));
  auto small = std::make_shared<FiniteStarAlgebra>(std::move(labels), std::move(mult), unit, star, trace,
                                                   FiniteStarAlgebra::Options{eps, false});
  small->preset_geometry(Mat::Identity(r, r), Mat::Identity(r, r), Mat::Identity(r, r));
  return {small, ambient, v};
}

}  // namespace kacsub
