#pragma once

// Finite groups as Cayley tables and actions of them on finite *-algebras.

#include "kacsub/algebra.hpp"

#include <map>
#include <string>
#include <vector>

namespace kacsub {

class FiniteGroupTable {
 public:
  /// Validates the table exhaustively (closure, associativity, identity,
  /// inverses).
  explicit FiniteGroupTable(std::vector<std::vector<Index>> cayley, std::vector<std::string> names = {})
      : cayley_(std::move(cayley)), names_(std::move(names)) {
    const Index n = order();
    if (n == 0) throw Error(ErrorKind::InvalidInput, "group must be nonempty");
    for (const auto& row : cayley_) {
      if (static_cast<Index>(row.size()) != n) throw Error(ErrorKind::InvalidInput, "Cayley table must be square");
      for (Index x : row)
        if (x < 0 || x >= n) throw Error(ErrorKind::InvalidInput, "Cayley table entry out of range");
    }
    identity_ = -1;
    for (Index e = 0; e < n && identity_ < 0; ++e) {
      bool ok = true;
      for (Index g = 0; g < n && ok; ++g) ok = cayley_[e][g] == g && cayley_[g][e] == g;
      if (ok) identity_ = e;
    }
    if (identity_ < 0) throw Error(ErrorKind::InvalidInput, "Cayley table has no identity");
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index c = 0; c < n; ++c)
          if (cayley_[cayley_[a][b]][c] != cayley_[a][cayley_[b][c]])
            throw Error(ErrorKind::InvalidInput, "Cayley table is not associative");
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        if (cayley_[a][b] == identity_ && cayley_[b][a] == identity_) inverse_[a] = b;
    for (Index a = 0; a < n; ++a)
      if (inverse_[a] < 0) throw Error(ErrorKind::InvalidInput, "element without inverse");
    if (names_.empty())
      for (Index a = 0; a < n; ++a) names_.push_back(a == identity_ ? "e" : "g" + std::to_string(a));
    if (static_cast<Index>(names_.size()) != n) throw Error(ErrorKind::InvalidInput, "one name per element");
  }

  Index order() const { return static_cast<Index>(cayley_.size()); }
  Index identity() const { return identity_; }
  Index mul(Index a, Index b) const { return cayley_[a][b]; }
  Index inv(Index a) const { return inverse_[a]; }
  const std::vector<std::vector<Index>>& cayley() const { return cayley_; }
  const std::vector<Index>& inverses() const { return inverse_; }
  const std::vector<std::string>& names() const { return names_; }

  Index find(const std::string& name) const {
    for (Index a = 0; a < order(); ++a)
      if (names_[a] == name) return a;
    throw Error(ErrorKind::UnresolvedReference, "no group element named '" + name + "'");
  }

  bool is_abelian() const {
    for (Index a = 0; a < order(); ++a)
      for (Index b = 0; b < order(); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

 private:
  std::vector<std::vector<Index>> cayley_;
  std::vector<std::string> names_;
  std::vector<Index> inverse_;
  Index identity_ = 0;
};

/// Closure of the given permutations (images of 0..n-1) under composition.
/// Element 0 is the identity; (ab)(x) = a(b(x)).
inline FiniteGroupTable group_from_generators(const std::vector<std::vector<Index>>& generators) {
  if (generators.empty()) return FiniteGroupTable(std::vector<std::vector<Index>>{{0}});
  const std::size_t n = generators[0].size();
  for (const auto& g : generators) {
    if (g.size() != n) throw Error(ErrorKind::InvalidInput, "generators act on different point sets");
    std::vector<bool> seen(n, false);
    for (Index x : g) {
      if (x < 0 || static_cast<std::size_t>(x) >= n || seen[x])
        throw Error(ErrorKind::InvalidInput, "generator is not a permutation");
      seen[x] = true;
    }
  }
  using Perm = std::vector<Index>;
  auto compose = [](const Perm& a, const Perm& b) {
    Perm c(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) c[x] = a[b[x]];
    return c;
  };
  Perm id(n);
  for (std::size_t x = 0; x < n; ++x) id[x] = static_cast<Index>(x);
  std::vector<Perm> elements{id};
  std::map<Perm, Index> index{{id, 0}};
  for (std::size_t k = 0; k < elements.size(); ++k)
    for (const auto& g : generators) {
      Perm p = compose(g, elements[k]);
      if (!index.count(p)) {
        index[p] = static_cast<Index>(elements.size());
        elements.push_back(p);
      }
    }
  const Index order = static_cast<Index>(elements.size());
  std::vector<std::vector<Index>> table(static_cast<std::size_t>(order), std::vector<Index>(order));
  for (Index a = 0; a < order; ++a)
    for (Index b = 0; b < order; ++b) table[a][b] = index.at(compose(elements[a], elements[b]));
  return FiniteGroupTable(std::move(table));
}

inline FiniteGroupTable cyclic_group(Index n) {
  if (n <= 0) throw Error(ErrorKind::InvalidInput, "cyclic group order must be positive");
  std::vector<std::vector<Index>> t(static_cast<std::size_t>(n), std::vector<Index>(n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteGroupTable(std::move(t));
}

/// S_n generated by a transposition and an n-cycle.
inline FiniteGroupTable symmetric_group(Index n) {
  if (n <= 1) return FiniteGroupTable(std::vector<std::vector<Index>>{{0}});
  std::vector<Index> swap(n), cycle(n);
  for (Index x = 0; x < n; ++x) {
    swap[x] = x;
    cycle[x] = (x + 1) % n;
  }
  std::swap(swap[0], swap[1]);
  return group_from_generators({swap, cycle});
}

/// Dihedral group of order 2n acting on the n-gon.
inline FiniteGroupTable dihedral_group(Index n) {
  if (n < 3) throw Error(ErrorKind::InvalidInput, "dihedral group needs n >= 3");
  std::vector<Index> rot(n), refl(n);
  for (Index x = 0; x < n; ++x) {
    rot[x] = (x + 1) % n;
    refl[x] = (n - x) % n;
  }
  return group_from_generators({rot, refl});
}

/// Quaternion group Q8 via its left regular permutation representation.
inline FiniteGroupTable quaternion_group() {
  // Elements: 1, -1, i, -i, j, -j, k, -k encoded as (sign, unit) pairs.
  const int unit_mul[4][4][2] = {
      {{1, 0}, {1, 1}, {1, 2}, {1, 3}},
      {{1, 1}, {-1, 0}, {1, 3}, {-1, 2}},
      {{1, 2}, {-1, 3}, {-1, 0}, {1, 1}},
      {{1, 3}, {1, 2}, {-1, 1}, {-1, 0}},
  };
  auto code = [](int sign, int unit) { return static_cast<Index>(2 * unit + (sign < 0 ? 1 : 0)); };
  std::vector<std::vector<Index>> t(8, std::vector<Index>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int sa = (a % 2) ? -1 : 1, ua = a / 2, sb = (b % 2) ? -1 : 1, ub = b / 2;
      const int s = sa * sb * unit_mul[ua][ub][0];
      t[a][b] = code(s, unit_mul[ua][ub][1]);
    }
  return FiniteGroupTable(std::move(t), {"1", "-1", "i", "-i", "j", "-j", "k", "-k"});
}

inline FiniteGroupTable direct_product(const FiniteGroupTable& g, const FiniteGroupTable& h) {
  const Index m = h.order(), n = g.order() * m;
  std::vector<std::vector<Index>> t(static_cast<std::size_t>(n), std::vector<Index>(n));
  std::vector<std::string> names;
  for (Index a = 0; a < n; ++a) {
    names.push_back("(" + g.names()[a / m] + "," + h.names()[a % m] + ")");
    for (Index b = 0; b < n; ++b) t[a][b] = g.mul(a / m, b / m) * m + h.mul(a % m, b % m);
  }
  return FiniteGroupTable(std::move(t), std::move(names));
}

/// g -> automorphism of `target` (coefficient matrices).
struct GroupAction {
  FiniteGroupTable group;
  AlgebraPtr target;
  std::vector<Mat> automorphisms;

  Report validate(double eps = kDefaultEps) const {
    Report r;
    const Index n = group.order(), d = target->dim();
    if (static_cast<Index>(automorphisms.size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "one automorphism per group element");
    for (const auto& a : automorphisms)
      if (a.rows() != d || a.cols() != d) throw Error(ErrorKind::DimensionMismatch, "automorphism shape");
    double hom = 0.0, mult = 0.0, star = 0.0, trace = 0.0;
    for (Index g = 0; g < n; ++g) {
      const Mat& a = automorphisms[g];
      for (Index h = 0; h < n; ++h) hom = std::max(hom, max_abs(Mat(a * automorphisms[h] - automorphisms[group.mul(g, h)])));
      trace = std::max(trace, max_abs(Vec(a.transpose() * target->trace_vector() - target->trace_vector())));
      for (Index i = 0; i < d; ++i) {
        Vec ai = a.col(i);
        star = std::max(star, max_abs(Vec(target->star(ai) - a * target->star(target->basis(i)))));
        for (Index j = 0; j < d; ++j)
          mult = std::max(mult, max_abs(Vec(target->multiply(ai, a.col(j)) -
                                            a * target->multiply(target->basis(i), target->basis(j)))));
      }
    }
    r.add("homomorphism", hom, eps);
    r.add("identity acts trivially", max_abs(Mat(automorphisms[group.identity()] - Mat::Identity(d, d))), eps);
    r.add("multiplicative", mult, eps);
    r.add("star preserving", star, eps);
    r.add("trace preserving", trace, eps);
    return r;
  }
};

/// Action on C^n (minimal projections) through a permutation action on points.
inline GroupAction permutation_action(const FiniteGroupTable& g, const std::vector<std::vector<Index>>& point_maps,
                                      std::vector<double> weights = {}) {
  if (static_cast<Index>(point_maps.size()) != g.order())
    throw Error(ErrorKind::DimensionMismatch, "one point map per group element");
  const Index n = static_cast<Index>(point_maps[0].size());
  GroupAction act{g, commutative_algebra(n, std::move(weights)), {}};
  for (const auto& pm : point_maps) {
    Mat a = Mat::Zero(n, n);
    for (Index x = 0; x < n; ++x) a(pm[x], x) = 1.0;
    act.automorphisms.push_back(a);
  }
  return act;
}

/// The trivial action of g on `target`.
inline GroupAction trivial_action(const FiniteGroupTable& g, const AlgebraPtr& target) {
  return {g, target, std::vector<Mat>(static_cast<std::size_t>(g.order()), Mat::Identity(target->dim(), target->dim()))};
}

}  // namespace kacsub
