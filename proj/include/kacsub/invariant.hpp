#pragma once

// Lattices of fixed relative commutants B_i' ∩ B_j^{β_j}, intertwiner
// lattices of corepresentations, and their Bratteli (principal graph) data.

#include "kacsub/tower.hpp"

#include <map>
#include <utility>

namespace kacsub {

struct LatticeCell {
  Index i = 0, j = 0;
  AlgebraPtr algebra;
  Mat in_ambient;             // basis in coefficients of B_j (tower lattices)
  std::vector<Mat> matrices;  // basis as intertwiners (corepresentation lattices)
  Index dim() const { return algebra->dim(); }
};

struct InvariantLattice {
  using Key = std::pair<Index, Index>;
  Index depth = 0;
  std::string source;
  std::map<Key, LatticeCell> cells;
  std::map<Key, Mat> horizontal;  // (i,j): cell(i,j) -> cell(i,j+1)
  std::map<Key, Mat> vertical;    // (i,j): cell(i+1,j) -> cell(i,j)
  Report report;

  const LatticeCell& cell(Index i, Index j) const {
    auto it = cells.find({i, j});
    if (it == cells.end()) throw Error(ErrorKind::InvalidInput, "no lattice cell at that position");
    return it->second;
  }
  std::vector<Index> row_dims(Index i) const {
    std::vector<Index> out;
    for (Index j = i; j <= depth; ++j) out.push_back(cell(i, j).dim());
    return out;
  }
};

namespace detail {

/// Commutation of the horizontal and vertical maps around every unit square,
/// and of the trace with the horizontal maps.
inline void check_lattice_maps(InvariantLattice& lat, double eps) {
  for (Index i = 0; i < lat.depth; ++i)
    for (Index j = i + 1; j < lat.depth; ++j) {
      // cell(i+1,j) -> cell(i,j) -> cell(i,j+1) vs cell(i+1,j) -> cell(i+1,j+1) -> cell(i,j+1)
      Mat a = lat.horizontal.at({i, j}) * lat.vertical.at({i, j});
      Mat b = lat.vertical.at({i, j + 1}) * lat.horizontal.at({i + 1, j});
      lat.report.add("square (" + std::to_string(i) + "," + std::to_string(j) + ") commutes", max_abs(Mat(a - b)), eps);
    }
  for (const auto& [key, h] : lat.horizontal) {
    SubalgebraEmbedding e{lat.cell(key.first, key.second).algebra, lat.cell(key.first, key.second + 1).algebra, h};
    Report r = e.validate(eps, true);
    const std::string tag = "horizontal (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") ";
    for (const auto& c : r.checks) lat.report.checks.push_back({tag + c.name, c.residual, c.pass});
  }
}

}  // namespace detail

/// Cells B_i' ∩ B_j^{β_j} for 0 <= i <= j <= depth of the Jones tower of
/// `data` with β₁ extended up the tower.
inline InvariantLattice standard_invariant(const InclusionData& data, const CoactionMap& beta1, Index depth,
                                           double eps = kDefaultEps) {
  if (depth < 1) throw Error(ErrorKind::InvalidInput, "lattice depth must be at least 1");
  TowerLevelChain tower = jones_tower(data, depth - 1, eps);
  ExtendedCoactions ext = extend_anticoaction(beta1, tower, eps);
  for (Index level = 0; level <= 1; ++level) {
    ErgodicityCheck e = ergodicity(ext.betas[level], eps);
    if (!e.ergodic)
      throw Error(ErrorKind::ErgodicityFailed,
                  "Z(B" + std::to_string(level) + ") has fixed central element " +
                      (e.witness.size() ? describe_element(*tower.levels[level], e.witness) : std::string("none")) +
                      " beyond the scalars");
  }
  InvariantLattice lat;
  lat.depth = depth;
  lat.source = "standard_invariant";
  for (const auto& c : ext.report.checks) lat.report.checks.push_back({"extension " + c.name, c.residual, c.pass});
  for (const auto& c : tower.report.checks) lat.report.checks.push_back({"tower " + c.name, c.residual, c.pass});
  for (Index j = 0; j <= depth; ++j) {
    const AlgebraPtr& bj = tower.levels[j];
    const Index dj = bj->dim();
    const Mat fix = ext.betas[j].map - kron(Mat::Identity(dj, dj), Mat(beta1.kac->alg->unit()));
    for (Index i = 0; i <= j; ++i) {
      Mat gens = tower.embedding(i, j);
      Mat sys(gens.cols() * dj + fix.rows(), dj);
      for (Index g = 0; g < gens.cols(); ++g) sys.middleRows(g * dj, dj) = bj->left_mult(gens.col(g)) - bj->right_mult(gens.col(g));
      sys.bottomRows(fix.rows()) = fix;
      Mat null = nullspace(sys, std::sqrt(eps));
      SubalgebraEmbedding sub = subalgebra(bj, null, eps);
      LatticeCell cell{i, j, sub.small, sub.embed, {}};
      const std::string tag = "cell (" + std::to_string(i) + "," + std::to_string(j) + ") ";
      double comm = 0.0;
      for (Index g = 0; g < gens.cols(); ++g)
        comm = std::max(comm, max_abs(Mat((bj->left_mult(gens.col(g)) - bj->right_mult(gens.col(g))) * sub.embed)));
      lat.report.add(tag + "inside the relative commutant", comm, eps);
      lat.report.add(tag + "fixed", max_abs(Mat(fix * sub.embed)), eps);
      if (i == j) lat.report.add_flag(tag + "is scalar", sub.small->dim() == 1);
      // Jones projections e_{i+1}, ..., e_{j-1}.
      Mat proj = sub.embed * sub.embed.adjoint() * bj->gram();
      for (Index m = i + 1; m <= j - 1; ++m) {
        Vec e = tower.jones_in(m, j);
        lat.report.add(tag + "contains e" + std::to_string(m), max_abs(Vec(proj * e - e)), eps);
      }
      lat.cells[{i, j}] = std::move(cell);
    }
  }
  // Horizontal maps follow B_j ⊂ B_{j+1}; vertical maps are inclusions inside B_j.
  for (Index i = 0; i <= depth; ++i)
    for (Index j = i; j <= depth; ++j) {
      const LatticeCell& c = lat.cell(i, j);
      if (j < depth) {
        const LatticeCell& n = lat.cell(i, j + 1);
        const FiniteStarAlgebra& big = *tower.levels[j + 1];
        Mat image = tower.embeddings[j].embed * c.in_ambient;
        Mat h = n.in_ambient.adjoint() * big.gram() * image;
        lat.horizontal[{i, j}] = h;
        lat.report.add("horizontal (" + std::to_string(i) + "," + std::to_string(j) + ") lands in the cell",
                       max_abs(Mat(n.in_ambient * h - image)), eps);
      }
      if (i < j) {
        const LatticeCell& up = lat.cell(i + 1, j);
        const FiniteStarAlgebra& bj = *tower.levels[j];
        Mat v = c.in_ambient.adjoint() * bj.gram() * up.in_ambient;
        lat.vertical[{i, j}] = v;
        lat.report.add("vertical (" + std::to_string(i) + "," + std::to_string(j) + ") lands in the cell",
                       max_abs(Mat(c.in_ambient * v - up.in_ambient)), eps);
      }
    }
  detail::check_lattice_maps(lat, eps);
  return lat;
}

/// Letters of the alternating word of cell (i,j), left to right; true means v.
/// The rightmost letter is v for even i and v̄ for odd i; `mirror` swaps them.
inline std::vector<bool> lattice_word(Index i, Index j, bool mirror = false) {
  const Index len = j - i;
  std::vector<bool> w(static_cast<std::size_t>(len));
  for (Index pos = 0; pos < len; ++pos) {
    // pos counted from the right
    const bool is_v = ((i + pos) % 2 == 0) != mirror;
    w[static_cast<std::size_t>(len - 1 - pos)] = is_v;
  }
  return w;
}

/// Cells End(word(i,j)) with horizontal T -> 1⊗T and vertical T -> T⊗1.
inline InvariantLattice r_lattice(const Corepresentation& v, Index depth, bool mirror = false, double eps = kDefaultEps) {
  if (depth < 1) throw Error(ErrorKind::InvalidInput, "lattice depth must be at least 1");
  Report vr = validate_corep(v, eps);
  if (!vr.pass()) throw Error(ErrorKind::NotUnitary, "corepresentation: " + vr.failures());
  const Corepresentation vbar = conjugate(v);
  InvariantLattice lat;
  lat.depth = depth;
  lat.source = "r_lattice";
  std::map<InvariantLattice::Key, Index> sizes;
  for (Index i = 0; i <= depth; ++i)
    for (Index j = i; j <= depth; ++j) {
      Corepresentation w = trivial_corep(v.kac);
      bool first = true;
      for (bool is_v : lattice_word(i, j, mirror)) {
        const Corepresentation& letter = is_v ? v : vbar;
        w = first ? letter : tensor(w, letter);
        first = false;
      }
      IntertwinerSpace end = intertwiners(w, w, eps);
      double closure = 0.0;
      LatticeCell cell{i, j, from_matrices(end.basis, eps, &closure), Mat(), end.basis};
      lat.report.add("cell (" + std::to_string(i) + "," + std::to_string(j) + ") closed", closure, std::sqrt(eps));
      sizes[{i, j}] = w.size;
      lat.cells[{i, j}] = std::move(cell);
    }
  // Coefficients in a Frobenius-orthonormal basis are Frobenius inner products.
  auto coeffs = [](const LatticeCell& c, const Mat& x) {
    Vec out(static_cast<Index>(c.matrices.size()));
    for (std::size_t k = 0; k < c.matrices.size(); ++k)
      out(static_cast<Index>(k)) = c.matrices[k].conjugate().cwiseProduct(x).sum();
    return out;
  };
  auto map_between = [&](const LatticeCell& from, const LatticeCell& to, auto&& lift, const std::string& tag) {
    Mat m(to.dim(), from.dim());
    double resid = 0.0;
    for (Index c = 0; c < from.dim(); ++c) {
      Mat x = lift(from.matrices[c]);
      m.col(c) = coeffs(to, x);
      Mat back = Mat::Zero(x.rows(), x.cols());
      for (Index k = 0; k < to.dim(); ++k) back += m(k, c) * to.matrices[k];
      resid = std::max(resid, max_abs(Mat(back - x)));
    }
    lat.report.add(tag + " lands in the cell", resid, eps);
    return m;
  };
  for (Index i = 0; i <= depth; ++i)
    for (Index j = i; j <= depth; ++j) {
      const std::string pos = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (j < depth) {
        const Index n = sizes[{i, j + 1}] / sizes[{i, j}];
        lat.horizontal[{i, j}] = map_between(
            lat.cell(i, j), lat.cell(i, j + 1), [n](const Mat& t) { return kron(Mat::Identity(n, n), t); },
            "horizontal " + pos);
      }
      if (i < j) {
        const Index n = sizes[{i, j}] / sizes[{i + 1, j}];
        lat.vertical[{i, j}] = map_between(
            lat.cell(i + 1, j), lat.cell(i, j), [n](const Mat& t) { return kron(t, Mat::Identity(n, n)); },
            "vertical " + pos);
      }
    }
  for (Index i = 0; i <= depth; ++i) lat.report.add_flag("cell (" + std::to_string(i) + "," + std::to_string(i) + ") is scalar", lat.cell(i, i).dim() == 1);
  detail::check_lattice_maps(lat, eps);
  return lat;
}

// ---------------------------------------------------------------------------
// Principal graphs

struct BratteliRow {
  Index row = 0;
  std::vector<std::vector<Index>> block_sizes;  // per level, sorted
  std::vector<IMat> edges;                       // level l -> l+1
};

struct PrincipalGraphData {
  std::vector<BratteliRow> rows;
  std::vector<Index> depth_profile;  // vertex count per level of row 0
};

/// Blocks reordered by size, ties kept in discovery order.
inline BlockStructure sorted_blocks(const BlockStructure& bs) {
  std::vector<Index> order(static_cast<std::size_t>(bs.blocks()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return bs.block_sizes[a] < bs.block_sizes[b]; });
  BlockStructure out;
  std::vector<Index> off = block_offsets(bs.block_sizes);
  out.block_isomorphism.resize(bs.block_isomorphism.rows(), bs.block_isomorphism.cols());
  Index col = 0;
  for (Index g : order) {
    out.block_sizes.push_back(bs.block_sizes[g]);
    out.weights.push_back(bs.weights[g]);
    out.central_projections.push_back(bs.central_projections[g]);
    const Index sq = bs.block_sizes[g] * bs.block_sizes[g];
    out.block_isomorphism.middleCols(col, sq) = bs.block_isomorphism.middleCols(off[g], sq);
    col += sq;
  }
  return out;
}

inline PrincipalGraphData principal_graph(const InvariantLattice& lat, double eps = kDefaultEps) {
  if (lat.depth < 2) throw Error(ErrorKind::InvalidInput, "principal graph needs lattice depth at least 2");
  PrincipalGraphData g;
  for (Index r = 0; r <= 1; ++r) {
    BratteliRow row;
    row.row = r;
    std::vector<BlockStructure> blocks;
    for (Index j = r; j <= lat.depth; ++j) {
      blocks.push_back(sorted_blocks(wedderburn(*lat.cell(r, j).algebra, eps)));
      row.block_sizes.push_back(blocks.back().block_sizes);
    }
    for (Index j = r; j < lat.depth; ++j) {
      SubalgebraEmbedding e{lat.cell(r, j).algebra, lat.cell(r, j + 1).algebra, lat.horizontal.at({r, j})};
      const std::size_t l = static_cast<std::size_t>(j - r);
      InclusionData d = inclusion_data(e, eps, &blocks[l], &blocks[l + 1], false);
      row.edges.push_back(d.matrix);
    }
    g.rows.push_back(std::move(row));
  }
  for (const auto& level : g.rows[0].block_sizes) g.depth_profile.push_back(static_cast<Index>(level.size()));
  return g;
}

/// Graphviz rendering: one cluster per lattice row, vertices labelled by
/// block size, parallel edges for multiplicities.
inline std::string to_dot(const PrincipalGraphData& g) {
  std::ostringstream os;
  os << "graph principal {\n  rankdir=LR;\n";
  for (const auto& row : g.rows) {
    os << "  subgraph cluster_row" << row.row << " {\n    label=\"row " << row.row << "\";\n";
    auto node = [&](std::size_t level, std::size_t b) {
      return "r" + std::to_string(row.row) + "_l" + std::to_string(level) + "_b" + std::to_string(b);
    };
    for (std::size_t l = 0; l < row.block_sizes.size(); ++l)
      for (std::size_t b = 0; b < row.block_sizes[l].size(); ++b)
        os << "    " << node(l, b) << " [label=\"" << row.block_sizes[l][b] << "\"];\n";
    for (std::size_t l = 0; l < row.edges.size(); ++l)
      for (std::size_t a = 0; a < row.edges[l].size(); ++a)
        for (std::size_t b = 0; b < row.edges[l][a].size(); ++b)
          for (long long m = 0; m < row.edges[l][a][b]; ++m) os << "    " << node(l, a) << " -- " << node(l + 1, b) << ";\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace kacsub
